#include "sizesched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sizesched/error.hpp"

namespace sizesched {

RunSummary summarize(const RunResult& result, const RunContext& context) {
  if (result.jobs.empty()) throw IncompleteRun("run has no jobs");
  double sojourn_sum = 0.0;
  double slowdown_sum = 0.0;
  for (const auto& job : result.jobs) {
    if (!job.completed_at) throw IncompleteRun("job '" + job.label + "' did not complete");
    const double sojourn = job.sojourn();
    sojourn_sum += sojourn;
    slowdown_sum += sojourn / job.true_size;
  }
  const auto n = static_cast<double>(result.jobs.size());
  return {context.scheduler, context.sigma,   context.load,       context.dn_ratio,
          context.run_id,    sojourn_sum / n, slowdown_sum / n, result.jobs.size()};
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptyInput("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("box statistics of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BoxStats box;
  box.median = quantile_sorted(sorted, 0.5);
  box.q1 = quantile_sorted(sorted, 0.25);
  box.q3 = quantile_sorted(sorted, 0.75);
  const double reach = 1.5 * (box.q3 - box.q1);
  const double lo_fence = box.q1 - reach;
  const double hi_fence = box.q3 + reach;

  box.whisker_lo = box.q1;
  box.whisker_hi = box.q3;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      ++box.n_outliers;
      continue;
    }
    box.whisker_lo = std::min(box.whisker_lo, v);
    box.whisker_hi = std::max(box.whisker_hi, v);
  }
  return box;
}

}  // namespace sizesched
