#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "sizesched/engine.hpp"

namespace sizesched {

struct RunContext {
  std::string scheduler;
  double sigma = 0.0;
  double load = 0.0;
  double dn_ratio = 0.0;
  int run_id = 0;
};

struct RunSummary {
  std::string scheduler;
  double sigma = 0.0;
  double load = 0.0;
  double dn_ratio = 0.0;
  int run_id = 0;
  double mean_sojourn = 0.0;
  double mean_slowdown = 0.0;  // mean of sojourn / true_size
  std::size_t job_count = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Throws IncompleteRun if any job lacks a completion time.
RunSummary summarize(const RunResult& result, const RunContext& context);

/// Five-number summary with Tukey whiskers (most extreme points within
/// 1.5 IQR of the box).
struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::size_t n_outliers = 0;
};

/// Quantile of an ascending sample by linear interpolation between order
/// statistics, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Throws EmptyInput.
BoxStats box_stats(std::span<const double> values);

}  // namespace sizesched
