#include "sizesched/errmodel.hpp"

#include <cmath>
#include <random>

#include "sizesched/error.hpp"

namespace sizesched {

std::vector<EstimatedJob> estimate(std::span<const SizedJob> jobs, const ErrorModel& model) {
  if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma)) {
    throw InvalidParams("sigma must be finite and >= 0");
  }
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> z(0.0, 1.0);

  std::vector<EstimatedJob> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) {
    if (!(job.true_size > 0.0)) {
      throw NonPositiveSize("job '" + job.label + "' has non-positive size");
    }
    double est = job.true_size;
    if (model.sigma > 0.0) est = job.true_size * std::exp(model.sigma * z(rng));
    out.push_back({job.submit_time, job.true_size, est, job.label});
  }
  return out;
}

std::vector<EstimatedJob> exact_estimates(std::span<const SizedJob> jobs) {
  return estimate(jobs, ErrorModel{0.0, 0});
}

}  // namespace sizesched
