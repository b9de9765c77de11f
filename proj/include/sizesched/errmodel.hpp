#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sizesched/trace.hpp"

namespace sizesched {

/// Multiplicative log-normal estimation error: est = size * exp(sigma * Z).
struct ErrorModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct EstimatedJob {
  double submit_time = 0.0;
  double true_size = 0.0;
  double est_size = 0.0;
  std::string label;

  friend bool operator==(const EstimatedJob&, const EstimatedJob&) = default;
};

/// Draws one standard normal per job from a single stream seeded with
/// model.seed, in list order. sigma == 0 copies sizes unchanged.
/// Throws NonPositiveSize for jobs with true_size <= 0, InvalidParams for a
/// negative or non-finite sigma.
std::vector<EstimatedJob> estimate(std::span<const SizedJob> jobs, const ErrorModel& model);

/// Wraps sized jobs with exact estimates (same as estimate() with sigma 0).
std::vector<EstimatedJob> exact_estimates(std::span<const SizedJob> jobs);

}  // namespace sizesched
