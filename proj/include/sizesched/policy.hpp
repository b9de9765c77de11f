#pragma once

// Contract between the simulation engine and scheduling policies. Policies
// see estimates and attained service only; true remaining work stays inside
// the engine.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sizesched {

/// Position of a job in the (submit-ordered) workload.
using JobId = std::size_t;

struct PendingJob {
  JobId id = 0;
  std::string_view label;
  double submit_time = 0.0;
  double est_size = 0.0;
  double attained = 0.0;  // true service received so far
  std::optional<double> became_late_at;

  double est_remaining() const { return std::max(est_size - attained, 0.0); }
};

/// Pending jobs in arrival order at time `now`.
struct PendingView {
  double now = 0.0;
  std::span<const PendingJob> jobs;
};

struct Share {
  JobId id = 0;
  double rate = 0.0;
};

/// Jobs not listed receive rate 0.
struct RateAllocation {
  std::vector<Share> shares;
};

struct LateMark {
  JobId id = 0;
  double at = 0.0;
};

struct SchedulerDecision {
  RateAllocation allocation;
  /// Absolute time at which the policy must be consulted again even if no
  /// job arrives or completes. Must be strictly after `now`.
  std::optional<double> wakeup;
  /// Jobs the policy has newly classified as late, with the onset instant.
  std::vector<LateMark> late;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual std::string_view name() const = 0;

  /// Called with at least one pending job.
  virtual SchedulerDecision decide(const PendingView& view) = 0;
};

}  // namespace sizesched
