#pragma once

// Fluid discrete-event simulation of a single work-conserving resource.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sizesched/errmodel.hpp"
#include "sizesched/policy.hpp"

namespace sizesched {

struct JobRecord {
  std::string label;
  double submit_time = 0.0;
  double true_size = 0.0;
  double est_size = 0.0;
  std::optional<double> completed_at;
  std::optional<double> became_late_at;

  double sojourn() const { return completed_at.value() - submit_time; }
};

struct RunResult {
  std::vector<JobRecord> jobs;  // workload order
  double total_simulated_time = 0.0;  // clock at the last completion
  double busy_time = 0.0;             // time with at least one pending job
  double delivered_service = 0.0;     // integral of the aggregate rate
  std::size_t decisions = 0;          // policy consultations
};

struct EngineOptions {
  std::size_t max_events = 100'000'000;
};

/// A job counts as complete once its remaining work is at most
/// max(1e-12 s, 1e-9 * true_size).
double completion_tolerance(double true_size);

/// Exact event-driven run. `workload` must be non-empty, sorted by
/// submit_time, with positive true and estimated sizes.
RunResult run(std::span<const EstimatedJob> workload, Scheduler& policy,
              const EngineOptions& options = {});

/// Fixed-step reference simulation. Time advances on a grid of step `dt`;
/// within a step the policy is re-consulted on arrivals, wakeups and when a
/// job runs out of work. Completion times are rounded up to the end of the
/// step in which the job finished.
RunResult run_discretized(std::span<const EstimatedJob> workload, Scheduler& policy,
                          double dt, const EngineOptions& options = {});

}  // namespace sizesched
