#include "sizesched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sizesched/error.hpp"

namespace sizesched {

namespace {

constexpr double kRateSumTolerance = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_workload(std::span<const EstimatedJob> workload) {
  if (workload.empty()) throw InvalidWorkload("workload is empty");
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const auto& job = workload[i];
    if (!(job.true_size > 0.0) || !(job.est_size > 0.0) || !std::isfinite(job.true_size) ||
        !std::isfinite(job.est_size)) {
      throw NonPositiveSize("job '" + job.label + "' needs positive finite sizes");
    }
    if (!std::isfinite(job.submit_time)) {
      throw InvalidWorkload("job '" + job.label + "' has a non-finite submit time");
    }
    if (i > 0 && job.submit_time < workload[i - 1].submit_time) {
      throw InvalidWorkload("workload is not sorted by submit time");
    }
  }
}

/// Mutable per-run state shared by both engines.
class RunState {
 public:
  RunState(std::span<const EstimatedJob> workload, Scheduler& policy,
           const EngineOptions& options)
      : workload_(workload), policy_(policy), options_(options),
        attained_(workload.size(), 0.0), rate_(workload.size(), 0.0),
        is_pending_(workload.size(), 0) {
    result_.jobs.reserve(workload.size());
    for (const auto& job : workload) {
      result_.jobs.push_back({job.label, job.submit_time, job.true_size, job.est_size, {}, {}});
    }
  }

  bool done() const { return completed_ == workload_.size(); }
  bool idle() const { return pending_.empty(); }
  bool has_arrival() const { return next_arrival_ < workload_.size(); }
  double next_arrival_time() const {
    return has_arrival() ? workload_[next_arrival_].submit_time : kInf;
  }

  void admit_until(double now) {
    while (has_arrival() && workload_[next_arrival_].submit_time <= now) {
      is_pending_[next_arrival_] = 1;
      pending_.push_back(next_arrival_++);
    }
  }

  /// Consults the policy and installs its rates. Returns the wakeup, if any.
  std::optional<double> consult(double now) {
    if (++result_.decisions > options_.max_events) {
      throw NonTermination("event bound of " + std::to_string(options_.max_events) +
                           " exceeded");
    }
    view_.clear();
    for (JobId id : pending_) {
      const auto& job = workload_[id];
      view_.push_back({id, job.label, job.submit_time, job.est_size, attained_[id],
                       result_.jobs[id].became_late_at});
    }
    auto decision = policy_.decide(PendingView{now, view_});

    for (const auto& mark : decision.late) {
      if (mark.id >= workload_.size() || !is_pending_[mark.id]) {
        throw PolicyViolation("late mark for a job that is not pending");
      }
      auto& slot = result_.jobs[mark.id].became_late_at;
      if (!slot) slot = mark.at;
    }

    for (JobId id : active_) rate_[id] = 0.0;
    active_.clear();
    double sum = 0.0;
    for (const auto& share : decision.allocation.shares) {
      if (share.id >= workload_.size() || !is_pending_[share.id]) {
        throw PolicyViolation("rate assigned to a job that is not pending");
      }
      if (!(share.rate >= 0.0) || !std::isfinite(share.rate)) {
        throw PolicyViolation("negative or non-finite rate");
      }
      if (share.rate == 0.0) continue;
      if (rate_[share.id] != 0.0) throw PolicyViolation("job listed twice in allocation");
      rate_[share.id] = share.rate;
      active_.push_back(share.id);
      sum += share.rate;
    }
    if (std::abs(sum - 1.0) > kRateSumTolerance) {
      throw PolicyViolation("rates sum to " + std::to_string(sum) + ", expected 1");
    }
    if (decision.wakeup && !(*decision.wakeup > now)) {
      throw PolicyViolation("wakeup is not after the current time");
    }
    return decision.wakeup;
  }

  /// Earliest time a served job runs out of true work under current rates.
  double time_to_first_completion() const {
    double best = kInf;
    for (JobId id : active_) {
      best = std::min(best, remaining(id) / rate_[id]);
    }
    return best;
  }

  /// Serves every active job over [from, to] at its rate. Jobs whose
  /// projected completion falls within the interval are snapped to exactly
  /// done, so rounding in `to - from` cannot leave a residue.
  void serve(double from, double to) {
    const double dt = to - from;
    for (JobId id : active_) {
      const double projected = remaining(id) / rate_[id];
      const double work = rate_[id] * dt;
      result_.delivered_service += work;
      if (from + projected <= to) {
        attained_[id] = workload_[id].true_size;
      } else {
        attained_[id] += work;
      }
    }
    result_.busy_time += dt;
  }

  /// Completes every pending job within tolerance; returns how many.
  std::size_t complete_finished(double stamp) {
    std::size_t finished = 0;
    auto keep = pending_.begin();
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      const JobId id = *it;
      if (remaining(id) <= completion_tolerance(workload_[id].true_size)) {
        result_.jobs[id].completed_at = stamp;
        is_pending_[id] = 0;
        ++completed_;
        ++finished;
      } else {
        *keep++ = id;
      }
    }
    pending_.erase(keep, pending_.end());
    if (finished > 0) {
      std::erase_if(active_, [&](JobId id) {
        if (is_pending_[id]) return false;
        rate_[id] = 0.0;
        return true;
      });
      result_.total_simulated_time = std::max(result_.total_simulated_time, stamp);
    }
    return finished;
  }

  RunResult take_result() { return std::move(result_); }

 private:
  double remaining(JobId id) const { return workload_[id].true_size - attained_[id]; }

  std::span<const EstimatedJob> workload_;
  Scheduler& policy_;
  EngineOptions options_;

  std::vector<double> attained_;
  std::vector<double> rate_;
  std::vector<char> is_pending_;
  std::vector<JobId> pending_;  // arrival order
  std::vector<JobId> active_;   // jobs with rate > 0
  std::vector<PendingJob> view_;
  std::size_t next_arrival_ = 0;
  std::size_t completed_ = 0;
  RunResult result_;
};

}  // namespace

double completion_tolerance(double true_size) {
  return std::max(1e-12, 1e-9 * true_size);
}

RunResult run(std::span<const EstimatedJob> workload, Scheduler& policy,
              const EngineOptions& options) {
  check_workload(workload);
  RunState state(workload, policy, options);

  double now = workload.front().submit_time;
  while (!state.done()) {
    state.admit_until(now);
    if (state.idle()) {
      now = state.next_arrival_time();
      continue;
    }
    const auto wakeup = state.consult(now);

    double next = std::min(state.next_arrival_time(), now + state.time_to_first_completion());
    if (wakeup) next = std::min(next, *wakeup);
    if (!std::isfinite(next)) throw PolicyViolation("no progress possible: all rates are zero");

    state.serve(now, next);
    now = next;
    state.complete_finished(now);
  }
  return state.take_result();
}

RunResult run_discretized(std::span<const EstimatedJob> workload, Scheduler& policy,
                          double dt, const EngineOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParams("dt must be positive");
  check_workload(workload);
  RunState state(workload, policy, options);

  const double origin = workload.front().submit_time;
  auto boundary = [&](std::size_t k) { return origin + static_cast<double>(k) * dt; };

  std::size_t step = 0;
  double now = origin;
  while (!state.done()) {
    state.admit_until(now);
    const double step_end = boundary(step + 1);
    if (state.idle()) {
      const double arrival = state.next_arrival_time();
      if (arrival >= step_end) {
        step = std::max(step + 1, static_cast<std::size_t>(std::floor((arrival - origin) / dt)));
        while (boundary(step + 1) <= arrival) ++step;
      }
      now = arrival;
      continue;
    }
    const auto wakeup = state.consult(now);
    double until = std::min({step_end, state.next_arrival_time(),
                             now + state.time_to_first_completion()});
    if (wakeup) until = std::min(until, *wakeup);
    state.serve(now, until);
    now = until;
    state.complete_finished(step_end);
    if (now >= step_end) {
      ++step;
      now = step_end;
    }
  }
  return state.take_result();
}

}  // namespace sizesched
