#pragma once

// Rate-allocation policies: FIFO, PS, LAS, SRPT and FSP with two treatments
// of late jobs.

#include <array>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <tuple>
#include <vector>

#include "sizesched/policy.hpp"

namespace sizesched {

/// Canonical names, as used on the command line and in CSV output.
inline constexpr std::array<std::string_view, 6> kSchedulerNames = {
    "FIFO", "PS", "LAS", "SRPT", "FSP+FIFO", "FSP+PS"};

/// Tie tolerance (seconds) for attained service and virtual remaining work.
inline constexpr double kTieTolerance = 1e-9;

/// Whether the policy ignores size estimates (FIFO, PS, LAS).
bool is_size_blind(std::string_view name);

/// Throws UnknownScheduler for names outside kSchedulerNames.
std::unique_ptr<Scheduler> make_scheduler(std::string_view name);

class FifoScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "FIFO"; }
  SchedulerDecision decide(const PendingView& view) override;
};

class PsScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "PS"; }
  SchedulerDecision decide(const PendingView& view) override;
};

/// Least attained service. The least-served group shares the resource; a
/// wakeup fires when it catches up with the next attained level.
class LasScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "LAS"; }
  SchedulerDecision decide(const PendingView& view) override;
};

/// Preemptive shortest estimated remaining work, clamped at zero.
class SrptScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "SRPT"; }
  SchedulerDecision decide(const PendingView& view) override;
};

enum class LatePolicy { fifo, ps };

/// Fair Sojourn Protocol. Jobs are prioritized by their completion order in
/// an emulated processor-sharing system fed with estimated sizes. The
/// emulation keeps a virtual clock V advancing at 1/k (k virtually active
/// jobs); a job entering at V_a finishes virtually when V reaches
/// V_a + est_size. Jobs really pending after their virtual completion are
/// late and take precedence over everything else.
class FspScheduler final : public Scheduler {
 public:
  explicit FspScheduler(LatePolicy late_policy) : late_policy_(late_policy) {}

  std::string_view name() const override {
    return late_policy_ == LatePolicy::fifo ? "FSP+FIFO" : "FSP+PS";
  }
  SchedulerDecision decide(const PendingView& view) override;

  /// Estimated work left for `id` in the emulated system (0 once virtually
  /// complete); nullopt for a job not seen yet.
  std::optional<double> virtual_remaining(JobId id) const;
  /// Number of virtually active jobs.
  std::size_t virtually_active() const { return active_.size(); }

 private:
  struct VirtualJob {
    bool known = false;
    double finish_tag = 0.0;
    double submit_time = 0.0;
    std::optional<double> virtual_done_at;
  };

  void advance(const PendingView& view);

  LatePolicy late_policy_;
  std::vector<VirtualJob> jobs_;  // indexed by JobId
  // (finish tag, submit time, id) of virtually active jobs.
  std::set<std::tuple<double, double, JobId>> active_;
  double vclock_ = 0.0;
  double last_update_ = 0.0;
  bool started_ = false;
};

}  // namespace sizesched
