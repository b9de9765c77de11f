#include "sizesched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sizesched/error.hpp"

namespace sizesched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SchedulerDecision serve_one(JobId id) {
  SchedulerDecision decision;
  decision.allocation.shares.push_back({id, 1.0});
  return decision;
}

/// Earlier submission, then input order.
bool arrives_before(const PendingJob& a, const PendingJob& b) {
  if (a.submit_time != b.submit_time) return a.submit_time < b.submit_time;
  return a.id < b.id;
}

/// Job minimizing key(job); keys within kTieTolerance of the minimum tie and
/// fall back to arrival order.
template <typename Jobs, typename Key>
const PendingJob& min_with_ties(const Jobs& jobs, Key key) {
  double best = kInf;
  for (const PendingJob* job : jobs) best = std::min(best, key(*job));
  const PendingJob* chosen = nullptr;
  for (const PendingJob* job : jobs) {
    if (key(*job) > best + kTieTolerance) continue;
    if (!chosen || arrives_before(*job, *chosen)) chosen = job;
  }
  return *chosen;
}

double after(double now, double t) {
  return t > now ? t : std::nextafter(now, kInf);
}

}  // namespace

bool is_size_blind(std::string_view name) {
  return name == "FIFO" || name == "PS" || name == "LAS";
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view name) {
  if (name == "FIFO") return std::make_unique<FifoScheduler>();
  if (name == "PS") return std::make_unique<PsScheduler>();
  if (name == "LAS") return std::make_unique<LasScheduler>();
  if (name == "SRPT") return std::make_unique<SrptScheduler>();
  if (name == "FSP+FIFO") return std::make_unique<FspScheduler>(LatePolicy::fifo);
  if (name == "FSP+PS") return std::make_unique<FspScheduler>(LatePolicy::ps);
  throw UnknownScheduler("unknown scheduler '" + std::string(name) + "'");
}

SchedulerDecision FifoScheduler::decide(const PendingView& view) {
  const PendingJob* first = &view.jobs.front();
  for (const auto& job : view.jobs) {
    if (arrives_before(job, *first)) first = &job;
  }
  return serve_one(first->id);
}

SchedulerDecision PsScheduler::decide(const PendingView& view) {
  SchedulerDecision decision;
  const double rate = 1.0 / static_cast<double>(view.jobs.size());
  decision.allocation.shares.reserve(view.jobs.size());
  for (const auto& job : view.jobs) decision.allocation.shares.push_back({job.id, rate});
  return decision;
}

SchedulerDecision LasScheduler::decide(const PendingView& view) {
  double least = kInf;
  for (const auto& job : view.jobs) least = std::min(least, job.attained);

  SchedulerDecision decision;
  double next_level = kInf;
  std::size_t group = 0;
  for (const auto& job : view.jobs) {
    if (job.attained <= least + kTieTolerance) {
      ++group;
    } else {
      next_level = std::min(next_level, job.attained);
    }
  }
  const double rate = 1.0 / static_cast<double>(group);
  for (const auto& job : view.jobs) {
    if (job.attained <= least + kTieTolerance) decision.allocation.shares.push_back({job.id, rate});
  }
  if (next_level < kInf) {
    decision.wakeup = after(view.now, view.now + (next_level - least) * static_cast<double>(group));
  }
  return decision;
}

SchedulerDecision SrptScheduler::decide(const PendingView& view) {
  const PendingJob* best = &view.jobs.front();
  for (const auto& job : view.jobs) {
    const double r = job.est_remaining();
    const double b = best->est_remaining();
    if (r < b || (r == b && arrives_before(job, *best))) best = &job;
  }
  return serve_one(best->id);
}

void FspScheduler::advance(const PendingView& view) {
  std::vector<const PendingJob*> entries;
  for (const auto& job : view.jobs) {
    if (job.id >= jobs_.size()) jobs_.resize(job.id + 1);
    if (!jobs_[job.id].known) entries.push_back(&job);
  }
  std::sort(entries.begin(), entries.end(),
            [](const PendingJob* a, const PendingJob* b) { return arrives_before(*a, *b); });

  if (!started_) {
    last_update_ = entries.empty() ? view.now : std::min(view.now, entries.front()->submit_time);
    started_ = true;
  }

  auto enter = [&](const PendingJob& job) {
    auto& vj = jobs_[job.id];
    vj.known = true;
    vj.submit_time = job.submit_time;
    vj.finish_tag = vclock_ + job.est_size;
    active_.emplace(vj.finish_tag, vj.submit_time, job.id);
  };

  double t = last_update_;
  std::size_t next = 0;
  while (true) {
    const double entry_at = next < entries.size() ? std::max(entries[next]->submit_time, t) : kInf;
    const auto k = static_cast<double>(active_.size());
    double finish_at = kInf;
    double min_tag = kInf;
    if (!active_.empty()) {
      min_tag = std::get<0>(*active_.begin());
      finish_at = t + (min_tag - vclock_) * k;
    }
    const double target = std::min({view.now, entry_at, finish_at});
    if (!active_.empty()) {
      if (target >= finish_at) {
        vclock_ = std::max(vclock_, min_tag);
      } else {
        vclock_ += (target - t) / k;
      }
    }
    t = target;

    const double slack = 1e-12 * std::max(1.0, std::abs(vclock_));
    while (!active_.empty() && std::get<0>(*active_.begin()) <= vclock_ + slack) {
      const JobId id = std::get<2>(*active_.begin());
      jobs_[id].virtual_done_at = t;
      active_.erase(active_.begin());
    }
    while (next < entries.size() && entries[next]->submit_time <= t) enter(*entries[next++]);
    if (t >= view.now) break;
  }
  // Entries stamped after view.now can only come from a caller whose clock
  // lags the submissions; they enter now.
  while (next < entries.size()) enter(*entries[next++]);
  last_update_ = std::max(last_update_, view.now);
}

std::optional<double> FspScheduler::virtual_remaining(JobId id) const {
  if (id >= jobs_.size() || !jobs_[id].known) return std::nullopt;
  const auto& vj = jobs_[id];
  if (vj.virtual_done_at) return 0.0;
  return std::max(vj.finish_tag - vclock_, 0.0);
}

SchedulerDecision FspScheduler::decide(const PendingView& view) {
  advance(view);

  SchedulerDecision decision;
  std::vector<const PendingJob*> late;
  std::vector<const PendingJob*> on_time;
  for (const auto& job : view.jobs) {
    const auto& vj = jobs_[job.id];
    if (vj.virtual_done_at) {
      late.push_back(&job);
      if (!job.became_late_at) decision.late.push_back({job.id, *vj.virtual_done_at});
    } else {
      on_time.push_back(&job);
    }
  }
  auto late_since = [&](const PendingJob& job) {
    return job.became_late_at.value_or(*jobs_[job.id].virtual_done_at);
  };

  if (late.empty()) {
    const auto& chosen =
        min_with_ties(on_time, [&](const PendingJob& job) { return jobs_[job.id].finish_tag; });
    decision.allocation.shares.push_back({chosen.id, 1.0});
  } else if (late_policy_ == LatePolicy::ps) {
    const double rate = 1.0 / static_cast<double>(late.size());
    for (const PendingJob* job : late) decision.allocation.shares.push_back({job->id, rate});
  } else {
    const auto& chosen = min_with_ties(late, late_since);
    decision.allocation.shares.push_back({chosen.id, 1.0});
  }

  if (!active_.empty()) {
    const double k = static_cast<double>(active_.size());
    const double min_tag = std::get<0>(*active_.begin());
    decision.wakeup = after(view.now, view.now + (min_tag - vclock_) * k);
  }
  return decision;
}

}  // namespace sizesched
