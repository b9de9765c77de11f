#include "sizesched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include "sizesched/error.hpp"
#include "sizesched/errmodel.hpp"
#include "sizesched/schedulers.hpp"

namespace sizesched {

namespace {

double axis_value(const RunSummary& r, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::sigma: return r.sigma;
    case SweepAxis::load: return r.load;
    case SweepAxis::dn: return r.dn_ratio;
  }
  return 0.0;
}

void check_grid(const std::vector<double>& grid, const char* name, bool allow_zero) {
  if (grid.empty()) throw InvalidConfig(std::string(name) + " grid is empty");
  for (double v : grid) {
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      throw InvalidConfig(std::string("invalid ") + name + " value " + format_sig9(v));
    }
  }
}

struct Task {
  std::size_t point = 0;  // index into the sized workloads
  std::string scheduler;
  double sigma = 0.0;
  double load = 0.0;
  double dn_ratio = 0.0;
  int run_id = 0;
};

/// Runs fn(i) for i in [0, count) on up to `workers` threads; rethrows the
/// exception of the lowest failing index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<double> default_sigma_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

std::vector<double> default_load_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> default_dn_grid() { return {1.0, 2.0, 4.0, 8.0, 16.0}; }

void validate(const ExperimentConfig& config) {
  if (config.schedulers.empty()) throw InvalidConfig("no schedulers selected");
  for (const auto& name : config.schedulers) {
    if (std::find(kSchedulerNames.begin(), kSchedulerNames.end(), name) == kSchedulerNames.end()) {
      throw UnknownScheduler("unknown scheduler '" + name + "'");
    }
  }
  if (config.runs_per_point < 1) throw InvalidConfig("runs per point must be >= 1");
  if (config.parallelism < 1) throw InvalidConfig("parallelism must be >= 1");
  check_grid(config.sigma_grid, "sigma", true);
  check_grid(config.load_grid, "load", false);
  check_grid(config.dn_grid, "d/n", false);
  check_grid({config.sigma}, "sigma", true);
  check_grid({config.load}, "load", false);
  check_grid({config.dn_ratio}, "d/n", false);
}

bool needs_single_run(std::string_view scheduler, double sigma) {
  return sigma == 0.0 || is_size_blind(scheduler);
}

std::vector<SizedJob> sorted_by_submit(std::vector<SizedJob> jobs) {
  std::stable_sort(jobs.begin(), jobs.end(), [](const SizedJob& a, const SizedJob& b) {
    return a.submit_time < b.submit_time;
  });
  return jobs;
}

std::vector<RunSummary> run_sweep(std::span<const JobSpec> trace, const ExperimentConfig& config,
                                  SweepAxis axis) {
  validate(config);

  std::vector<double> grid;
  switch (axis) {
    case SweepAxis::sigma: grid = config.sigma_grid; break;
    case SweepAxis::load: grid = config.load_grid; break;
    case SweepAxis::dn: grid = config.dn_grid; break;
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // One calibrated workload per grid point; sigma does not change sizes.
  std::vector<std::vector<SizedJob>> workloads;
  std::vector<Task> tasks;
  auto schedulers = config.schedulers;
  std::sort(schedulers.begin(), schedulers.end());
  schedulers.erase(std::unique(schedulers.begin(), schedulers.end()), schedulers.end());

  for (double value : grid) {
    const double sigma = axis == SweepAxis::sigma ? value : config.sigma;
    const double load = axis == SweepAxis::load ? value : config.load;
    const double dn = axis == SweepAxis::dn ? value : config.dn_ratio;
    if (axis != SweepAxis::sigma || workloads.empty()) {
      const auto cal = calibrate(trace, {load, dn});
      workloads.push_back(sorted_by_submit(size_jobs(trace, cal)));
    }
    for (const auto& name : schedulers) {
      const int runs = needs_single_run(name, sigma) ? 1 : config.runs_per_point;
      for (int r = 0; r < runs; ++r) {
        tasks.push_back({workloads.size() - 1, name, sigma, load, dn, r});
      }
    }
  }

  std::vector<RunSummary> records(tasks.size());
  parallel_for(tasks.size(), config.parallelism, [&](std::size_t i) {
    const auto& task = tasks[i];
    const auto seed = config.base_seed + static_cast<std::uint64_t>(task.run_id);
    auto outcome = simulate_once(workloads[task.point], task.scheduler, task.sigma, seed,
                                 task.load, task.dn_ratio);
    outcome.summary.run_id = task.run_id;
    records[i] = std::move(outcome.summary);
  });

  std::stable_sort(records.begin(), records.end(), [axis](const RunSummary& a, const RunSummary& b) {
    return std::make_tuple(std::string_view(a.scheduler), axis_value(a, axis), a.run_id) <
           std::make_tuple(std::string_view(b.scheduler), axis_value(b, axis), b.run_id);
  });
  return records;
}

SimulationOutcome simulate_once(std::span<const SizedJob> workload, std::string_view scheduler,
                                double sigma, std::uint64_t seed, double load, double dn_ratio) {
  const auto estimated = estimate(workload, ErrorModel{sigma, seed});
  auto policy = make_scheduler(scheduler);
  auto result = run(estimated, *policy);
  auto summary = summarize(result, RunContext{std::string(scheduler), sigma, load, dn_ratio, 0});
  return {std::move(summary), std::move(result)};
}

SimulationOutcome simulate_once(std::span<const JobSpec> trace, std::string_view scheduler,
                                double sigma, double load, double dn_ratio, std::uint64_t seed) {
  const auto cal = calibrate(trace, {load, dn_ratio});
  const auto workload = sorted_by_submit(size_jobs(trace, cal));
  return simulate_once(workload, scheduler, sigma, seed, load, dn_ratio);
}

std::string format_sig9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_records_csv(std::ostream& out, std::span<const RunSummary> records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.scheduler << ',' << format_sig9(r.sigma) << ',' << format_sig9(r.load) << ','
        << format_sig9(r.dn_ratio) << ',' << r.run_id << ',' << format_sig9(r.mean_sojourn) << ','
        << format_sig9(r.mean_slowdown) << ',' << r.job_count << '\n';
  }
}

void write_point_summary_csv(std::ostream& out, std::span<const RunSummary> records,
                             SweepAxis axis) {
  out << "scheduler,sigma,load,dn,runs,mean_of_mean_sojourn,median,q1,q3,whisker_lo,whisker_hi,"
         "n_outliers,mean_of_mean_slowdown\n";
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin;
    while (end < records.size() && records[end].scheduler == records[begin].scheduler &&
           axis_value(records[end], axis) == axis_value(records[begin], axis)) {
      ++end;
    }
    std::vector<double> sojourns;
    double sojourn_sum = 0.0;
    double slowdown_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sojourns.push_back(records[i].mean_sojourn);
      sojourn_sum += records[i].mean_sojourn;
      slowdown_sum += records[i].mean_slowdown;
    }
    const auto n = static_cast<double>(end - begin);
    const auto box = box_stats(sojourns);
    const auto& head = records[begin];
    out << head.scheduler << ',' << format_sig9(head.sigma) << ',' << format_sig9(head.load) << ','
        << format_sig9(head.dn_ratio) << ',' << (end - begin) << ',' << format_sig9(sojourn_sum / n)
        << ',' << format_sig9(box.median) << ',' << format_sig9(box.q1) << ','
        << format_sig9(box.q3) << ',' << format_sig9(box.whisker_lo) << ','
        << format_sig9(box.whisker_hi) << ',' << box.n_outliers << ','
        << format_sig9(slowdown_sum / n) << '\n';
    begin = end;
  }
}

void write_job_dump(std::ostream& out, const RunResult& result) {
  out << "label,submit_time,true_size,est_size,completed_at,sojourn,slowdown,became_late_at\n";
  for (const auto& job : result.jobs) {
    out << job.label << ',' << format_sig9(job.submit_time) << ',' << format_sig9(job.true_size)
        << ',' << format_sig9(job.est_size) << ',';
    if (job.completed_at) {
      out << format_sig9(*job.completed_at) << ',' << format_sig9(job.sojourn()) << ','
          << format_sig9(job.sojourn() / job.true_size);
    } else {
      out << ",,";
    }
    out << ',';
    if (job.became_late_at) out << format_sig9(*job.became_late_at);
    out << '\n';
  }
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer) {
  auto tmp = path;
  tmp += ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write '" + tmp.string() + "'");
      writer(out);
      out.flush();
      if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace sizesched
