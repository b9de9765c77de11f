#pragma once

// Repeated seeded simulation runs over parameter grids, and their CSV output.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sizesched/engine.hpp"
#include "sizesched/metrics.hpp"
#include "sizesched/trace.hpp"

namespace sizesched {

enum class SweepAxis { sigma, load, dn };

std::vector<double> default_sigma_grid();  // 0, 0.25, ..., 1
std::vector<double> default_load_grid();   // 0.1, 0.2, ..., 2.0
std::vector<double> default_dn_grid();     // 1, 2, 4, 8, 16

struct ExperimentConfig {
  std::vector<std::string> schedulers{"FIFO", "PS", "LAS", "SRPT", "FSP+FIFO", "FSP+PS"};
  std::vector<double> sigma_grid = default_sigma_grid();
  std::vector<double> load_grid = default_load_grid();
  std::vector<double> dn_grid = default_dn_grid();
  // Values held fixed while another axis is swept.
  double sigma = 0.0;
  double load = 0.9;
  double dn_ratio = 4.0;
  int runs_per_point = 100;
  std::uint64_t base_seed = 42;
  unsigned parallelism = 1;
};

/// Throws InvalidConfig / UnknownScheduler.
void validate(const ExperimentConfig& config);

/// Error-free points and size-blind policies do not depend on the error
/// draws, so they are simulated once.
bool needs_single_run(std::string_view scheduler, double sigma);

/// Runs every (scheduler, grid value, run) combination along `axis`. Run r
/// draws estimation errors with seed base_seed + r. Records come back sorted
/// by scheduler name, grid value and run id.
std::vector<RunSummary> run_sweep(std::span<const JobSpec> trace, const ExperimentConfig& config,
                                  SweepAxis axis);

inline std::vector<RunSummary> sweep_sigma(std::span<const JobSpec> trace,
                                           const ExperimentConfig& config) {
  return run_sweep(trace, config, SweepAxis::sigma);
}
inline std::vector<RunSummary> sweep_load(std::span<const JobSpec> trace,
                                          const ExperimentConfig& config) {
  return run_sweep(trace, config, SweepAxis::load);
}
inline std::vector<RunSummary> sweep_dn(std::span<const JobSpec> trace,
                                        const ExperimentConfig& config) {
  return run_sweep(trace, config, SweepAxis::dn);
}

struct SimulationOutcome {
  RunSummary summary;
  RunResult result;
};

/// One run on an already sized workload (sorted by submit time).
SimulationOutcome simulate_once(std::span<const SizedJob> workload, std::string_view scheduler,
                                double sigma, std::uint64_t seed, double load = 0.0,
                                double dn_ratio = 0.0);

/// Calibrates `trace` at (load, dn_ratio), then runs once.
SimulationOutcome simulate_once(std::span<const JobSpec> trace, std::string_view scheduler,
                                double sigma, double load, double dn_ratio, std::uint64_t seed);

/// Stable sort by submit time, as the engine requires.
std::vector<SizedJob> sorted_by_submit(std::vector<SizedJob> jobs);

inline constexpr std::string_view kRecordsHeader =
    "scheduler,sigma,load,dn,run_id,mean_sojourn,mean_slowdown,job_count";

/// %.9g rendering used for every float in CSV output.
std::string format_sig9(double value);

void write_records_csv(std::ostream& out, std::span<const RunSummary> records);

/// Per grid point aggregates over runs: mean and box statistics of the
/// per-run mean sojourn.
void write_point_summary_csv(std::ostream& out, std::span<const RunSummary> records,
                             SweepAxis axis);

/// Per-job results of one run.
void write_job_dump(std::ostream& out, const RunResult& result);

/// Writes through a temporary sibling file and renames it into place; the
/// temporary is removed if `writer` throws.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace sizesched
