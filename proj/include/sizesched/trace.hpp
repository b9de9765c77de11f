#pragma once

// SWIM-style trace parsing, load/bandwidth calibration and synthetic
// workload generation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sizesched {

/// One raw trace row.
struct JobSpec {
  double submit_time = 0.0;  // seconds
  double input_bytes = 0.0;
  double shuffle_bytes = 0.0;
  double output_bytes = 0.0;
  std::string label;

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

/// Zero-based column of each field in a tab-separated row.
struct ColumnMap {
  std::size_t label = 0;
  std::size_t submit = 1;
  std::size_t input = 2;
  std::size_t shuffle = 3;
  std::size_t output = 4;
};

/// Parses "label=0,submit=1,input=2,shuffle=3,output=4"; omitted keys keep
/// their defaults.
ColumnMap parse_column_map(std::string_view text);

enum class TimeUnit { seconds, milliseconds };

TimeUnit parse_time_unit(std::string_view text);

struct SwimOptions {
  ColumnMap columns;
  TimeUnit time_unit = TimeUnit::seconds;
};

/// One JobSpec per non-empty, non-comment line, in file order.
/// Throws MalformedRow / NegativeValue with the 1-based line number.
std::vector<JobSpec> parse_swim(std::istream& in, const SwimOptions& options = {});
std::vector<JobSpec> load_swim(const std::filesystem::path& path,
                               const SwimOptions& options = {});

/// Writes rows in the default column layout with round-trip exact numbers.
void write_swim(std::ostream& out, std::span<const JobSpec> jobs);

struct CalibrationConfig {
  double load = 0.9;      // total size / (t_e - t_0)
  double dn_ratio = 4.0;  // disk cost / network cost
};

/// Per-byte disk and network costs (seconds per byte) and the submission span.
struct Calibration {
  double d = 0.0;
  double n = 0.0;
  double t0 = 0.0;
  double te = 0.0;
};

/// Solves sum_j d(i_j + o_j) + n s_j = load (t_e - t_0) together with
/// d = dn_ratio * n.
Calibration calibrate(std::span<const JobSpec> jobs, const CalibrationConfig& config);

struct SizedJob {
  double submit_time = 0.0;
  double true_size = 0.0;  // seconds of service at full system rate
  std::string label;

  friend bool operator==(const SizedJob&, const SizedJob&) = default;
};

inline double job_size(const JobSpec& job, const Calibration& cal) {
  return cal.d * (job.input_bytes + job.output_bytes) + cal.n * job.shuffle_bytes;
}

/// Throws ZeroSizeJob for rows whose three byte counts are all zero.
std::vector<SizedJob> size_jobs(std::span<const JobSpec> jobs, const Calibration& cal);

struct HeavyTail {
  double shape = 1.5;  // Pareto tail index
  double scale = 1.0;  // minimum size
};

struct UniformSize {
  double lo = 1.0;
  double hi = 1.0;
};

using SizeDistribution = std::variant<HeavyTail, UniformSize>;

struct SyntheticSpec {
  std::size_t n_jobs = 1000;
  double arrival_rate = 1.0;  // Poisson arrivals, jobs per second
  SizeDistribution sizes = HeavyTail{};
  std::uint64_t seed = 1;
};

/// Parses "pareto:n=5000,rate=1,shape=1.5,scale=1,seed=1" or
/// "uniform:n=10,rate=1,lo=1,hi=5,seed=1". Throws InvalidParams.
SyntheticSpec parse_synthetic_spec(std::string_view text);

/// Poisson arrivals starting at t = 0 with i.i.d. sizes.
std::vector<SizedJob> gen_synthetic(const SyntheticSpec& spec);

/// Same arrivals and sizes as gen_synthetic, expressed as a byte trace: each
/// job's size is split into input/output (disk) and shuffle (network) bytes so
/// that the trace can be re-sized through calibrate().
std::vector<JobSpec> gen_synthetic_trace(const SyntheticSpec& spec);

/// Workload interchange format: header `label\tsubmit_time\ttrue_size`.
void write_workload(std::ostream& out, std::span<const SizedJob> jobs);
std::vector<SizedJob> read_workload(std::istream& in);
std::vector<SizedJob> load_workload(const std::filesystem::path& path);

}  // namespace sizesched
