#include "sizesched/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include "sizesched/error.hpp"
#include "text_util.hpp"

namespace sizesched {

namespace {

double parse_field(const std::vector<std::string_view>& fields, std::size_t column,
                   std::size_t line, const char* name) {
  if (column >= fields.size()) {
    throw MalformedRow(line, std::string("missing ") + name + " column " +
                                 std::to_string(column));
  }
  const auto value = detail::parse_double(fields[column]);
  if (!value || !std::isfinite(*value)) {
    throw MalformedRow(line, std::string("non-numeric ") + name + " '" +
                                 std::string(fields[column]) + "'");
  }
  if (*value < 0.0) throw NegativeValue(line, name);
  return *value;
}

std::size_t parse_index(std::string_view text) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidConfig("bad column index '" + std::string(text) + "'");
  }
  return value;
}

void check_distinct(const ColumnMap& map) {
  const std::size_t cols[] = {map.label, map.submit, map.input, map.shuffle, map.output};
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) {
      if (cols[a] == cols[b]) throw InvalidConfig("column map assigns one column twice");
    }
  }
}

double draw_size(std::mt19937_64& rng, const SizeDistribution& dist) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        const double u = unit(rng);
        if constexpr (std::is_same_v<D, HeavyTail>) {
          return d.scale * std::pow(1.0 - u, -1.0 / d.shape);
        } else {
          return d.lo + (d.hi - d.lo) * u;
        }
      },
      dist);
}

void validate(const SyntheticSpec& spec) {
  if (spec.n_jobs < 1) throw InvalidParams("synthetic workload needs n >= 1");
  if (!(spec.arrival_rate > 0.0) || !std::isfinite(spec.arrival_rate)) {
    throw InvalidParams("arrival rate must be positive and finite");
  }
  std::visit(
      [](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, HeavyTail>) {
          if (!(d.shape > 0.0) || !(d.scale > 0.0) || !std::isfinite(d.shape) ||
              !std::isfinite(d.scale)) {
            throw InvalidParams("heavy tail needs shape > 0 and scale > 0");
          }
        } else {
          if (!(d.lo > 0.0) || !(d.hi >= d.lo) || !std::isfinite(d.hi)) {
            throw InvalidParams("uniform sizes need 0 < lo <= hi");
          }
        }
      },
      spec.sizes);
}

}  // namespace

ColumnMap parse_column_map(std::string_view text) {
  ColumnMap map;
  for (auto item : detail::split(text, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig("column map entry '" + std::string(item) + "' lacks '='");
    }
    const auto key = detail::trim(item.substr(0, eq));
    const auto index = parse_index(detail::trim(item.substr(eq + 1)));
    if (key == "label") map.label = index;
    else if (key == "submit") map.submit = index;
    else if (key == "input") map.input = index;
    else if (key == "shuffle") map.shuffle = index;
    else if (key == "output") map.output = index;
    else throw InvalidConfig("unknown column key '" + std::string(key) + "'");
  }
  check_distinct(map);
  return map;
}

TimeUnit parse_time_unit(std::string_view text) {
  if (text == "seconds" || text == "s") return TimeUnit::seconds;
  if (text == "milliseconds" || text == "ms") return TimeUnit::milliseconds;
  throw InvalidConfig("unknown time unit '" + std::string(text) + "'");
}

std::vector<JobSpec> parse_swim(std::istream& in, const SwimOptions& options) {
  check_distinct(options.columns);
  const double time_scale = options.time_unit == TimeUnit::milliseconds ? 1e-3 : 1.0;
  const auto& cols = options.columns;

  std::vector<JobSpec> jobs;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (detail::trim(text).empty() || text.front() == '#') continue;

    const auto fields = detail::split(text, '\t');
    JobSpec job;
    job.submit_time = parse_field(fields, cols.submit, line, "submit_time") * time_scale;
    job.input_bytes = parse_field(fields, cols.input, line, "input_bytes");
    job.shuffle_bytes = parse_field(fields, cols.shuffle, line, "shuffle_bytes");
    job.output_bytes = parse_field(fields, cols.output, line, "output_bytes");
    if (cols.label >= fields.size()) throw MalformedRow(line, "missing label column");
    job.label = std::string(fields[cols.label]);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::vector<JobSpec> load_swim(const std::filesystem::path& path,
                               const SwimOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path.string() + "'");
  return parse_swim(in, options);
}

void write_swim(std::ostream& out, std::span<const JobSpec> jobs) {
  for (const auto& job : jobs) {
    out << job.label << '\t' << detail::format_exact(job.submit_time) << '\t'
        << detail::format_exact(job.input_bytes) << '\t'
        << detail::format_exact(job.shuffle_bytes) << '\t'
        << detail::format_exact(job.output_bytes) << '\n';
  }
}

Calibration calibrate(std::span<const JobSpec> jobs, const CalibrationConfig& config) {
  if (!(config.load > 0.0) || !std::isfinite(config.load)) {
    throw InvalidConfig("load must be positive and finite");
  }
  if (!(config.dn_ratio > 0.0) || !std::isfinite(config.dn_ratio)) {
    throw InvalidConfig("d/n ratio must be positive and finite");
  }
  if (jobs.size() < 2) throw DegenerateTrace("calibration needs at least two jobs");

  double t0 = std::numeric_limits<double>::infinity();
  double te = -std::numeric_limits<double>::infinity();
  double disk_bytes = 0.0;
  double network_bytes = 0.0;
  for (const auto& job : jobs) {
    t0 = std::min(t0, job.submit_time);
    te = std::max(te, job.submit_time);
    disk_bytes += job.input_bytes + job.output_bytes;
    network_bytes += job.shuffle_bytes;
  }
  if (!(te > t0)) throw DegenerateTrace("all jobs share one submission time");

  const double weighted = config.dn_ratio * disk_bytes + network_bytes;
  if (!(weighted > 0.0)) throw DegenerateTrace("trace carries no bytes");

  Calibration cal;
  cal.n = config.load * (te - t0) / weighted;
  cal.d = config.dn_ratio * cal.n;
  cal.t0 = t0;
  cal.te = te;
  return cal;
}

std::vector<SizedJob> size_jobs(std::span<const JobSpec> jobs, const Calibration& cal) {
  std::vector<SizedJob> sized;
  sized.reserve(jobs.size());
  for (const auto& job : jobs) {
    if (job.input_bytes == 0.0 && job.shuffle_bytes == 0.0 && job.output_bytes == 0.0) {
      throw ZeroSizeJob("job '" + job.label + "' has no bytes");
    }
    sized.push_back({job.submit_time, job_size(job, cal), job.label});
  }
  return sized;
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  SyntheticSpec spec;
  const auto colon = text.find(':');
  const auto kind = detail::trim(text.substr(0, colon));
  const auto params = colon == std::string_view::npos ? std::string_view{}
                                                      : text.substr(colon + 1);
  HeavyTail tail;
  UniformSize uniform;
  if (kind != "pareto" && kind != "uniform") {
    throw InvalidParams("unknown synthetic distribution '" + std::string(kind) + "'");
  }
  for (auto item : detail::split(params, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidParams("synthetic spec entry '" + std::string(item) + "' lacks '='");
    }
    const auto key = detail::trim(item.substr(0, eq));
    const auto value = detail::parse_double(detail::trim(item.substr(eq + 1)));
    if (!value) throw InvalidParams("bad value for '" + std::string(key) + "'");
    if (key == "n") {
      if (*value < 1 || *value != std::floor(*value)) throw InvalidParams("n must be a positive integer");
      spec.n_jobs = static_cast<std::size_t>(*value);
    } else if (key == "rate") {
      spec.arrival_rate = *value;
    } else if (key == "seed") {
      if (*value < 0 || *value != std::floor(*value)) throw InvalidParams("seed must be a non-negative integer");
      spec.seed = static_cast<std::uint64_t>(*value);
    } else if (key == "shape" && kind == "pareto") {
      tail.shape = *value;
    } else if (key == "scale" && kind == "pareto") {
      tail.scale = *value;
    } else if (key == "lo" && kind == "uniform") {
      uniform.lo = *value;
    } else if (key == "hi" && kind == "uniform") {
      uniform.hi = *value;
    } else {
      throw InvalidParams("unknown synthetic key '" + std::string(key) + "'");
    }
  }
  if (kind == "pareto") spec.sizes = tail;
  else spec.sizes = uniform;
  validate(spec);
  return spec;
}

std::vector<SizedJob> gen_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.arrival_rate);

  std::vector<SizedJob> jobs;
  jobs.reserve(spec.n_jobs);
  double t = 0.0;
  for (std::size_t i = 0; i < spec.n_jobs; ++i) {
    if (i > 0) t += gap(rng);
    const double size = draw_size(rng, spec.sizes);
    jobs.push_back({t, size, "syn" + std::to_string(i)});
  }
  return jobs;
}

std::vector<JobSpec> gen_synthetic_trace(const SyntheticSpec& spec) {
  constexpr double bytes_per_second = 1e6;
  const auto sized = gen_synthetic(spec);
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> shuffle_share(0.0, 0.5);

  std::vector<JobSpec> jobs;
  jobs.reserve(sized.size());
  for (const auto& s : sized) {
    const double total = s.true_size * bytes_per_second;
    const double f = shuffle_share(rng);
    JobSpec job;
    job.label = s.label;
    job.submit_time = s.submit_time;
    job.input_bytes = std::floor(total * (1.0 - f) * 0.6);
    job.output_bytes = std::floor(total * (1.0 - f) * 0.4);
    job.shuffle_bytes = std::floor(total * f);
    if (job.input_bytes + job.output_bytes + job.shuffle_bytes == 0.0) job.input_bytes = 1.0;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

void write_workload(std::ostream& out, std::span<const SizedJob> jobs) {
  out << "label\tsubmit_time\ttrue_size\n";
  for (const auto& job : jobs) {
    out << job.label << '\t' << detail::format_exact(job.submit_time) << '\t'
        << detail::format_exact(job.true_size) << '\n';
  }
}

std::vector<SizedJob> read_workload(std::istream& in) {
  std::vector<SizedJob> jobs;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (detail::trim(text).empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != "label\tsubmit_time\ttrue_size") {
        throw MalformedRow(line, "expected workload header");
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(text, '\t');
    if (fields.size() != 3) throw MalformedRow(line, "expected 3 fields");
    SizedJob job;
    job.label = std::string(fields[0]);
    job.submit_time = parse_field(fields, 1, line, "submit_time");
    job.true_size = parse_field(fields, 2, line, "true_size");
    if (job.true_size == 0.0) throw ZeroSizeJob("job '" + job.label + "' has zero size");
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::vector<SizedJob> load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open workload '" + path.string() + "'");
  return read_workload(in);
}

}  // namespace sizesched
