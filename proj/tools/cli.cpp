#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sizesched/error.hpp"
#include "sizesched/experiment.hpp"
#include "sizesched/schedulers.hpp"
#include "sizesched/trace.hpp"

namespace sizesched::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string trace;
  std::string synthetic;
  std::string workload;
  std::string columns;
  std::string time_unit = "seconds";
  std::vector<std::string> schedulers{kSchedulerNames.begin(), kSchedulerNames.end()};
  double sigma = 0.0;
  double load = 0.9;
  double dn = 4.0;
  int runs = 100;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::string out;
  std::string dump;
  std::string format = "swim";
  std::vector<double> sigma_grid = default_sigma_grid();
  std::vector<double> load_grid = default_load_grid();
  std::vector<double> dn_grid = default_dn_grid();
};

void add_source_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--trace", o.trace, "SWIM-style tab-separated trace");
  cmd.add_option("--synthetic", o.synthetic,
                 "Synthetic trace, e.g. pareto:n=5000,shape=1.5,scale=1,rate=1,seed=1");
  cmd.add_option("--columns", o.columns,
                 "Column map, e.g. label=0,submit=1,input=2,shuffle=3,output=4");
  cmd.add_option("--time-unit", o.time_unit, "Submit time unit: seconds|milliseconds");
}

void add_run_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--schedulers", o.schedulers, "Comma-separated scheduler names")
      ->delimiter(',');
  cmd.add_option("--sigma", o.sigma, "Log-normal error sigma");
  cmd.add_option("--load", o.load, "Target load l");
  cmd.add_option("--dn", o.dn, "Disk/network cost ratio d/n");
  cmd.add_option("--runs", o.runs, "Runs per grid point");
  cmd.add_option("--seed", o.seed, "Base seed");
  cmd.add_option("--jobs", o.jobs, "Parallel runs");
  cmd.add_option("--out", o.out, "Output CSV (stdout if omitted)");
}

std::vector<JobSpec> load_trace(const Options& o) {
  if (!o.trace.empty() && !o.synthetic.empty()) {
    throw InvalidConfig("--trace and --synthetic are mutually exclusive");
  }
  if (!o.synthetic.empty()) return gen_synthetic_trace(parse_synthetic_spec(o.synthetic));
  if (o.trace.empty()) throw InvalidConfig("one of --trace or --synthetic is required");
  SwimOptions swim;
  if (!o.columns.empty()) swim.columns = parse_column_map(o.columns);
  swim.time_unit = parse_time_unit(o.time_unit);
  return load_swim(o.trace, swim);
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig config;
  config.schedulers = o.schedulers;
  config.sigma_grid = o.sigma_grid;
  config.load_grid = o.load_grid;
  config.dn_grid = o.dn_grid;
  config.sigma = o.sigma;
  config.load = o.load;
  config.dn_ratio = o.dn;
  config.runs_per_point = o.runs;
  config.base_seed = o.seed;
  config.parallelism = o.jobs;
  validate(config);
  return config;
}

void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(out);
  } else {
    write_file_atomically(path, writer);
  }
}

int do_sweep(const Options& o, SweepAxis axis, std::ostream& out) {
  const auto config = experiment_config(o);
  const auto trace = load_trace(o);
  const auto records = run_sweep(trace, config, axis);
  emit(o.out, out, [&](std::ostream& s) { write_records_csv(s, records); });
  if (!o.out.empty()) {
    auto summary_path = fs::path(o.out).replace_extension(".summary.csv");
    write_file_atomically(summary_path,
                          [&](std::ostream& s) { write_point_summary_csv(s, records, axis); });
  }
  return kSuccess;
}

int do_simulate(const Options& o, std::ostream& out) {
  auto config = experiment_config(o);
  if (!o.dump.empty() && config.schedulers.size() != 1) {
    throw InvalidConfig("--dump needs exactly one scheduler");
  }

  std::vector<SizedJob> workload;
  double load = o.load;
  double dn = o.dn;
  if (!o.workload.empty()) {
    if (!o.trace.empty() || !o.synthetic.empty()) {
      throw InvalidConfig("--workload cannot be combined with --trace or --synthetic");
    }
    workload = sorted_by_submit(load_workload(o.workload));
    if (workload.empty()) throw InvalidWorkload("workload file has no jobs");
    load = 0.0;
    dn = 0.0;
  } else {
    const auto trace = load_trace(o);
    workload = sorted_by_submit(size_jobs(trace, calibrate(trace, {o.load, o.dn})));
  }

  std::vector<RunSummary> records;
  std::optional<RunResult> dumped;
  for (const auto& name : config.schedulers) {
    auto outcome = simulate_once(workload, name, o.sigma, o.seed, load, dn);
    records.push_back(outcome.summary);
    if (!o.dump.empty()) dumped = std::move(outcome.result);
  }
  emit(o.out, out, [&](std::ostream& s) { write_records_csv(s, records); });
  if (dumped) write_file_atomically(o.dump, [&](std::ostream& s) { write_job_dump(s, *dumped); });
  return kSuccess;
}

int do_gen_trace(const Options& o, std::ostream& out) {
  if (o.synthetic.empty()) throw InvalidConfig("gen-trace needs --synthetic");
  const auto spec = parse_synthetic_spec(o.synthetic);
  if (o.format == "swim") {
    const auto trace = gen_synthetic_trace(spec);
    emit(o.out, out, [&](std::ostream& s) { write_swim(s, trace); });
  } else if (o.format == "workload") {
    const auto trace = gen_synthetic_trace(spec);
    const auto sized = size_jobs(trace, calibrate(trace, {o.load, o.dn}));
    emit(o.out, out, [&](std::ostream& s) { write_workload(s, sized); });
  } else {
    throw InvalidConfig("unknown format '" + o.format + "'");
  }
  return kSuccess;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kBadConfig;
    case ErrorKind::input: return kInputError;
    case ErrorKind::simulation: return kSimulationError;
  }
  return kSimulationError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Fluid simulator for size-based scheduling with inexact job sizes", "sizesched"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run each scheduler once and print summaries");
  add_source_flags(*simulate, o);
  add_run_flags(*simulate, o);
  simulate->add_option("--workload", o.workload, "Pre-sized workload (label, submit_time, true_size)");
  simulate->add_option("--dump", o.dump, "Per-job CSV of the run (single scheduler)");

  auto* sweep_sigma_cmd = app.add_subcommand("sweep-sigma", "Mean sojourn versus sigma");
  auto* sweep_load_cmd = app.add_subcommand("sweep-load", "Mean sojourn versus load");
  auto* sweep_dn_cmd = app.add_subcommand("sweep-dn", "Mean sojourn versus d/n");
  for (auto* cmd : {sweep_sigma_cmd, sweep_load_cmd, sweep_dn_cmd}) {
    add_source_flags(*cmd, o);
    add_run_flags(*cmd, o);
  }
  sweep_sigma_cmd->add_option("--sigma-grid", o.sigma_grid, "Comma-separated sigma values")
      ->delimiter(',');
  sweep_load_cmd->add_option("--load-grid", o.load_grid, "Comma-separated load values")
      ->delimiter(',');
  sweep_dn_cmd->add_option("--dn-grid", o.dn_grid, "Comma-separated d/n values")->delimiter(',');

  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic trace");
  gen->add_option("--synthetic", o.synthetic, "Synthetic spec")->required();
  gen->add_option("--format", o.format, "swim (byte trace) or workload (sized jobs)");
  gen->add_option("--load", o.load, "Target load for --format workload");
  gen->add_option("--dn", o.dn, "d/n ratio for --format workload");
  gen->add_option("--out", o.out, "Output path (stdout if omitted)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kBadConfig;
  }

  try {
    if (simulate->parsed()) return do_simulate(o, out);
    if (sweep_sigma_cmd->parsed()) return do_sweep(o, SweepAxis::sigma, out);
    if (sweep_load_cmd->parsed()) return do_sweep(o, SweepAxis::load, out);
    if (sweep_dn_cmd->parsed()) return do_sweep(o, SweepAxis::dn, out);
    if (gen->parsed()) return do_gen_trace(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationError;
  }
  return kBadConfig;
}

}  // namespace sizesched::cli
