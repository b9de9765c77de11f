// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sizesched/engine.hpp"
#include "sizesched/errmodel.hpp"
#include "sizesched/experiment.hpp"
#include "sizesched/metrics.hpp"
#include "sizesched/schedulers.hpp"
#include "sizesched/trace.hpp"
#include "../workloads.hpp"

using namespace sizesched;
using sizesched::testing::random_workload;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %s (%.1fs)%s%s\n", v.pass ? "PASS" : "FAIL", name.c_str(), secs,
              v.detail.empty() ? "" : " -- ", v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RunResult run_named(std::span<const EstimatedJob> w, std::string_view name) {
  auto policy = make_scheduler(name);
  return run(w, *policy);
}

double mean_sojourn(const RunResult& r) {
  double s = 0.0;
  for (const auto& j : r.jobs) s += j.sojourn();
  return s / static_cast<double>(r.jobs.size());
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Verdict hand_traced_oracles() {
  Verdict v;
  const std::vector<EstimatedJob> two = {{0.0, 10.0, 10.0, "A"}, {2.0, 3.0, 3.0, "B"}};
  const std::vector<std::tuple<std::string, double, double>> expected = {
      {"FIFO", 10, 13}, {"PS", 13, 8}, {"SRPT", 13, 5}, {"FSP+FIFO", 13, 5}, {"FSP+PS", 13, 5}};
  for (const auto& [name, a, b] : expected) {
    const auto r = run_named(two, name);
    v.require(near(*r.jobs[0].completed_at, a, 1e-9) && near(*r.jobs[1].completed_at, b, 1e-9),
              name + fmt(" gave (%.12g, %.12g)", *r.jobs[0].completed_at, *r.jobs[1].completed_at));
  }
  const std::vector<EstimatedJob> las = {{0.0, 3.0, 3.0, "A"}, {2.0, 3.0, 3.0, "B"}};
  const auto r = run_named(las, "LAS");
  v.require(near(*r.jobs[0].completed_at, 6, 1e-9) && near(*r.jobs[1].completed_at, 6, 1e-9),
            fmt("LAS gave (%.12g, %.12g)", *r.jobs[0].completed_at, *r.jobs[1].completed_at));
  return v;
}

Verdict engine_oracle_equivalence() {
  Verdict v;
  double worst = 0.0;  // in units of dt
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto sized = random_workload(0xE0 + seed, 50);
    for (double sigma : {0.0, 0.5}) {
      const auto w = estimate(sized, {sigma, seed});
      double min_size = 1e300;
      for (const auto& j : w) min_size = std::min(min_size, j.true_size);
      const double dt = 1e-3 * min_size;
      for (auto name : kSchedulerNames) {
        auto p1 = make_scheduler(name);
        auto p2 = make_scheduler(name);
        const auto a = run(w, *p1);
        const auto b = run_discretized(w, *p2, dt);
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double gap = std::abs(*a.jobs[i].completed_at - *b.jobs[i].completed_at);
          worst = std::max(worst, gap / dt);
          v.require(gap <= 2 * dt, std::string(name) + fmt(" seed %g sigma %g gap %g dt", double(seed),
                                                           sigma, gap / dt));
        }
      }
    }
  }
  if (v.pass) v.detail = fmt("worst gap %.3f dt", worst);
  return v;
}

Verdict srpt_minimality() {
  Verdict v;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto w = exact_estimates(random_workload(0x5000 + seed, 30));
    const double srpt = mean_sojourn(run_named(w, "SRPT"));
    for (auto name : kSchedulerNames) {
      const double other = mean_sojourn(run_named(w, name));
      v.require(srpt <= other + 1e-9,
                std::string(name) + fmt(" beat SRPT on seed %g: %.12g < %.12g", double(seed), other, srpt));
    }
  }
  return v;
}

Verdict fsp_fairness() {
  Verdict v;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto w = exact_estimates(random_workload(0x5000 + seed, 30));
    const auto ps = run_named(w, "PS");
    for (auto name : {"FSP+FIFO", "FSP+PS"}) {
      const auto fsp = run_named(w, name);
      for (std::size_t i = 0; i < w.size(); ++i) {
        v.require(*fsp.jobs[i].completed_at <= *ps.jobs[i].completed_at + 1e-9,
                  std::string(name) + fmt(" job later than PS on seed %g (%.12g > %.12g)", double(seed),
                                          *fsp.jobs[i].completed_at, *ps.jobs[i].completed_at));
        v.require(!fsp.jobs[i].became_late_at,
                  std::string(name) + fmt(" late job on seed %g", double(seed)));
      }
    }
  }
  return v;
}

Verdict fsp_variant_equivalence() {
  Verdict v;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto w = exact_estimates(random_workload(0x5000 + seed, 30));
    const auto a = run_named(w, "FSP+FIFO");
    const auto b = run_named(w, "FSP+PS");
    for (std::size_t i = 0; i < w.size(); ++i) {
      v.require(near(*a.jobs[i].completed_at, *b.jobs[i].completed_at, 1e-9),
                fmt("seed %g job %g differs", double(seed), double(i)));
    }
  }
  return v;
}

Verdict late_policy_divergence() {
  Verdict v;
  const std::vector<EstimatedJob> w = {{0.0, 10.0, 1.0, "A"}, {0.0, 10.0, 1.0, "B"}};
  const auto fifo = run_named(w, "FSP+FIFO");
  const auto ps = run_named(w, "FSP+PS");
  v.require(near(*fifo.jobs[0].completed_at, 10, 1e-9) && near(*fifo.jobs[1].completed_at, 20, 1e-9),
            fmt("FSP+FIFO gave (%.12g, %.12g)", *fifo.jobs[0].completed_at, *fifo.jobs[1].completed_at));
  v.require(near(*ps.jobs[0].completed_at, 18, 1e-9) && near(*ps.jobs[1].completed_at, 20, 1e-9),
            fmt("FSP+PS gave (%.12g, %.12g)", *ps.jobs[0].completed_at, *ps.jobs[1].completed_at));
  return v;
}

Verdict error_model_statistics() {
  Verdict v;
  const std::size_t n = 100000;
  std::vector<SizedJob> jobs(n, SizedJob{0.0, 1.0, "x"});
  const auto est = estimate(jobs, {0.5, 42});
  std::vector<double> logs, ratios;
  double mean = 0.0;
  for (const auto& e : est) {
    ratios.push_back(e.est_size / e.true_size);
    logs.push_back(std::log(ratios.back()));
    mean += logs.back();
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double l : logs) var += (l - mean) * (l - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  std::sort(ratios.begin(), ratios.end());
  const double median = 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  v.require(sd >= 0.49 && sd <= 0.51, fmt("std(ln ratio) = %.5f", sd));
  v.require(median >= 0.97 && median <= 1.03, fmt("median ratio = %.5f", median));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-6, 1e6);
  std::vector<SizedJob> varied(1000);
  for (auto& j : varied) j.true_size = u(rng);
  const auto same = estimate(varied, {0.0, 7});
  for (std::size_t i = 0; i < varied.size(); ++i) {
    v.require(same[i].est_size == varied[i].true_size, "sigma 0 changed a size");
  }
  if (v.pass) v.detail = fmt("std %.5f, median %.5f", sd, median);
  return v;
}

Verdict calibration() {
  Verdict v;
  const std::vector<JobSpec> fixture = {{0.0, 1, 1, 1, "a"}, {100.0, 1, 1, 1, "b"}};
  const auto cal = calibrate(fixture, {0.9, 4.0});
  v.require(near(cal.d, 20.0, 1e-12) && near(cal.n, 5.0, 1e-12),
            fmt("fixture gave d=%.15g n=%.15g", cal.d, cal.n));

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(2, 500);
  std::uniform_real_distribution<double> bytes(0.0, 1e10), when(0.0, 1e6), load(0.05, 3.0),
      ratio(0.25, 32.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<JobSpec> jobs(static_cast<std::size_t>(count(rng)));
    for (auto& j : jobs) {
      j = {when(rng), std::floor(bytes(rng)), std::floor(bytes(rng)), std::floor(bytes(rng)), "j"};
    }
    const CalibrationConfig config{load(rng), ratio(rng)};
    const auto c = calibrate(jobs, config);
    double total = 0.0;
    for (const auto& s : size_jobs(jobs, c)) total += s.true_size;
    const double achieved = total / (c.te - c.t0);
    v.require(std::abs(achieved - config.load) <= 1e-9 * config.load,
              fmt("load %.15g vs %.15g", achieved, config.load));
    v.require(std::abs(c.d / c.n - config.dn_ratio) <= 1e-12 * config.dn_ratio,
              fmt("d/n %.17g vs %.17g", c.d / c.n, config.dn_ratio));
  }
  return v;
}

Verdict qualitative_reproduction() {
  Verdict v;
  const auto trace = gen_synthetic_trace({5000, 1.0, HeavyTail{1.5, 1.0}, 2013});
  ExperimentConfig config;
  config.schedulers = {"FIFO", "PS", "FSP+FIFO", "FSP+PS"};
  config.sigma_grid = {0.0, 0.5, 1.0};
  config.load = 0.9;
  config.dn_ratio = 4.0;
  config.runs_per_point = 100;
  config.base_seed = 42;
  config.parallelism = std::max(1u, std::thread::hardware_concurrency());
  const auto records = sweep_sigma(trace, config);

  auto values = [&](std::string_view name, double sigma) {
    std::vector<double> out;
    for (const auto& r : records) {
      if (r.scheduler == name && r.sigma == sigma) out.push_back(r.mean_sojourn);
    }
    return out;
  };
  auto median = [](std::vector<double> xs) { return box_stats(xs).median; };
  auto maximum = [](const std::vector<double>& xs) { return *std::max_element(xs.begin(), xs.end()); };

  const double fifo = values("FIFO", 0.0).at(0);
  const double ps = values("PS", 0.0).at(0);
  const auto fsp_ps_05 = values("FSP+PS", 0.5);
  const auto fsp_ps_10 = values("FSP+PS", 1.0);
  const auto fsp_fifo_10 = values("FSP+FIFO", 1.0);
  v.require(fsp_ps_05.size() == 100 && fsp_ps_10.size() == 100 && fsp_fifo_10.size() == 100,
            "unexpected run counts");

  const bool a = fifo >= 10 * ps;
  const bool b = median(fsp_ps_05) < ps;
  const bool c = median(fsp_ps_10) < ps;
  const bool d = maximum(fsp_fifo_10) >= maximum(fsp_ps_10);
  auto mark = [](bool ok) { return ok ? "ok" : "FAILED"; };
  std::ostringstream detail;
  detail << "(a) " << mark(a) << " FIFO " << format_sig9(fifo) << " / PS " << format_sig9(ps) << " = "
         << format_sig9(fifo / ps) << "x; (b) " << mark(b) << " FSP+PS median " << format_sig9(median(fsp_ps_05))
         << "; (c) " << mark(c) << " FSP+PS median " << format_sig9(median(fsp_ps_10)) << "; (d) " << mark(d)
         << " max FSP+FIFO " << format_sig9(maximum(fsp_fifo_10)) << " vs FSP+PS "
         << format_sig9(maximum(fsp_ps_10));
  v.require(a && b && c && d, "");
  v.detail = detail.str();
  return v;
}

Verdict determinism() {
  Verdict v;
  const auto trace = gen_synthetic_trace({400, 1.0, HeavyTail{1.5, 1.0}, 77});
  ExperimentConfig config;
  config.runs_per_point = 10;
  config.sigma_grid = {0.0, 0.5, 1.0};
  config.load_grid = {0.5, 1.0, 1.5};
  config.dn_grid = {1.0, 4.0};
  config.sigma = 0.5;
  for (auto axis : {SweepAxis::sigma, SweepAxis::load, SweepAxis::dn}) {
    std::vector<std::string> outputs;
    for (unsigned jobs : {1u, 1u, 4u}) {
      config.parallelism = jobs;
      std::ostringstream out;
      write_records_csv(out, run_sweep(trace, config, axis));
      outputs.push_back(out.str());
    }
    v.require(outputs[0] == outputs[1], "sequential re-run differs");
    v.require(outputs[0] == outputs[2], "parallel run differs from sequential");
  }
  return v;
}

}  // namespace

int main() {
  criterion("hand-traced policy oracles", hand_traced_oracles);
  criterion("engine/oracle equivalence (200 workloads, 2*dt)", engine_oracle_equivalence);
  criterion("SRPT minimality, sigma=0 (500 workloads)", srpt_minimality);
  criterion("FSP per-job fairness vs PS, sigma=0 (500 workloads)", fsp_fairness);
  criterion("FSP+FIFO == FSP+PS, sigma=0 (500 workloads)", fsp_variant_equivalence);
  criterion("late-policy divergence", late_policy_divergence);
  criterion("error model statistics", error_model_statistics);
  criterion("calibration", calibration);
  criterion("qualitative reproduction (5000 jobs, 100 runs)", qualitative_reproduction);
  criterion("sweep determinism incl. parallelism", determinism);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
