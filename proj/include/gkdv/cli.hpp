#pragma once

// The solve / verify / sweep commands behind the gkdv executable.

#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gkdv/io.hpp"
#include "gkdv/solver.hpp"
#include "gkdv/verifier.hpp"

namespace gkdv {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct SolveOutcome {
  PicardTrace trace;
  double reference_rel_l2 = std::numeric_limits<double>::quiet_NaN();
};

inline double relative_l2(const SpectralField& a, const SpectralField& b) {
  const SpectralField x = coherent(a), y = coherent(b);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.phys.size(); ++i) {
    num += (x.phys[i] - y.phys[i]) * (x.phys[i] - y.phys[i]);
    den += y.phys[i] * y.phys[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

inline SolveOutcome run_solve(const RunConfig& cfg, RunDirectory& dir, std::ostream& log) {
  const IvpProblem prob = make_problem(cfg);
  for (const auto& w : prob.warnings()) log << "warning: " << w << "\n";
  PicardOptions mesh;
  mesh.panels = cfg.solve.panels;
  mesh.grading = cfg.solve.grading;

  std::optional<PicardResult> result;
  if (cfg.solve.t_final > 0.0) {
    const DuhamelMap free_map(prob, cfg.solve.t_final, mesh);
    const double free_norm = free_map.norm(free_map.free());
    const double r = cfg.solve.radius > 0.0 ? cfg.solve.radius : 10.0 * free_norm;
    const double tol = cfg.solve.relative_tolerance * free_norm;
    result = picard_iterate(prob, r, cfg.solve.t_final, cfg.solve.max_iter, tol, mesh);
  } else {
    SolveOptions opts;
    opts.mesh = mesh;
    opts.max_iter = cfg.solve.max_iter;
    opts.relative_tolerance = cfg.solve.relative_tolerance;
    result = solve(prob, opts);
  }
  const auto& sol = result->solution;
  const auto& trace = result->trace;
  log << "r = " << trace.r << ", T = " << trace.t_final << ", c = " << trace.c_calibrated
      << ", iterations = " << trace.iterates.size() << ", converged = " << std::boolalpha
      << trace.converged << "\n";

  dir.write_json("reports/picard_trace.json", to_json(trace));
  const NormReport norms = sol.map().norm_report(sol.stored());
  dir.write_json("reports/norms.json", to_json(norms));
  dir.write("data/norms.csv", norm_report_csv(norms));
  for (std::size_t i = 0; i < cfg.solve.snapshot_fractions.size(); ++i) {
    const double t = cfg.solve.snapshot_fractions[i] * trace.t_final;
    dir.write("data/trajectory_" + std::to_string(i) + ".csv", field_csv(sol.at(t)));
  }

  SolveOutcome out{trace};
  if (cfg.solve.reference_steps > 0) {
    const auto ref = reference_integrate(prob, trace.t_final, cfg.solve.reference_steps);
    out.reference_rel_l2 = relative_l2(sol.at(trace.t_final), ref.back());
    log << "relative L2 difference to the reference integrator at T: " << out.reference_rel_l2 << "\n";
    dir.write_json("reports/cross_check.json",
                   {{"t_final", trace.t_final},
                    {"reference_steps", cfg.solve.reference_steps},
                    {"relative_l2", number_or_null(out.reference_rel_l2)}});
  }
  return out;
}

/// Hausdorff-Young test fields: a Gaussian, a sech^2 profile and a seeded sum
/// of Gaussian bumps.
inline std::vector<std::function<double(double)>> hausdorff_young_fields(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-20.0, 20.0), amp(-1.0, 1.0), wid(0.5, 3.0);
  std::vector<std::array<double, 3>> bumps(6);
  for (auto& b : bumps) b = {pos(rng), amp(rng), wid(rng)};
  return {[](double x) { return std::exp(-x * x); },
          [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); },
          [bumps](double x) {
            double v = 0.0;
            for (const auto& [c, a, w] : bumps) v += a * std::exp(-((x - c) / w) * ((x - c) / w));
            return v;
          }};
}

inline std::vector<EstimateReport> run_verify(const RunConfig& cfg, const std::string& suite,
                                              std::ostream& log) {
  if (!cfg.seed) throw ConfigError("seed is required for verify (rough probes are random)");
  const std::uint64_t seed = *cfg.seed;
  const auto sym = make_symbol(cfg);
  const double k = cfg.problem.k, s = cfg.problem.s;
  const bool all = suite == "all";
  std::vector<EstimateReport> reports;

  if (all || suite == "linear") {
    for (double theta : cfg.verify.thetas) {
      reports.push_back(verify_multiplier_decay(sym, theta, cfg.verify.tau_range[0], cfg.verify.tau_range[1]));
    }
    WeightedLinearOptions wl;
    wl.n_draws = cfg.verify.n_draws;
    wl.seed = seed;
    wl.t_lo = cfg.verify.linear_t_range[0];
    wl.t_hi = cfg.verify.linear_t_range[1];
    wl.grid = cfg.grid;
    reports.push_back(verify_weighted_linear(sym, k, s, wl));
    reports.push_back(verify_threshold_conditions(sym));
    reports.push_back(verify_hausdorff_young(hausdorff_young_fields(seed), cfg.verify.hausdorff_young_p1, cfg.grid));
  }

  IvpProblem prob = make_problem(cfg);
  const auto rough = [&](const GridSpec& g) {
    return rough_data(g, s, seed, cfg.data.amplitude, cfg.data.eps);
  };
  if (all || suite == "nonlinear") {
    if (!contraction_admissible(k, sym.p)) {
      log << "p = " << sym.p << ", k = " << k << " is outside the contraction regime; "
          << "nonlinear checks skipped\n";
    }
    NonlinearEstimateOptions ne;
    ne.t_lo = cfg.verify.nonlinear_t_range[0];
    ne.t_hi = cfg.verify.nonlinear_t_range[1];
    reports.push_back(verify_nonlinear_estimate(prob.with_data(rough(cfg.grid)), ne));
    ContractionOptions co;
    co.t_lo = cfg.verify.contraction_t_range[0];
    co.t_hi = cfg.verify.contraction_t_range[1];
    co.n_pairs = cfg.verify.contraction_pairs;
    co.seed = seed;
    reports.push_back(verify_contraction_scaling(prob, cfg.verify.contraction_radius, co));
  }
  if (all || suite == "smoothing") {
    if (contraction_admissible(k, sym.p)) {
      SmoothingOptions so;
      so.t_final = cfg.verify.smoothing_t_final;
      reports.push_back(verify_smoothing(prob, rough, so));
    } else {
      reports.push_back(detail::inadmissible_report("smoothing", k, sym.p));
    }
  }
  return reports;
}

inline bool all_passed(const std::vector<EstimateReport>& reports) {
  for (const auto& r : reports) {
    if (r.verdict == Verdict::fail) return false;
  }
  return true;
}

inline void write_reports(RunDirectory& dir, const std::vector<EstimateReport>& reports) {
  std::map<std::string, int> seen;
  for (const auto& r : reports) {
    const int n = seen[r.estimate_id]++;
    dir.write_json("reports/" + r.estimate_id + (n ? "_" + std::to_string(n) : "") + ".json", to_json(r));
  }
  dir.write("reports/summary.txt", report_table(reports));
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& log,
                     const std::filesystem::path& root_override = {}) {
  RunDirectory dir(root_override.empty() ? output_root(cfg) : root_override, cfg);
  const auto out = run_solve(cfg, dir, log);
  dir.finish();
  log << "wrote " << dir.path().string() << "\n";
  return out.trace.converged ? kExitOk : kExitFailure;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& log,
                      const std::filesystem::path& root_override = {}) {
  RunDirectory dir(root_override.empty() ? output_root(cfg) : root_override, cfg);
  const auto reports = run_verify(cfg, suite, log);
  write_reports(dir, reports);
  dir.finish();
  log << report_table(reports) << "wrote " << dir.path().string() << "\n";
  return all_passed(reports) ? kExitOk : kExitFailure;
}

struct SweepJob {
  double k, p, s;
  RunConfig cfg;
  std::string rows;
  std::string log;
  bool ok = false;
};

/// Cartesian sweep over the listed k, p, s values (missing lists fall back to
/// the base config).  Job directories live under <run>/jobs/.
inline int cmd_sweep(const RunConfig& cfg, std::size_t n_jobs, std::ostream& log,
                     const std::filesystem::path& root_override = {}) {
  if (n_jobs < 1) throw ConfigError("--jobs must be at least 1");
  RunDirectory dir(root_override.empty() ? output_root(cfg) : root_override, cfg);
  const auto ks = cfg.sweep.k.empty() ? std::vector{cfg.problem.k} : cfg.sweep.k;
  const auto ps = cfg.sweep.p.empty() ? std::vector{cfg.symbol.p} : cfg.sweep.p;
  const auto ss = cfg.sweep.s.empty() ? std::vector{cfg.problem.s} : cfg.sweep.s;
  std::vector<SweepJob> jobs;
  for (double k : ks) {
    for (double p : ps) {
      for (double s : ss) {
        RunConfig c = cfg;
        c.problem.k = k;
        c.symbol.p = p;
        c.problem.s = s;
        c.sweep = {};
        c.run_id = "k" + format_double(k) + "_p" + format_double(p) + "_s" + format_double(s);
        jobs.push_back({k, p, s, std::move(c), {}, {}, false});
      }
    }
  }
  const bool verify = cfg.sweep.command == "verify";
  const std::filesystem::path job_root = dir.path() / "jobs";
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      auto& job = jobs[i];
      std::ostringstream out;
      const std::string key = format_double(job.k) + "," + format_double(job.p) + "," + format_double(job.s);
      try {
        RunDirectory jd(job_root, job.cfg);
        if (verify) {
          const auto reports = run_verify(job.cfg, job.cfg.verify.suite, out);
          write_reports(jd, reports);
          for (const auto& r : reports) {
            job.rows += key + "," + r.estimate_id + "," + format_double(r.theoretical_exponent) + "," +
                        format_double(r.fitted_exponent) + "," + to_string(r.verdict) + "\n";
          }
          job.ok = all_passed(reports);
        } else {
          const auto o = run_solve(job.cfg, jd, out);
          job.rows += key + "," + format_double(o.trace.r) + "," + format_double(o.trace.t_final) + "," +
                      std::to_string(o.trace.iterates.size()) + "," +
                      (o.trace.converged ? "true" : "false") + "\n";
          job.ok = o.trace.converged;
        }
        jd.finish();
      } catch (const std::exception& e) {
        out << "job " << key << " failed: " << e.what() << "\n";
        job.rows += key + (verify ? ",error,nan,nan,error\n" : ",nan,nan,0,error\n");
        job.ok = false;
      }
      job.log = out.str();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(n_jobs, jobs.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv = verify ? "k,p,s,estimate_id,theoretical_exponent,fitted_exponent,verdict\n"
                           : "k,p,s,r,t_final,iterations,converged\n";
  bool ok = true;
  for (const auto& job : jobs) {
    csv += job.rows;
    ok = ok && job.ok;
    log << job.log;
  }
  dir.write("data/sweep.csv", csv);
  dir.finish();
  log << "wrote " << dir.path().string() << "\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace gkdv
