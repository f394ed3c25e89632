#pragma once

// Run configuration (strict JSON), report serialization, CSV output and run
// manifests with SHA-256 checksums.

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gkdv/errors.hpp"
#include "gkdv/norms.hpp"
#include "gkdv/solver.hpp"
#include "gkdv/spectral.hpp"
#include "gkdv/symbols.hpp"
#include "gkdv/verifier.hpp"

namespace gkdv {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

struct SymbolConfig {
  std::string name = "kdv-ks";
  double eta = 1.0;
  double p = 2.0;  ///< pure-power only
  bool operator==(const SymbolConfig&) const = default;
};

struct ProblemConfig {
  double k = 1.0;
  double s = 0.0;
  NonlinearityMode mode = NonlinearityMode::conservative;
  double nonlinear_coeff = 1.0;
  bool operator==(const ProblemConfig&) const = default;
};

enum class DataKind { zero, gaussian, rough };

struct DataConfig {
  DataKind kind = DataKind::gaussian;
  double amplitude = 0.05;
  double width = 2.0;
  double center = 0.0;
  double sigma = 0.0;
  double eps = 0.01;
  bool operator==(const DataConfig&) const = default;
};

struct SolveConfig {
  double t_final = 0.0;  ///< 0: calibrate c and select (r, T)
  double radius = 0.0;   ///< with t_final > 0; 0 means 10 ||V(.) v0||_X
  std::size_t max_iter = 100;
  double relative_tolerance = 1e-11;
  std::size_t panels = 16;
  double grading = 2.0;
  std::vector<double> snapshot_fractions{0.0, 0.5, 1.0};  ///< of T
  std::size_t reference_steps = 0;  ///< 0: no reference cross-check
  bool operator==(const SolveConfig&) const = default;
};

struct VerifyConfig {
  std::string suite = "all";
  std::vector<double> thetas{0.5, 1.0, 2.0};
  std::array<double, 2> tau_range{1e-4, 1e-2};
  std::array<double, 2> linear_t_range{1e-4, 1.0};
  std::size_t n_draws = 10;
  std::array<double, 2> nonlinear_t_range{1.0 / 64.0, 1.0};
  std::array<double, 2> contraction_t_range{1.0 / 4096.0, 1.0 / 64.0};
  double contraction_radius = 1.0;
  std::size_t contraction_pairs = 3;
  double smoothing_t_final = 0.0;
  double hausdorff_young_p1 = 4.0;
  bool operator==(const VerifyConfig&) const = default;
};

struct SweepConfig {
  std::string command = "verify";
  std::vector<double> k;
  std::vector<double> p;
  std::vector<double> s;
  bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
  std::string run_id;  ///< empty: derived from the config hash
  std::optional<std::uint64_t> seed;
  std::string output_dir = "gkdv-out";
  SymbolConfig symbol;
  GridSpec grid;
  ProblemConfig problem;
  DataConfig data;
  SolveConfig solve;
  VerifyConfig verify;
  SweepConfig sweep;
  bool operator==(const RunConfig&) const = default;

  bool randomized() const { return data.kind == DataKind::rough; }
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!names.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::zero: return "zero";
    case DataKind::gaussian: return "gaussian";
    case DataKind::rough: return "rough";
  }
  return "?";
}

inline json to_json(const RunConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["output_dir"] = c.output_dir;
  j["symbol"] = {{"name", c.symbol.name}, {"eta", c.symbol.eta}, {"p", c.symbol.p}};
  j["grid"] = {{"length", c.grid.length},
               {"n_points", c.grid.n_points},
               {"dealias_fraction", c.grid.dealias_fraction}};
  j["problem"] = {{"k", c.problem.k},
                  {"s", c.problem.s},
                  {"mode", to_string(c.problem.mode)},
                  {"nonlinear_coeff", c.problem.nonlinear_coeff}};
  j["data"] = {{"kind", to_string(c.data.kind)}, {"amplitude", c.data.amplitude},
               {"width", c.data.width},          {"center", c.data.center},
               {"sigma", c.data.sigma},          {"eps", c.data.eps}};
  j["solve"] = {{"t_final", c.solve.t_final},
                {"radius", c.solve.radius},
                {"max_iter", c.solve.max_iter},
                {"relative_tolerance", c.solve.relative_tolerance},
                {"panels", c.solve.panels},
                {"grading", c.solve.grading},
                {"snapshot_fractions", c.solve.snapshot_fractions},
                {"reference_steps", c.solve.reference_steps}};
  j["verify"] = {{"suite", c.verify.suite},
                 {"thetas", c.verify.thetas},
                 {"tau_range", c.verify.tau_range},
                 {"linear_t_range", c.verify.linear_t_range},
                 {"n_draws", c.verify.n_draws},
                 {"nonlinear_t_range", c.verify.nonlinear_t_range},
                 {"contraction_t_range", c.verify.contraction_t_range},
                 {"contraction_radius", c.verify.contraction_radius},
                 {"contraction_pairs", c.verify.contraction_pairs},
                 {"smoothing_t_final", c.verify.smoothing_t_final},
                 {"hausdorff_young_p1", c.verify.hausdorff_young_p1}};
  j["sweep"] = {{"command", c.sweep.command}, {"k", c.sweep.k}, {"p", c.sweep.p}, {"s", c.sweep.s}};
  return j;
}

inline void validate(const RunConfig& c) {
  builtin_symbol(c.symbol.name, c.symbol.eta, c.symbol.p);
  c.grid.validate();
  if (!(c.problem.k > 0.0)) throw ConfigError("problem.k must be positive");
  if (c.randomized() && !c.seed) throw ConfigError("seed is required for rough (random) data");
  if (!(c.data.width > 0.0)) throw ConfigError("data.width must be positive");
  if (c.solve.t_final < 0.0 || c.solve.t_final > 1.0) throw ConfigError("solve.t_final must lie in [0, 1]");
  for (double f : c.solve.snapshot_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("snapshot fractions must lie in [0, 1]");
  }
  static const std::set<std::string> suites{"all", "linear", "nonlinear", "smoothing"};
  if (!suites.count(c.verify.suite)) throw ConfigError("verify.suite must be all|linear|nonlinear|smoothing");
  if (c.sweep.command != "verify" && c.sweep.command != "solve") {
    throw ConfigError("sweep.command must be verify or solve");
  }
  if (!c.sweep.p.empty() && c.symbol.name != "pure-power") {
    throw ConfigError("sweep.p is only meaningful for the pure-power symbol");
  }
}

inline RunConfig config_from_json(const json& j) {
  using detail::read;
  detail::reject_unknown(j,
                         {"run_id", "seed", "output_dir", "symbol", "grid", "problem", "data",
                          "solve", "verify", "sweep"},
                         "config");
  RunConfig c;
  read(j, "run_id", c.run_id, "config");
  if (j.contains("seed") && !j.at("seed").is_null()) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) throw ConfigError("config.seed must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  read(j, "output_dir", c.output_dir, "config");
  if (j.contains("symbol")) {
    const auto& s = j.at("symbol");
    detail::reject_unknown(s, {"name", "eta", "p"}, "symbol");
    read(s, "name", c.symbol.name, "symbol");
    read(s, "eta", c.symbol.eta, "symbol");
    read(s, "p", c.symbol.p, "symbol");
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::reject_unknown(g, {"length", "n_points", "dealias_fraction"}, "grid");
    read(g, "length", c.grid.length, "grid");
    read(g, "n_points", c.grid.n_points, "grid");
    read(g, "dealias_fraction", c.grid.dealias_fraction, "grid");
  }
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    detail::reject_unknown(p, {"k", "s", "mode", "nonlinear_coeff"}, "problem");
    read(p, "k", c.problem.k, "problem");
    read(p, "s", c.problem.s, "problem");
    read(p, "nonlinear_coeff", c.problem.nonlinear_coeff, "problem");
    std::string mode = to_string(c.problem.mode);
    read(p, "mode", mode, "problem");
    if (mode == "conservative") {
      c.problem.mode = NonlinearityMode::conservative;
    } else if (mode == "gradient") {
      c.problem.mode = NonlinearityMode::gradient;
    } else {
      throw ConfigError("problem.mode must be conservative or gradient");
    }
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    detail::reject_unknown(d, {"kind", "amplitude", "width", "center", "sigma", "eps"}, "data");
    std::string kind = to_string(c.data.kind);
    read(d, "kind", kind, "data");
    if (kind == "zero") {
      c.data.kind = DataKind::zero;
    } else if (kind == "gaussian") {
      c.data.kind = DataKind::gaussian;
    } else if (kind == "rough") {
      c.data.kind = DataKind::rough;
    } else {
      throw ConfigError("data.kind must be zero, gaussian or rough");
    }
    read(d, "amplitude", c.data.amplitude, "data");
    read(d, "width", c.data.width, "data");
    read(d, "center", c.data.center, "data");
    read(d, "sigma", c.data.sigma, "data");
    read(d, "eps", c.data.eps, "data");
  }
  if (j.contains("solve")) {
    const auto& s = j.at("solve");
    detail::reject_unknown(s,
                           {"t_final", "radius", "max_iter", "relative_tolerance", "panels",
                            "grading", "snapshot_fractions", "reference_steps"},
                           "solve");
    read(s, "t_final", c.solve.t_final, "solve");
    read(s, "radius", c.solve.radius, "solve");
    read(s, "max_iter", c.solve.max_iter, "solve");
    read(s, "relative_tolerance", c.solve.relative_tolerance, "solve");
    read(s, "panels", c.solve.panels, "solve");
    read(s, "grading", c.solve.grading, "solve");
    read(s, "snapshot_fractions", c.solve.snapshot_fractions, "solve");
    read(s, "reference_steps", c.solve.reference_steps, "solve");
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    detail::reject_unknown(v,
                           {"suite", "thetas", "tau_range", "linear_t_range", "n_draws",
                            "nonlinear_t_range", "contraction_t_range", "contraction_radius",
                            "contraction_pairs", "smoothing_t_final", "hausdorff_young_p1"},
                           "verify");
    read(v, "suite", c.verify.suite, "verify");
    read(v, "thetas", c.verify.thetas, "verify");
    read(v, "tau_range", c.verify.tau_range, "verify");
    read(v, "linear_t_range", c.verify.linear_t_range, "verify");
    read(v, "n_draws", c.verify.n_draws, "verify");
    read(v, "nonlinear_t_range", c.verify.nonlinear_t_range, "verify");
    read(v, "contraction_t_range", c.verify.contraction_t_range, "verify");
    read(v, "contraction_radius", c.verify.contraction_radius, "verify");
    read(v, "contraction_pairs", c.verify.contraction_pairs, "verify");
    read(v, "smoothing_t_final", c.verify.smoothing_t_final, "verify");
    read(v, "hausdorff_young_p1", c.verify.hausdorff_young_p1, "verify");
  }
  if (j.contains("sweep")) {
    const auto& w = j.at("sweep");
    detail::reject_unknown(w, {"command", "k", "p", "s"}, "sweep");
    read(w, "command", c.sweep.command, "sweep");
    read(w, "k", c.sweep.k, "sweep");
    read(w, "p", c.sweep.p, "sweep");
    read(w, "s", c.sweep.s, "sweep");
  }
  try {
    validate(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return out.str();
}

inline std::string config_hash(const RunConfig& c) { return sha256_hex(to_json(c).dump()); }

inline std::string run_id(const RunConfig& c) {
  return c.run_id.empty() ? "run-" + config_hash(c).substr(0, 12) : c.run_id;
}

/// $GKDV_OUT when set, the config's output_dir otherwise.
inline std::filesystem::path output_root(const RunConfig& c) {
  if (const char* env = std::getenv("GKDV_OUT"); env && *env) return env;
  return c.output_dir;
}

inline DissipativeSymbol make_symbol(const RunConfig& c) {
  return builtin_symbol(c.symbol.name, c.symbol.eta, c.symbol.p);
}

inline SpectralField make_data(const RunConfig& c, const GridSpec& grid) {
  switch (c.data.kind) {
    case DataKind::zero: return zero_field(grid);
    case DataKind::gaussian: return gaussian_data(grid, c.data.amplitude, c.data.width, c.data.center);
    case DataKind::rough:
      return rough_data(grid, c.data.sigma, c.seed.value_or(0), c.data.amplitude, c.data.eps);
  }
  throw ConfigError("unknown data kind");
}

inline IvpProblem make_problem(const RunConfig& c) {
  return {make_symbol(c),      c.grid,          c.problem.k,
          c.problem.mode,      c.problem.s,     make_data(c, c.grid),
          c.problem.nonlinear_coeff};
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const EstimateReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = number_or_null(v);
  return {{"estimate_id", r.estimate_id},
          {"theoretical_exponent", number_or_null(r.theoretical_exponent)},
          {"fitted_exponent", number_or_null(r.fitted_exponent)},
          {"fit_window", {number_or_null(r.fit_window.first), number_or_null(r.fit_window.second)}},
          {"residual", number_or_null(r.residual)},
          {"empirical_constant", number_or_null(r.empirical_constant)},
          {"verdict", to_string(r.verdict)},
          {"tolerance", number_or_null(r.tolerance)},
          {"criterion", r.criterion},
          {"details", details},
          {"note", r.note}};
}

inline json to_json(const PicardTrace& t) {
  json its = json::array();
  for (const auto& it : t.iterates) {
    its.push_back({{"index", it.index},
                   {"norm", number_or_null(it.norm)},
                   {"increment", number_or_null(it.increment)},
                   {"ratio", number_or_null(it.ratio)}});
  }
  return {{"r", t.r},
          {"t_final", t.t_final},
          {"c_calibrated", t.c_calibrated},
          {"converged", t.converged},
          {"iterates", its}};
}

inline json to_json(const NormReport& r) {
  json comps = json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"t", c.time}, {"component", c.name}, {"value", number_or_null(c.value)}});
  }
  return {{"value", r.value}, {"h_s", r.h_s}, {"components", comps}};
}

/// Header t,component,value.
inline std::string norm_report_csv(const NormReport& r) {
  std::string out = "t,component,value\n";
  for (const auto& c : r.components) {
    out += format_double(c.time) + "," + c.name + "," + format_double(c.value) + "\n";
  }
  return out;
}

/// Header x,value.
inline std::string field_csv(const SpectralField& f) {
  const SpectralField g = coherent(f);
  const auto x = g.grid.points();
  std::string out = "x,value\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += format_double(x[i]) + "," + format_double(g.phys[i]) + "\n";
  }
  return out;
}

/// Aligned text table of reports.
inline std::string report_table(const std::vector<EstimateReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "estimate" << std::right << std::setw(12) << "theory"
      << std::setw(12) << "fitted" << std::setw(12) << "tolerance" << std::setw(14) << "verdict"
      << "\n";
  auto num = [](double v) {
    std::ostringstream s;
    if (std::isfinite(v)) {
      s << std::setprecision(5) << v;
    } else {
      s << "-";
    }
    return s.str();
  };
  for (const auto& r : reports) {
    out << std::left << std::setw(22) << r.estimate_id << std::right << std::setw(12)
        << num(r.theoretical_exponent) << std::setw(12) << num(r.fitted_exponent) << std::setw(12)
        << num(r.tolerance) << std::setw(14) << to_string(r.verdict) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Run directories

struct ManifestEntry {
  std::string path;  ///< relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string version = kVersion;
  std::string started;
  std::string finished;
  std::vector<ManifestEntry> files;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json to_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"config_hash", m.config_hash},
          {"version", m.version},
          {"started", m.started},
          {"finished", m.finished},
          {"files", files}};
}

/// Owns <root>/<run-id>/ and records every file written through it.
class RunDirectory {
 public:
  RunDirectory(const std::filesystem::path& root, const RunConfig& cfg)
      : dir_(root / run_id(cfg)) {
    manifest_.config_hash = config_hash(cfg);
    manifest_.started = utc_timestamp();
    std::filesystem::create_directories(dir_ / "reports");
    std::filesystem::create_directories(dir_ / "data");
    write("config.json", to_json(cfg).dump(2) + "\n");
  }

  const std::filesystem::path& path() const { return dir_; }

  void write(const std::string& relative, const std::string& content) {
    const auto target = dir_ / relative;
    std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + target.string());
    out << content;
    out.close();
    if (!out) throw Error("failed writing " + target.string());
    manifest_.files.push_back({relative, sha256_hex(content), content.size()});
  }

  void write_json(const std::string& relative, const json& j) { write(relative, j.dump(2) + "\n"); }

  /// Writes manifest.json; call once at the end of the run.
  void finish() {
    manifest_.finished = utc_timestamp();
    std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
    out << to_json(manifest_).dump(2) << "\n";
    if (!out) throw Error("cannot write manifest");
  }

  const RunManifest& manifest() const { return manifest_; }

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

}  // namespace gkdv
