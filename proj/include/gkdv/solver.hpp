#pragma once

// Fixed-point (Picard) solver for
//
//     v_t + v_xxx + eta L v + N(v) = 0,    N(v) = (v^{k+1})_x  or  (v_x)^{k+1},
//
// written as v = V(t) v0 - int_0^t V(t - tau) N(v(tau)) dtau, together with the
// radius/time selection rule r = 4 c ||v0||_{H^s}, c T^{omega_k} r^k = 1/4, an
// empirical calibration of c, and an independent ETDRK4 reference integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/norms.hpp"
#include "gkdv/semigroup.hpp"
#include "gkdv/spectral.hpp"
#include "gkdv/symbols.hpp"

namespace gkdv {

enum class NonlinearityMode { conservative, gradient };

inline const char* to_string(NonlinearityMode mode) {
  return mode == NonlinearityMode::conservative ? "conservative" : "gradient";
}

struct IvpProblem {
  DissipativeSymbol symbol;
  GridSpec grid;
  double k = 1.0;
  NonlinearityMode mode = NonlinearityMode::conservative;
  double s = 0.0;
  SpectralField initial_data;
  double nonlinear_coeff = 1.0;  ///< 0 turns the problem linear

  void validate() const {
    symbol.validate();
    grid.validate();
    if (!(k > 0.0)) throw DomainError("nonlinearity degree k must be positive");
    if (!(initial_data.grid == grid)) throw StructuralError("initial data lives on another grid");
    if (!std::isfinite(nonlinear_coeff)) throw DomainError("nonlinear coefficient is not finite");
  }

  /// Theorem hypotheses that the discrete problem does not need.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (mode == NonlinearityMode::conservative && !(s > -1.0)) {
      out.push_back("conservative mode is covered for s > -1 only");
    }
    if (mode == NonlinearityMode::gradient && !(s > 0.0)) {
      out.push_back("gradient mode is covered for s > 0 only");
    }
    if (!contraction_admissible(k, symbol.p)) {
      out.push_back("p <= 3k/2 + 1: outside the contraction regime");
    }
    return out;
  }

  WeightedSpace space() const {
    return mode == NonlinearityMode::conservative ? WeightedSpace::x : WeightedSpace::y;
  }

  Spectrum data_spectrum() const {
    Spectrum storage;
    return detail::spectrum_of(initial_data, storage);
  }

  IvpProblem with_data(SpectralField data) const {
    IvpProblem out = *this;
    out.initial_data = std::move(data);
    return out;
  }
};

namespace detail {

inline bool is_integer_power(double k) {
  return std::abs((k + 1.0) - std::round(k + 1.0)) < 1e-12;
}

/// v^{k+1} for integer k+1, |v|^k v otherwise.
inline double signed_power(double v, double k) {
  if (is_integer_power(k)) {
    const auto n = static_cast<long>(std::lround(k + 1.0));
    double out = 1.0;
    for (long i = 0; i < n; ++i) out *= v;
    return out;
  }
  return std::pow(std::abs(v), k) * v;
}

inline void derivative_in_place(const GridSpec& grid, std::span<Complex> spec) {
  for (std::size_t j = 0; j < spec.size(); ++j) {
    spec[j] *= j == grid.nyquist_slot() ? Complex{} : Complex{0.0, grid.frequency(j)};
  }
}

/// Spectrum of N(v): dealias, pointwise power, dealias, and d_x in conservative mode.
inline Spectrum nonlinear_spectrum(const GridSpec& grid, std::span<const Complex> spec, double k,
                                   NonlinearityMode mode) {
  Spectrum a(spec.begin(), spec.end());
  dealias_in_place(grid, a);
  if (mode == NonlinearityMode::gradient) derivative_in_place(grid, a);
  std::vector<double> phys = synthesize(grid, a);
  for (double& v : phys) {
    v = signed_power(v, k);
    if (!std::isfinite(v)) throw BlowUpError("nonlinearity overflowed");
  }
  Spectrum b = analyze(grid, phys);
  dealias_in_place(grid, b);
  if (mode == NonlinearityMode::conservative) derivative_in_place(grid, b);
  return b;
}

}  // namespace detail

/// N(f) with dealiasing before and after the pointwise power.
inline SpectralField nonlinearity_eval(const SpectralField& f, double k, NonlinearityMode mode) {
  if (!(k > 0.0)) throw DomainError("nonlinearity_eval needs k > 0");
  f.grid.validate();
  Spectrum storage;
  return inverse_transform(
      from_spectrum(f.grid, detail::nonlinear_spectrum(f.grid, detail::spectrum_of(f, storage), k, mode)));
}

struct PicardOptions {
  std::size_t panels = 16;
  double grading = 2.0;
  std::size_t n_samples = 20;
  std::vector<double> sample_times;  ///< replaces the default log-spaced samples when set
};

/// Graded breakpoints on [0, T] merged with the norm sample times; each panel
/// carries four Gauss-Legendre nodes.
class TimeMesh {
 public:
  TimeMesh(double t_final, const PicardOptions& opts) : t_final_(t_final) {
    if (!(t_final > 0.0 && t_final <= 1.0)) throw DomainError("time horizon T must lie in (0, 1]");
    if (opts.panels < 1 || !(opts.grading >= 1.0)) throw DomainError("bad panel/grading options");
    samples_ = opts.sample_times.empty()
                   ? WeightedNormConfig::default_sample_times(t_final, opts.n_samples)
                   : opts.sample_times;
    std::vector<double> b = graded_mesh(t_final, opts.panels, opts.grading);
    b.insert(b.end(), samples_.begin(), samples_.end());
    std::sort(b.begin(), b.end());
    const double eps = 1e-12 * t_final;
    for (double t : b) {
      if (breaks_.empty() || t - breaks_.back() > eps) breaks_.push_back(t);
    }
    breaks_.back() = t_final;
    for (double t : samples_) {
      auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t - eps);
      sample_index_.push_back(static_cast<std::size_t>(it - breaks_.begin()));
    }
    rule_ = gauss_legendre(kNodesPerPanel);
    for (std::size_t m = 0; m + 1 < breaks_.size(); ++m) {
      const double a = breaks_[m], half = 0.5 * (breaks_[m + 1] - a);
      for (std::size_t q = 0; q < kNodesPerPanel; ++q) {
        nodes_.push_back(a + half * (1.0 + rule_.nodes[q]));
        weights_.push_back(half * rule_.weights[q]);
      }
    }
  }

  double t_final() const { return t_final_; }
  std::size_t panels() const { return breaks_.size() - 1; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<std::size_t>& sample_index() const { return sample_index_; }
  const QuadratureRule& rule() const { return rule_; }

  /// Panel containing t (the last one for t = T).
  std::size_t panel_of(double t) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    const auto m = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breaks_.begin() - 1, 0));
    return std::min(m, panels() - 1);
  }

  /// Lagrange basis of panel m's nodes evaluated at sigma.
  std::array<double, kNodesPerPanel> lagrange(std::size_t m, double sigma) const {
    std::array<double, kNodesPerPanel> out{};
    const double* x = &nodes_[m * kNodesPerPanel];
    for (std::size_t l = 0; l < kNodesPerPanel; ++l) {
      double v = 1.0;
      for (std::size_t o = 0; o < kNodesPerPanel; ++o) {
        if (o != l) v *= (sigma - x[o]) / (x[l] - x[o]);
      }
      out[l] = v;
    }
    return out;
  }

 private:
  double t_final_;
  std::vector<double> samples_;
  std::vector<double> breaks_;
  std::vector<std::size_t> sample_index_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  QuadratureRule rule_;
};

/// A trajectory stored at the mesh breakpoints and quadrature nodes.
struct NodeTrajectory {
  std::vector<Spectrum> breaks;
  std::vector<Spectrum> nodes;
};

inline NodeTrajectory operator-(const NodeTrajectory& a, const NodeTrajectory& b) {
  NodeTrajectory out = a;
  auto sub = [](std::vector<Spectrum>& x, const std::vector<Spectrum>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x[i].size(); ++j) x[i][j] -= y[i][j];
    }
  };
  sub(out.breaks, b.breaks);
  sub(out.nodes, b.nodes);
  return out;
}

inline NodeTrajectory scaled(NodeTrajectory a, double factor) {
  for (auto* group : {&a.breaks, &a.nodes}) {
    for (auto& spec : *group) {
      for (auto& c : spec) c *= factor;
    }
  }
  return a;
}

/// The Duhamel map Psi(v)(t) = V(t) v0 - coeff int_0^t V(t - tau) N(v(tau)) dtau
/// on a fixed time mesh.  Full panels use their Gauss-Legendre nodes; the
/// partial panel [b_m, t] uses a 4-point rule applied to the Lagrange
/// interpolant of the panel's node forcing.
class DuhamelMap {
 public:
  DuhamelMap(IvpProblem problem, double t_final, PicardOptions opts = {})
      : problem_(std::move(problem)),
        mesh_(t_final, opts),
        prop_(problem_.symbol, problem_.grid) {
    problem_.validate();
    norm_cfg_ = {problem_.s, problem_.k, problem_.symbol.p, t_final, mesh_.samples()};
    norm_cfg_.validate();
    data_ = problem_.data_spectrum();
    free_ = free_evolution(data_);
  }

  const IvpProblem& problem() const { return problem_; }
  const TimeMesh& mesh() const { return mesh_; }
  const Propagator& propagator() const { return prop_; }
  const WeightedNormConfig& norm_config() const { return norm_cfg_; }
  const NodeTrajectory& free() const { return free_; }

  NodeTrajectory free_evolution(const Spectrum& v0) const {
    NodeTrajectory out;
    for (double t : mesh_.breaks()) out.breaks.push_back(prop_.propagate(v0, t));
    for (double t : mesh_.nodes()) out.nodes.push_back(prop_.propagate(v0, t));
    return out;
  }

  /// N(v) at every quadrature node.
  std::vector<Spectrum> forcing(const NodeTrajectory& v) const {
    std::vector<Spectrum> out;
    out.reserve(v.nodes.size());
    for (const auto& spec : v.nodes) {
      out.push_back(detail::nonlinear_spectrum(problem_.grid, spec, problem_.k, problem_.mode));
    }
    return out;
  }

  /// int_0^t V(t - tau) F(tau) dtau at every breakpoint and node.
  NodeTrajectory integrate(const std::vector<Spectrum>& forcing) const {
    const std::size_t n = problem_.grid.n_points;
    NodeTrajectory out;
    out.breaks.assign(mesh_.breaks().size(), Spectrum(n));
    out.nodes.assign(mesh_.nodes().size(), Spectrum(n));
    for (std::size_t m = 0; m < mesh_.panels(); ++m) {
      const double a = mesh_.breaks()[m], b = mesh_.breaks()[m + 1];
      for (std::size_t i = 0; i < kNodesPerPanel; ++i) {
        const std::size_t idx = m * kNodesPerPanel + i;
        partial(forcing, out.breaks[m], m, mesh_.nodes()[idx], out.nodes[idx]);
      }
      auto& next = out.breaks[m + 1];
      prop_.accumulate(out.breaks[m], b - a, 1.0, next, limit());
      for (std::size_t q = 0; q < kNodesPerPanel; ++q) {
        const std::size_t idx = m * kNodesPerPanel + q;
        prop_.accumulate(forcing[idx], b - mesh_.nodes()[idx], mesh_.weights()[idx], next, limit());
      }
    }
    return out;
  }

  /// The integral at an arbitrary t in [0, T], given the node forcing and the
  /// integral already evaluated at the breakpoints.
  Spectrum integral_at(const std::vector<Spectrum>& forcing, const NodeTrajectory& integral,
                       double t) const {
    if (!(t >= 0.0 && t <= mesh_.t_final() * (1.0 + 1e-12))) {
      throw DomainError("evaluation time outside [0, T]");
    }
    const std::size_t m = mesh_.panel_of(t);
    if (t == mesh_.breaks()[m]) return integral.breaks[m];
    if (t == mesh_.breaks()[m + 1]) return integral.breaks[m + 1];
    Spectrum out(problem_.grid.n_points);
    partial(forcing, integral.breaks[m], m, t, out);
    return out;
  }

  NodeTrajectory combine(const NodeTrajectory& integral) const {
    NodeTrajectory out = free_;
    const double c = problem_.nonlinear_coeff;
    auto axpy = [c](std::vector<Spectrum>& x, const std::vector<Spectrum>& y) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x[i].size(); ++j) x[i][j] -= c * y[i][j];
      }
    };
    axpy(out.breaks, integral.breaks);
    axpy(out.nodes, integral.nodes);
    return out;
  }

  NodeTrajectory apply(const NodeTrajectory& v) const { return combine(integrate(forcing(v))); }

  /// X_T^s (conservative) or Y_T^s (gradient) norm over the sample times.
  NormReport norm_report(const NodeTrajectory& v) const {
    std::vector<Spectrum> at_samples;
    for (std::size_t i : mesh_.sample_index()) at_samples.push_back(v.breaks[i]);
    return weighted_norm_from_spectra(problem_.grid, at_samples, norm_cfg_, problem_.space());
  }

  double norm(const NodeTrajectory& v) const { return norm_report(v).value; }

 private:
  std::size_t limit() const { return problem_.grid.dealias_cutoff(); }

  /// out = V(t - b_m) I(b_m) + int_{b_m}^t V(t - sigma) F~_m(sigma) dsigma.
  void partial(const std::vector<Spectrum>& forcing, const Spectrum& at_break, std::size_t m,
               double t, Spectrum& out) const {
    const double a = mesh_.breaks()[m];
    prop_.accumulate(at_break, t - a, 1.0, out, limit());
    const double half = 0.5 * (t - a);
    if (half <= 0.0) return;
    const std::size_t n = problem_.grid.n_points;
    Spectrum g(n);
    for (std::size_t q = 0; q < kNodesPerPanel; ++q) {
      const double sigma = a + half * (1.0 + mesh_.rule().nodes[q]);
      const auto lag = mesh_.lagrange(m, sigma);
      std::fill(g.begin(), g.end(), Complex{});
      for (std::size_t l = 0; l < kNodesPerPanel; ++l) {
        const auto& f = forcing[m * kNodesPerPanel + l];
        for (std::size_t j = 0; j < n; ++j) g[j] += lag[l] * f[j];
      }
      prop_.accumulate(g, t - sigma, half * mesh_.rule().weights[q], out, limit());
    }
  }

  IvpProblem problem_;
  TimeMesh mesh_;
  Propagator prop_;
  WeightedNormConfig norm_cfg_;
  Spectrum data_;
  NodeTrajectory free_;
};

struct PicardIterate {
  std::size_t index = 0;
  double norm = 0.0;       ///< space norm of v^n
  double increment = 0.0;  ///< space norm of v^n - v^{n-1}
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

struct PicardTrace {
  double r = 0.0;
  double t_final = 0.0;
  double c_calibrated = 0.0;
  std::vector<PicardIterate> iterates;
  bool converged = false;

  double max_ratio() const {
    double m = 0.0;
    for (const auto& it : iterates) {
      if (std::isfinite(it.ratio)) m = std::max(m, it.ratio);
    }
    return m;
  }
};

/// The converged iterate together with what is needed to evaluate it between
/// stored times (one Duhamel evaluation from the stored node forcing).
class PicardSolution {
 public:
  PicardSolution(std::shared_ptr<const DuhamelMap> map, NodeTrajectory value,
                 std::vector<Spectrum> forcing, NodeTrajectory integral)
      : map_(std::move(map)),
        value_(std::move(value)),
        forcing_(std::move(forcing)),
        integral_(std::move(integral)) {}

  const DuhamelMap& map() const { return *map_; }
  const NodeTrajectory& stored() const { return value_; }
  double t_final() const { return map_->mesh().t_final(); }

  Spectrum spectrum_at(double t) const {
    const auto& breaks = map_->mesh().breaks();
    const std::size_t m = map_->mesh().panel_of(t);
    if (t == breaks[m]) return value_.breaks[m];
    if (t == breaks[m + 1]) return value_.breaks[m + 1];
    Spectrum out = map_->propagator().propagate(map_->problem().data_spectrum(), t);
    const Spectrum i = map_->integral_at(forcing_, integral_, t);
    const double c = map_->problem().nonlinear_coeff;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= c * i[j];
    return out;
  }

  SpectralField at(double t) const {
    return inverse_transform(from_spectrum(map_->problem().grid, spectrum_at(t)));
  }

  /// int_0^t V(t - tau) N(v(tau)) dtau.
  SpectralField duhamel_term(double t) const {
    return inverse_transform(
        from_spectrum(map_->problem().grid, map_->integral_at(forcing_, integral_, t)));
  }

  Trajectory trajectory() const {
    return [self = *this](double t) { return self.at(t); };
  }

 private:
  std::shared_ptr<const DuhamelMap> map_;
  NodeTrajectory value_;
  std::vector<Spectrum> forcing_;
  NodeTrajectory integral_;
};

struct PicardResult {
  PicardSolution solution;
  PicardTrace trace;
};

/// v^0 = V(t) v0, v^{n+1} = Psi(v^n) until the space norm of the increment is
/// at most tol.  Leaving the ball of radius 10 r is an error.
inline PicardResult picard_iterate(const IvpProblem& prob, double r, double t_final,
                                   std::size_t max_iter, double tol,
                                   const PicardOptions& opts = {}) {
  if (max_iter < 1) throw DomainError("picard_iterate needs max_iter >= 1");
  auto map = std::make_shared<const DuhamelMap>(prob, t_final, opts);
  PicardTrace trace;
  trace.r = r;
  trace.t_final = t_final;
  NodeTrajectory v = map->free();
  std::vector<Spectrum> forcing;
  NodeTrajectory integral;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 1; n <= max_iter; ++n) {
    forcing = map->forcing(v);
    integral = map->integrate(forcing);
    NodeTrajectory next = map->combine(integral);
    const double norm = map->norm(next);
    const double inc = map->norm(next - v);
    if (!std::isfinite(norm) || !std::isfinite(inc)) {
      throw BlowUpError("Picard iterate " + std::to_string(n) + " is not finite");
    }
    if (norm > 10.0 * r) {
      std::ostringstream msg;
      msg << "Picard iterate " << n << " left the ball: norm " << norm << " > 10 r = " << 10.0 * r;
      throw DivergenceError(msg.str());
    }
    PicardIterate rec{n, norm, inc,
                      previous > 0.0 ? inc / previous : std::numeric_limits<double>::quiet_NaN()};
    trace.iterates.push_back(rec);
    previous = inc;
    v = std::move(next);
    if (inc <= tol) {
      trace.converged = true;
      break;
    }
  }
  return {PicardSolution(map, std::move(v), std::move(forcing), std::move(integral)), trace};
}

/// r = 4 c ||v0||_{H^s},  T = min(1, (1 / (4 c r^k))^{1/omega_k}).
inline std::pair<double, double> select_radius_and_time(const IvpProblem& prob, double c) {
  if (!(c > 0.0)) throw DomainError("select_radius_and_time needs c > 0");
  const double omega = omega_k(prob.k, prob.symbol.p);
  if (!(omega > 0.0)) {
    throw AdmissibilityError(
        "contraction exponent nonpositive; symbol/nonlinearity pair outside theorem hypotheses "
        "(need p > 3k/2 + 1)");
  }
  const double r = 4.0 * c * sobolev_norm(prob.initial_data, prob.s);
  if (r == 0.0) return {0.0, 1.0};
  const double t = std::pow(1.0 / (4.0 * c * std::pow(r, prob.k)), 1.0 / omega);
  return {r, std::min(1.0, t)};
}

struct CalibrationOptions {
  double t_final = 1.0;
  double safety = 2.0;
  PicardOptions mesh;
};

/// Empirical constant c: safety times the largest of
///   ||V(.)w||_X / ||w||_{H^s}   and   ||int V N(V(.)w)||_X / (T^omega ||V(.)w||_X^{k+1})
/// over the nonzero probes w.
inline double calibrate_c(const IvpProblem& prob, const std::vector<SpectralField>& probes,
                          const CalibrationOptions& opts = {}) {
  if (probes.empty()) throw DomainError("calibrate_c needs at least one probe");
  const double omega = omega_k(prob.k, prob.symbol.p);
  double best = 0.0;
  bool any = false;
  for (const auto& probe : probes) {
    const double h = sobolev_norm(probe, prob.s);
    if (h == 0.0) continue;
    any = true;
    const DuhamelMap map(prob.with_data(probe), opts.t_final, opts.mesh);
    const double xv = map.norm(map.free());
    const double duh = map.norm(map.integrate(map.forcing(map.free())));
    const double nl = duh / (std::pow(opts.t_final, omega) * std::pow(xv, prob.k + 1.0));
    if (!std::isfinite(nl) || !std::isfinite(xv)) throw BlowUpError("calibration probe blew up");
    best = std::max({best, xv / h, nl});
  }
  if (!any) throw DomainError("calibrate_c: every probe is zero");
  return opts.safety * best;
}

struct SampledTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;

  const SpectralField& back() const { return states.back(); }
};

struct ReferenceOptions {
  std::size_t record_stride = 0;  ///< 0: about 64 snapshots
  std::function<void(std::size_t, double, const Spectrum&)> observer;
};

/// ETDRK4 (Cox-Matthews form) with the full linear multiplier treated
/// exactly; phi-functions by averaging over 32 points of the unit circle
/// around each z.
inline SampledTrajectory reference_integrate(const IvpProblem& prob, double t_final,
                                             std::size_t n_steps, const ReferenceOptions& opts = {}) {
  prob.validate();
  if (n_steps < 1) throw DomainError("reference_integrate needs n_steps >= 1");
  if (!(t_final > 0.0)) throw DomainError("reference_integrate needs T > 0");
  const Propagator prop(prob.symbol, prob.grid);
  const auto& grid = prob.grid;
  const std::size_t n = grid.n_points;
  const double h = t_final / static_cast<double>(n_steps);

  constexpr int kContour = 32;
  Spectrum e(n), e2(n), qc(n), f1(n), f2(n), f3(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex hl = h * prop.generator()[j];
    e[j] = std::exp(hl);
    e2[j] = std::exp(0.5 * hl);
    Complex sq{}, s1{}, s2{}, s3{};
    for (int m = 0; m < kContour; ++m) {
      const Complex z = hl + std::polar(1.0, 2.0 * std::numbers::pi * (m + 0.5) / kContour);
      const Complex ez = std::exp(z), z3 = z * z * z;
      sq += (std::exp(0.5 * z) - 1.0) / z;
      s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      s2 += (2.0 + z + ez * (z - 2.0)) / z3;
      s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    qc[j] = h * sq / double(kContour);
    f1[j] = h * s1 / double(kContour);
    f2[j] = h * s2 / double(kContour);
    f3[j] = h * s3 / double(kContour);
  }

  const double coeff = prob.nonlinear_coeff;
  auto nonlin = [&](const Spectrum& v) {
    if (coeff == 0.0) return Spectrum(n);
    Spectrum out = detail::nonlinear_spectrum(grid, v, prob.k, prob.mode);
    for (auto& c : out) c *= -coeff;
    return out;
  };

  const std::size_t stride =
      opts.record_stride > 0 ? opts.record_stride : std::max<std::size_t>(1, n_steps / 64);
  SampledTrajectory out;
  Spectrum v = prob.data_spectrum();
  auto record = [&](double t) {
    out.times.push_back(t);
    out.states.push_back(inverse_transform(from_spectrum(grid, v)));
  };
  record(0.0);
  if (opts.observer) opts.observer(0, 0.0, v);

  Spectrum a(n), b(n), c(n);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double before = spectral_energy(grid, v);
    const Spectrum nv = nonlin(v);
    for (std::size_t j = 0; j < n; ++j) a[j] = e2[j] * v[j] + qc[j] * nv[j];
    const Spectrum na = nonlin(a);
    for (std::size_t j = 0; j < n; ++j) b[j] = e2[j] * v[j] + qc[j] * na[j];
    const Spectrum nb = nonlin(b);
    for (std::size_t j = 0; j < n; ++j) c[j] = e2[j] * a[j] + qc[j] * (2.0 * nb[j] - nv[j]);
    const Spectrum nc = nonlin(c);
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = e[j] * v[j] + f1[j] * nv[j] + 2.0 * f2[j] * (na[j] + nb[j]) + f3[j] * nc[j];
    }
    const double after = spectral_energy(grid, v);
    if (!std::isfinite(after)) throw BlowUpError("reference solution is not finite");
    if (before > 0.0 && after > 100.0 * before) {
      std::ostringstream msg;
      msg << "reference step " << step << " grew the L^2 norm more than 10x; use more steps";
      throw StabilityError(msg.str());
    }
    const double t = step == n_steps ? t_final : h * static_cast<double>(step);
    if (opts.observer) opts.observer(step, t, v);
    if (step % stride == 0 || step == n_steps) record(t);
  }
  return out;
}

struct SolveOptions {
  std::vector<SpectralField> probes;  ///< calibration probes; empty means {v0}
  CalibrationOptions calibration;
  PicardOptions mesh;
  std::size_t max_iter = 100;
  double relative_tolerance = 1e-11;  ///< increment tolerance relative to ||V(.)v0||
};

/// calibrate_c -> select_radius_and_time -> picard_iterate.
inline PicardResult solve(const IvpProblem& prob, const SolveOptions& opts = {}) {
  prob.validate();
  if (!contraction_admissible(prob.k, prob.symbol.p)) {
    throw AdmissibilityError(
        "contraction exponent nonpositive; symbol/nonlinearity pair outside theorem hypotheses "
        "(need p > 3k/2 + 1)");
  }
  double c = 0.0, r = 0.0, t_final = 1.0;
  if (sobolev_norm(prob.initial_data, prob.s) > 0.0) {
    c = calibrate_c(prob, opts.probes.empty() ? std::vector{prob.initial_data} : opts.probes,
                    opts.calibration);
    std::tie(r, t_final) = select_radius_and_time(prob, c);
  }
  const DuhamelMap free_map(prob, t_final, opts.mesh);
  const double tol = opts.relative_tolerance * free_map.norm(free_map.free());
  auto result = picard_iterate(prob, r, t_final, opts.max_iter, tol, opts.mesh);
  result.trace.c_calibrated = c;
  return result;
}

}  // namespace gkdv
