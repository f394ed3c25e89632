#pragma once

// L^q and H^s norms, the time-weighted norms X_T^s, Y_T^s, Z_T^s and
// Z~_T^s (sup over a finite set of sample times), and the exponents
// gamma_k = (3k+2)/(2(k+1)) and omega_k = (2p-3k-2)/(2p).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

inline double gamma_k(double k) {
  if (!(k > 0.0)) throw DomainError("gamma_k needs k > 0");
  return (3.0 * k + 2.0) / (2.0 * (k + 1.0));
}

/// May be <= 0; callers decide what to do with that.
inline double omega_k(double k, double p) {
  if (!(k > 0.0) || !(p > 0.0)) throw DomainError("omega_k needs k > 0 and p > 0");
  return (2.0 * p - 3.0 * k - 2.0) / (2.0 * p);
}

/// p > 3k/2 + 1, strictly.
inline bool contraction_admissible(double k, double p) { return omega_k(k, p) > 0.0; }

namespace detail {

inline double lebesgue_from_samples(const GridSpec& grid, std::span<const double> v, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  // Scale by the max to keep |v|^q in range.
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x) / m, q);
  return m * std::pow(acc * grid.spacing(), 1.0 / q);
}

inline double sobolev_from_spectrum(const GridSpec& grid, std::span<const Complex> spec, double s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    acc += std::pow(1.0 + std::abs(grid.frequency(j)), 2.0 * s) * std::norm(spec[j]);
  }
  return std::sqrt(grid.length * acc);
}

/// spec multiplied by i sgn(xi) |xi|^{s+1} (zero at xi = 0 and at Nyquist).
inline Spectrum shifted_derivative_spectrum(const GridSpec& grid, std::span<const Complex> spec,
                                            double s) {
  Spectrum out(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double xi = grid.frequency(j);
    if (xi == 0.0 || j == grid.nyquist_slot()) continue;
    const double sgn = xi > 0.0 ? 1.0 : -1.0;
    out[j] = Complex{0.0, sgn * std::pow(std::abs(xi), s + 1.0)} * spec[j];
  }
  return out;
}

}  // namespace detail

/// (sum |f(x_j)|^q h)^{1/q}; q = infinity gives the max norm.
inline double lebesgue_norm(const SpectralField& f, double q) {
  if (!(q >= 1.0)) throw DomainError("lebesgue_norm needs q >= 1");
  if (f.phys.size() == f.grid.n_points) return detail::lebesgue_from_samples(f.grid, f.phys, q);
  const auto phys = detail::synthesize(f.grid, f.spec);
  return detail::lebesgue_from_samples(f.grid, phys, q);
}

/// ||J^s f||_{L^2} with J^s the multiplier (1 + |xi|)^s, evaluated by Parseval.
inline double sobolev_norm(const SpectralField& f, double s) {
  if (f.spec.size() == f.grid.n_points) return detail::sobolev_from_spectrum(f.grid, f.spec, s);
  const auto spec = detail::analyze(f.grid, f.phys);
  return detail::sobolev_from_spectrum(f.grid, spec, s);
}

struct WeightedNormConfig {
  double s = 0.0;
  double k = 1.0;
  double p = 4.0;
  double t_final = 1.0;
  std::vector<double> sample_times;

  /// n points log-spaced in [1e-4 T, T].
  static std::vector<double> default_sample_times(double t_final, std::size_t n = 20) {
    std::vector<double> t(n);
    const double lo = std::log(1e-4 * t_final), hi = std::log(t_final);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = n == 1 ? t_final
                    : std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    t.front() = n == 1 ? t_final : 1e-4 * t_final;
    t.back() = t_final;
    return t;
  }

  static WeightedNormConfig make(double s, double k, double p, double t_final, std::size_t n = 20) {
    return {s, k, p, t_final, default_sample_times(t_final, n)};
  }

  void validate() const {
    if (!(k > 0.0)) throw DomainError("weighted norm needs k > 0");
    if (!(p > 0.0)) throw DomainError("weighted norm needs p > 0");
    if (!(t_final > 0.0 && t_final <= 1.0)) throw DomainError("weighted norm needs T in (0, 1]");
    if (sample_times.empty()) throw DomainError("weighted norm needs sample times");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      if (!(sample_times[i] > 0.0 && sample_times[i] <= t_final * (1.0 + 1e-12))) {
        throw DomainError("sample times must lie in (0, T]");
      }
      if (i > 0 && !(sample_times[i] > sample_times[i - 1])) {
        throw DomainError("sample times must be strictly increasing");
      }
    }
  }

  double weight_exponent() const { return gamma_k(k) / p; }
  double lebesgue_exponent() const { return 2.0 * (k + 1.0); }
};

struct NormComponent {
  double time = 0.0;
  std::string name;
  double value = 0.0;
};

struct NormReport {
  double h_s = 0.0;  ///< largest H^s component over the samples
  std::vector<NormComponent> components;
  double value = 0.0;  ///< the norm: max over the per-time totals
};

using Trajectory = std::function<SpectralField(double)>;

enum class WeightedSpace { x, y };

namespace detail {

inline void require_finite(double v, double t, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " is not finite at t = " << t;
    throw BlowUpError(msg.str());
  }
}

/// Adds the components of one time slice and returns its total.
inline double weighted_slice(const GridSpec& grid, std::span<const Complex> spec,
                             const WeightedNormConfig& cfg, WeightedSpace space, double t,
                             std::vector<NormComponent>& out, double& h_s_max) {
  const double q = cfg.lebesgue_exponent();
  const double w = std::pow(t, cfg.weight_exponent());
  const double hs = sobolev_from_spectrum(grid, spec, cfg.s);
  require_finite(hs, t, "H^s norm");
  h_s_max = std::max(h_s_max, hs);
  out.push_back({t, "h_s", hs});
  double weighted = 0.0;
  if (space == WeightedSpace::x) {
    const double v = w * lebesgue_from_samples(grid, synthesize(grid, spec), q);
    require_finite(v, t, "weighted L^{2(k+1)} norm");
    out.push_back({t, "weighted_l", v});
    weighted += v;
  }
  const double d = w * lebesgue_from_samples(
                           grid, synthesize(grid, shifted_derivative_spectrum(grid, spec, 0.0)), q);
  require_finite(d, t, "weighted derivative norm");
  out.push_back({t, "weighted_dx", d});
  weighted += d;
  const double ds = cfg.s == 0.0
                        ? d
                        : w * lebesgue_from_samples(
                                  grid,
                                  synthesize(grid, shifted_derivative_spectrum(grid, spec, cfg.s)),
                                  q);
  require_finite(ds, t, "weighted D^s derivative norm");
  out.push_back({t, "weighted_dsdx", ds});
  weighted += ds;
  out.push_back({t, "total", hs + weighted});
  return hs + weighted;
}

}  // namespace detail

/// Norm report from per-sample spectra (spectra[i] at cfg.sample_times[i]).
inline NormReport weighted_norm_from_spectra(const GridSpec& grid,
                                             const std::vector<Spectrum>& spectra,
                                             const WeightedNormConfig& cfg, WeightedSpace space) {
  cfg.validate();
  if (!(cfg.s > -1.0)) throw DomainError("weighted norms need s > -1");
  if (spectra.size() != cfg.sample_times.size()) {
    throw StructuralError("one spectrum per sample time is required");
  }
  NormReport report;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const double total = detail::weighted_slice(grid, spectra[i], cfg, space, cfg.sample_times[i],
                                                report.components, report.h_s);
    report.value = std::max(report.value, total);
  }
  return report;
}

inline NormReport weighted_norm(const Trajectory& trajectory, const WeightedNormConfig& cfg,
                                WeightedSpace space) {
  cfg.validate();
  std::vector<Spectrum> spectra;
  GridSpec grid;
  for (double t : cfg.sample_times) {
    SpectralField f = trajectory(t);
    grid = f.grid;
    Spectrum storage;
    if (f.spec.size() == f.grid.n_points) {
      spectra.push_back(std::move(f.spec));
    } else {
      spectra.push_back(detail::analyze(f.grid, f.phys));
    }
  }
  return weighted_norm_from_spectra(grid, spectra, cfg, space);
}

/// sup_t { ||f||_{H^s} + t^{gamma_k/p} (||f||_q + ||f_x||_q + ||D^s f_x||_q) }, q = 2(k+1).
inline NormReport x_norm(const Trajectory& trajectory, const WeightedNormConfig& cfg) {
  return weighted_norm(trajectory, cfg, WeightedSpace::x);
}

/// sup_t { ||f||_{H^s} + t^{gamma_k/p} (||f_x||_q + ||D^s f_x||_q) }, q = 2(k+1).
inline NormReport y_norm(const Trajectory& trajectory, const WeightedNormConfig& cfg) {
  return weighted_norm(trajectory, cfg, WeightedSpace::y);
}

/// sup_t { ||f||_{H^s} + t^{gamma_k/p} ||f||_{L^{2k+1}} }.
inline double z_norm(const Trajectory& trajectory, const WeightedNormConfig& cfg) {
  cfg.validate();
  double sup = 0.0;
  for (double t : cfg.sample_times) {
    const SpectralField f = coherent(trajectory(t));
    const double v = sobolev_norm(f, cfg.s) +
                     std::pow(t, cfg.weight_exponent()) * lebesgue_norm(f, 2.0 * cfg.k + 1.0);
    detail::require_finite(v, t, "Z norm");
    sup = std::max(sup, v);
  }
  return sup;
}

/// sup_t { ||f||_{H^s} + t^{(1+|s|)/p} ||f_x||_{L^2} }.
inline double z_tilde_norm(const Trajectory& trajectory, const WeightedNormConfig& cfg) {
  cfg.validate();
  double sup = 0.0;
  for (double t : cfg.sample_times) {
    const SpectralField f = coherent(trajectory(t));
    const double dx = std::sqrt(spectral_energy(
        f.grid, detail::shifted_derivative_spectrum(f.grid, f.spec, 0.0)));
    const double v =
        sobolev_norm(f, cfg.s) + std::pow(t, (1.0 + std::abs(cfg.s)) / cfg.p) * dx;
    detail::require_finite(v, t, "Z~ norm");
    sup = std::max(sup, v);
  }
  return sup;
}

}  // namespace gkdv
