#pragma once

// The linear propagator V(t): c_j -> exp(i t xi_j^3 + eta t Phi(xi_j)) c_j,
// the Duhamel integral against it, and the sup-norm profile of the smoothing
// multiplier (1 + |xi|)^theta exp(eta tau Phi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"
#include "gkdv/symbols.hpp"

namespace gkdv {

class Propagator {
 public:
  Propagator(DissipativeSymbol symbol, GridSpec grid)
      : symbol_(std::move(symbol)), grid_(grid) {
    symbol_.validate();
    grid_.validate();
    generator_.resize(grid_.n_points);
    for (std::size_t s = 0; s < grid_.n_points; ++s) {
      const double xi = grid_.frequency(s);
      generator_[s] = {symbol_.eta * evaluate_phi(symbol_, xi), xi * xi * xi};
    }
    // The Nyquist slot stands for both +xi_N and -xi_N; the odd dispersive
    // part of the exponent averages out there.
    generator_[grid_.nyquist_slot()] = generator_[grid_.nyquist_slot()].real();
  }

  const DissipativeSymbol& symbol() const { return symbol_; }
  const GridSpec& grid() const { return grid_; }

  /// i xi^3 + eta Phi(xi) per slot.
  std::span<const Complex> generator() const { return generator_; }

  Complex multiplier(std::size_t slot, double t) const { return std::exp(generator_[slot] * t); }

  /// out[s] += weight * exp(lambda_s t) * in[s] for slots with |j| < mode_limit.
  void accumulate(std::span<const Complex> in, double t, Complex weight, std::span<Complex> out,
                  std::size_t mode_limit) const {
    const std::size_t n = grid_.n_points;
    const std::size_t lim = std::min(mode_limit, n / 2 + 1);
    auto body = [&](std::size_t s) {
      const Complex z = generator_[s] * t;
      if (z.real() < -700.0 || in[s] == Complex{}) return;
      const double mag = std::exp(z.real());
      out[s] += weight * Complex{mag * std::cos(z.imag()), mag * std::sin(z.imag())} * in[s];
    };
    for (std::size_t s = 0; s < lim; ++s) body(s);
    for (std::size_t s = n - lim + 1; s < n; ++s) {
      if (s > n / 2) body(s);
    }
  }

  void accumulate(std::span<const Complex> in, double t, Complex weight,
                  std::span<Complex> out) const {
    accumulate(in, t, weight, out, grid_.n_points / 2 + 1);
  }

  Spectrum propagate(std::span<const Complex> in, double t) const {
    Spectrum out(grid_.n_points);
    accumulate(in, t, 1.0, out);
    return out;
  }

 private:
  DissipativeSymbol symbol_;
  GridSpec grid_;
  Spectrum generator_;
};

namespace detail {
inline const Spectrum& spectrum_of(const SpectralField& f, Spectrum& storage) {
  if (f.spec.size() == f.grid.n_points) return f.spec;
  require_size(f.phys.size(), f.grid, "physical array");
  storage = analyze(f.grid, f.phys);
  return storage;
}
}  // namespace detail

inline SpectralField apply_semigroup(const Propagator& prop, const SpectralField& w0, double t) {
  if (t < 0.0) throw DomainError("semigroup not invertible for eta > 0: t must be >= 0");
  if (!(w0.grid == prop.grid())) throw StructuralError("field and propagator grids differ");
  Spectrum storage;
  const Spectrum& in = detail::spectrum_of(w0, storage);
  return inverse_transform(from_spectrum(prop.grid(), prop.propagate(in, t)));
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n).
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre needs n >= 1");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Breakpoints t (j / panels)^grading, j = 0..panels.
inline std::vector<double> graded_mesh(double t, std::size_t panels, double grading) {
  std::vector<double> b(panels + 1);
  for (std::size_t j = 0; j <= panels; ++j) {
    b[j] = t * std::pow(static_cast<double>(j) / static_cast<double>(panels), grading);
  }
  b.back() = t;
  return b;
}

inline constexpr std::size_t kNodesPerPanel = 4;

using Forcing = std::function<SpectralField(double)>;

/// int_0^t V(t - tau) forcing(tau) dtau by composite 4-point Gauss-Legendre on
/// the graded mesh t (j / panels)^grading.
inline SpectralField duhamel_integral(const Propagator& prop, const Forcing& forcing, double t,
                                      std::size_t panels = 16, double grading = 2.0) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("duhamel_integral needs t in (0, 1]");
  if (panels < 1) throw DomainError("duhamel_integral needs panels >= 1");
  if (!(grading >= 1.0)) throw DomainError("duhamel_integral needs grading >= 1");
  const auto rule = gauss_legendre(kNodesPerPanel);
  const auto mesh = graded_mesh(t, panels, grading);
  Spectrum acc(prop.grid().n_points);
  for (std::size_t m = 0; m < panels; ++m) {
    const double a = mesh[m], b = mesh[m + 1];
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < kNodesPerPanel; ++q) {
      const double tau = a + half * (1.0 + rule.nodes[q]);
      const SpectralField f = forcing(tau);
      if (!(f.grid == prop.grid())) {
        throw StructuralError("forcing returned a field on a different grid");
      }
      Spectrum storage;
      prop.accumulate(detail::spectrum_of(f, storage), t - tau, half * rule.weights[q], acc);
    }
  }
  return inverse_transform(from_spectrum(prop.grid(), std::move(acc)));
}

/// For each tau: sup over the grid frequencies of (1 + |xi|)^theta exp(eta tau Phi(xi)).
/// The maximizer must not sit on the edge of the frequency range.
inline std::vector<double> smoothing_norm_profile(const DissipativeSymbol& sym, double theta,
                                                  std::span<const double> taus,
                                                  const GridSpec& grid = GridSpec::verification()) {
  if (!(theta >= 0.0)) throw DomainError("smoothing_norm_profile needs theta >= 0");
  grid.validate();
  const std::size_t top = grid.n_points / 2;
  std::vector<double> phi(top + 1), lbr(top + 1);
  for (std::size_t j = 0; j <= top; ++j) {
    const double xi = grid.frequency_step() * static_cast<double>(j);
    phi[j] = sym.eta * std::max(evaluate_phi(sym, xi), evaluate_phi(sym, -xi));
    lbr[j] = theta * std::log1p(xi);
  }
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("smoothing_norm_profile needs tau in (0, 1]");
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= top; ++j) {
      const double v = lbr[j] + tau * phi[j];
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    if (arg >= top - 1) {
      std::ostringstream msg;
      msg << "maximizer of the smoothing multiplier at tau = " << tau
          << " lies on the edge of the frequency range (|xi| = " << grid.nyquist()
          << "); use a finer grid or a shorter period";
      throw ResolutionError(msg.str());
    }
    out.push_back(std::exp(best));
  }
  return out;
}

}  // namespace gkdv
