#pragma once

// Periodic grid, Fourier transform pair and Fourier multipliers.
//
// The whole line is replaced by the torus [-L/2, L/2) sampled at
// x_n = -L/2 + n h, h = L / N.  Coefficients are those of the Fourier series
//
//     f(x) = sum_j c_j exp(i xi_j x),   xi_j = 2 pi j / L,
//
// so the forward transform carries the 1/N factor and the origin shift
// (-1)^j.  With this convention
//
//     ||f||_{L^2}^2 = h sum_n |f(x_n)|^2 = L sum_j |c_j|^2.
//
// Spectra are stored in FFT order: slot s holds j = s for s < N/2 and
// j = s - N otherwise.  Slot N/2 is the Nyquist mode j = -N/2.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/fft.hpp"

namespace gkdv {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

struct GridSpec {
  double length = 200.0 * std::numbers::pi;
  std::size_t n_points = 8192;
  double dealias_fraction = 2.0 / 3.0;

  /// The grid used by the verification runs.
  static GridSpec verification() { return {}; }

  void validate() const {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw DomainError("grid length must be positive and finite");
    }
    if (n_points < 4 || !std::has_single_bit(n_points)) {
      throw DomainError("n_points must be a power of two >= 4, got " + std::to_string(n_points));
    }
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
      throw DomainError("dealias_fraction must lie in (0, 1]");
    }
    if (dealias_cutoff() < 1) throw DomainError("dealias cutoff rounds to zero");
  }

  double spacing() const { return length / static_cast<double>(n_points); }
  double frequency_step() const { return 2.0 * std::numbers::pi / length; }
  double nyquist() const { return frequency_step() * static_cast<double>(n_points / 2); }
  std::size_t nyquist_slot() const { return n_points / 2; }

  std::ptrdiff_t mode_index(std::size_t slot) const {
    const auto s = static_cast<std::ptrdiff_t>(slot);
    const auto n = static_cast<std::ptrdiff_t>(n_points);
    return s < n / 2 ? s : s - n;
  }
  std::size_t slot_of(std::ptrdiff_t j) const {
    const auto n = static_cast<std::ptrdiff_t>(n_points);
    return static_cast<std::size_t>(j < 0 ? j + n : j);
  }
  double frequency(std::size_t slot) const {
    return frequency_step() * static_cast<double>(mode_index(slot));
  }

  std::vector<double> frequencies() const {
    std::vector<double> xi(n_points);
    for (std::size_t s = 0; s < n_points; ++s) xi[s] = frequency(s);
    return xi;
  }

  std::vector<double> points() const {
    std::vector<double> x(n_points);
    for (std::size_t n = 0; n < n_points; ++n) {
      x[n] = -0.5 * length + spacing() * static_cast<double>(n);
    }
    return x;
  }

  /// Modes with |j| >= cutoff are removed by dealias().
  std::size_t dealias_cutoff() const {
    return static_cast<std::size_t>(
        std::lround(dealias_fraction * static_cast<double>(n_points / 2)));
  }

  bool operator==(const GridSpec&) const = default;
};

/// A real periodic field.  `coherent` records that `phys` and `spec` describe
/// the same function; operations that only fill one side clear it.
struct SpectralField {
  GridSpec grid;
  std::vector<double> phys;
  Spectrum spec;
  bool coherent = false;
};

inline SpectralField zero_field(const GridSpec& grid) {
  return {grid, std::vector<double>(grid.n_points, 0.0), Spectrum(grid.n_points), true};
}

inline SpectralField from_samples(const GridSpec& grid, std::vector<double> samples) {
  return {grid, std::move(samples), {}, false};
}

inline SpectralField from_spectrum(const GridSpec& grid, Spectrum spec) {
  return {grid, {}, std::move(spec), false};
}

template <class F>
  requires std::invocable<F, double>
SpectralField sample_function(const GridSpec& grid, F&& f) {
  std::vector<double> v(grid.n_points);
  const auto x = grid.points();
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<double>(f(x[n]));
  return from_samples(grid, std::move(v));
}

namespace detail {

inline double origin_phase(std::size_t slot) { return (slot % 2 == 0) ? 1.0 : -1.0; }

inline void require_size(std::size_t got, const GridSpec& grid, const char* what) {
  if (got != grid.n_points) {
    std::ostringstream msg;
    msg << what << " has " << got << " entries but the grid has n_points = " << grid.n_points;
    throw StructuralError(msg.str());
  }
}

/// Largest Hermitian defect of `spec`, relative to its largest coefficient.
inline double hermitian_defect(std::span<const Complex> spec) {
  const std::size_t n = spec.size();
  double scale = 0.0;
  for (const auto& c : spec) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double defect = std::max(std::abs(spec[0].imag()), std::abs(spec[n / 2].imag()));
  for (std::size_t s = 1; s < n / 2; ++s) {
    defect = std::max(defect, std::abs(spec[s] - std::conj(spec[n - s])));
  }
  return defect / scale;
}

inline constexpr double kHermitianTolerance = 1e-10;

/// Physical samples of a Hermitian spectrum.  No symmetry check.
inline std::vector<double> synthesize(const GridSpec& grid, std::span<const Complex> spec) {
  const std::size_t n = grid.n_points;
  Spectrum half(n / 2 + 1);
  for (std::size_t s = 0; s <= n / 2; ++s) half[s] = origin_phase(s) * spec[s];
  std::vector<double> out(n);
  RealFft::get(n).backward(half, out);
  return out;
}

inline Spectrum analyze(const GridSpec& grid, std::span<const double> samples) {
  const std::size_t n = grid.n_points;
  Spectrum half(n / 2 + 1);
  RealFft::get(n).forward(samples, half);
  Spectrum spec(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s <= n / 2; ++s) spec[s] = origin_phase(s) * inv_n * half[s];
  for (std::size_t s = n / 2 + 1; s < n; ++s) spec[s] = std::conj(spec[n - s]);
  return spec;
}

}  // namespace detail

inline SpectralField forward_transform(const SpectralField& f) {
  f.grid.validate();
  detail::require_size(f.phys.size(), f.grid, "physical array");
  SpectralField out{f.grid, f.phys, detail::analyze(f.grid, f.phys), true};
  return out;
}

inline SpectralField inverse_transform(const SpectralField& f) {
  f.grid.validate();
  detail::require_size(f.spec.size(), f.grid, "spectral array");
  const double defect = detail::hermitian_defect(f.spec);
  if (defect > detail::kHermitianTolerance) {
    throw SymmetryError("spectrum is not Hermitian (relative defect " + std::to_string(defect) +
                        "); it does not describe a real field");
  }
  SpectralField out{f.grid, detail::synthesize(f.grid, f.spec), f.spec, true};
  // Pin the self-conjugate modes to the real values the synthesis used.
  out.spec[0] = out.spec[0].real();
  out.spec[f.grid.nyquist_slot()] = out.spec[f.grid.nyquist_slot()].real();
  return out;
}

/// Makes sure both representations are present.
inline SpectralField coherent(SpectralField f) {
  if (f.coherent) return f;
  if (f.spec.size() == f.grid.n_points) return inverse_transform(f);
  return forward_transform(f);
}

/// Multiplies every coefficient by m(xi).  The self-conjugate Nyquist slot
/// only carries the cosine mode, so it receives Re[(m(xi_N) + m(-xi_N)) / 2];
/// this is what keeps the output real.
template <class M>
  requires std::invocable<M, double>
SpectralField apply_multiplier(const SpectralField& f, M&& m) {
  f.grid.validate();
  if (f.spec.size() != f.grid.n_points) {
    throw StructuralError("apply_multiplier needs a populated spectrum");
  }
  const auto& grid = f.grid;
  Spectrum out(grid.n_points);
  const std::size_t nyq = grid.nyquist_slot();
  auto eval = [&](double xi) {
    const Complex v = m(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "multiplier is not finite at xi = " << xi;
      throw EvaluationError(msg.str());
    }
    return v;
  };
  for (std::size_t s = 0; s < grid.n_points; ++s) {
    const double xi = grid.frequency(s);
    if (s == nyq) {
      out[s] = 0.5 * (eval(xi) + eval(-xi)).real() * f.spec[s];
    } else {
      out[s] = eval(xi) * f.spec[s];
    }
  }
  return inverse_transform(from_spectrum(grid, std::move(out)));
}

/// D_x^s d_x, i.e. the multiplier i sgn(xi) |xi|^{s+1}, set to zero at xi = 0.
inline SpectralField fractional_derivative_shifted(const SpectralField& f, double s) {
  if (!(s > -1.0)) throw DomainError("fractional_derivative_shifted needs s > -1");
  return apply_multiplier(f, [s](double xi) -> Complex {
    if (xi == 0.0) return {0.0, 0.0};
    const double sgn = xi > 0.0 ? 1.0 : -1.0;
    return {0.0, sgn * std::pow(std::abs(xi), s + 1.0)};
  });
}

inline SpectralField derivative(const SpectralField& f) {
  return fractional_derivative_shifted(f, 0.0);
}

/// J^s with the bracket 1 + |xi|.
inline SpectralField bessel_potential(const SpectralField& f, double s) {
  return apply_multiplier(f, [s](double xi) -> Complex { return std::pow(1.0 + std::abs(xi), s); });
}

inline void dealias_in_place(const GridSpec& grid, std::span<Complex> spec) {
  const auto cutoff = static_cast<std::ptrdiff_t>(grid.dealias_cutoff());
  for (std::size_t s = 0; s < spec.size(); ++s) {
    if (std::abs(grid.mode_index(s)) >= cutoff) spec[s] = 0.0;
  }
}

inline SpectralField dealias(const SpectralField& f) {
  f.grid.validate();
  if (f.spec.size() != f.grid.n_points) throw StructuralError("dealias needs a spectrum");
  Spectrum spec = f.spec;
  dealias_in_place(f.grid, spec);
  return inverse_transform(from_spectrum(f.grid, std::move(spec)));
}

/// L sum |c_j|^2, the squared L^2 norm evaluated on the spectral side.
inline double spectral_energy(const GridSpec& grid, std::span<const Complex> spec) {
  double acc = 0.0;
  for (const auto& c : spec) acc += std::norm(c);
  return grid.length * acc;
}

inline double physical_energy(const GridSpec& grid, std::span<const double> phys) {
  double acc = 0.0;
  for (double v : phys) acc += v * v;
  return grid.spacing() * acc;
}

}  // namespace gkdv
