#pragma once

// Dissipative symbols Phi(xi) = -|xi|^p + Phi_1(xi) with |Phi_1| <= C (1 + |xi|^q),
// and the constants M (threshold) and C_M (upper bound below the threshold).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gkdv/errors.hpp"

namespace gkdv {

struct DissipativeSymbol {
  std::string name;
  double p = 2.0;       ///< leading order
  double q = 0.0;       ///< order of Phi_1, q < p
  double c_phi1 = 0.0;  ///< C in |Phi_1(xi)| <= C (1 + |xi|^q)
  std::function<double(double)> phi1;
  double eta = 1.0;

  void validate() const {
    if (!(p > 0.0)) throw DomainError("symbol " + name + ": p must be positive");
    if (!(q >= 0.0 && q < p)) throw DomainError("symbol " + name + ": need 0 <= q < p");
    if (!(c_phi1 >= 0.0)) throw DomainError("symbol " + name + ": c_phi1 must be >= 0");
    if (!(eta > 0.0)) throw DomainError("symbol " + name + ": eta must be positive");
    if (!phi1) throw DomainError("symbol " + name + ": missing Phi_1");
  }
};

inline double evaluate_phi1(const DissipativeSymbol& sym, double xi) {
  if (!std::isfinite(xi)) throw DomainError("evaluate_phi: xi is not finite");
  const double v = sym.phi1(xi);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "symbol " << sym.name << ": Phi_1(" << xi << ") is not finite";
    throw EvaluationError(msg.str());
  }
  return v;
}

inline double evaluate_phi(const DissipativeSymbol& sym, double xi) {
  const double v = evaluate_phi1(sym, xi);
  return -std::pow(std::abs(xi), sym.p) + v;
}

inline DissipativeSymbol pure_power_symbol(double p, double eta = 1.0) {
  DissipativeSymbol sym{"pure-power", p, 0.0, 0.0, [](double) { return 0.0; }, eta};
  sym.validate();
  return sym;
}

inline std::vector<std::string> builtin_symbol_names() {
  return {"kdv-burgers", "ostrovsky", "kdv-ks", "pure-power"};
}

/// Built-in symbols.  `p` is only read for "pure-power".
///
///   kdv-burgers  -eta v_xx                     Phi = -xi^2
///   ostrovsky    -eta (H v_x + H v_xxx)        Phi = |xi| - |xi|^3
///   kdv-ks       eta (v_xx + v_xxxx)           Phi = xi^2 - xi^4
///   pure-power                                 Phi = -|xi|^p
inline DissipativeSymbol builtin_symbol(std::string_view name, double eta = 1.0, double p = 2.0) {
  DissipativeSymbol sym;
  if (name == "kdv-burgers") {
    sym = {"kdv-burgers", 2.0, 0.0, 0.0, [](double) { return 0.0; }, eta};
  } else if (name == "ostrovsky") {
    sym = {"ostrovsky", 3.0, 1.0, 1.0, [](double xi) { return std::abs(xi); }, eta};
  } else if (name == "kdv-ks") {
    sym = {"kdv-ks", 4.0, 2.0, 1.0, [](double xi) { return xi * xi; }, eta};
  } else if (name == "pure-power") {
    sym = pure_power_symbol(p, eta);
  } else {
    std::string known;
    for (const auto& n : builtin_symbol_names()) known += (known.empty() ? "" : ", ") + n;
    throw LookupError("unknown symbol '" + std::string(name) + "'; available: " + known);
  }
  sym.validate();
  return sym;
}

struct DecompositionCheck {
  bool ok = true;
  std::optional<double> violating_xi;
  explicit operator bool() const { return ok; }
};

/// Checks |Phi_1(xi)| <= c_phi1 (1 + |xi|^q) on n_samples points of [0, xi_max].
inline DecompositionCheck validate_decomposition(const DissipativeSymbol& sym, double xi_max,
                                                 std::size_t n_samples) {
  if (!(xi_max > 0.0)) throw DomainError("validate_decomposition needs xi_max > 0");
  if (n_samples < 2) throw DomainError("validate_decomposition needs n_samples >= 2");
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double xi = xi_max * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double bound = sym.c_phi1 * (1.0 + std::pow(xi, sym.q));
    for (double x : {xi, -xi}) {
      if (std::abs(evaluate_phi1(sym, x)) > bound * (1.0 + 1e-14)) return {false, x};
    }
  }
  return {};
}

/// Symbol whose Phi_1 is a table of (|xi|, Phi_1) pairs, linearly interpolated
/// in |xi| and held constant beyond the ends.  The supplied (p, q, C) are
/// checked against the table.
inline DissipativeSymbol tabulated_symbol(std::string name, double p, double q, double c_phi1,
                                          double eta,
                                          std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw DomainError("tabulated symbol needs at least two entries");
  std::sort(table.begin(), table.end());
  for (const auto& [xi, v] : table) {
    if (!(xi >= 0.0) || !std::isfinite(v)) {
      throw DomainError("tabulated symbol entries need xi >= 0 and finite values");
    }
  }
  auto phi1 = [table](double xi) {
    const double a = std::abs(xi);
    if (a <= table.front().first) return table.front().second;
    if (a >= table.back().first) return table.back().second;
    auto hi = std::upper_bound(table.begin(), table.end(), a,
                               [](double v, const auto& e) { return v < e.first; });
    auto lo = hi - 1;
    const double w = (a - lo->first) / (hi->first - lo->first);
    return (1.0 - w) * lo->second + w * hi->second;
  };
  DissipativeSymbol sym{std::move(name), p, q, c_phi1, std::move(phi1), eta};
  sym.validate();
  for (const auto& [xi, v] : table) {
    if (std::abs(v) > c_phi1 * (1.0 + std::pow(xi, q)) * (1.0 + 1e-14)) {
      std::ostringstream msg;
      msg << "tabulated symbol " << sym.name << " violates |Phi_1| <= C(1+|xi|^q) at xi = " << xi;
      throw HypothesisError(msg.str());
    }
  }
  return sym;
}

/// The three large-frequency conditions: Phi < -1, |Phi_1|/|xi|^p <= 1/2 and
/// |Phi| >= |xi|^p / 2.
inline bool threshold_conditions_hold(const DissipativeSymbol& sym, double xi) {
  const double a = std::abs(xi);
  const double lead = std::pow(a, sym.p);
  const double phi1 = evaluate_phi1(sym, xi);
  const double phi = -lead + phi1;
  if (!(phi < -1.0)) return false;
  if (lead == 0.0 ? phi1 != 0.0 : std::abs(phi1) / lead > 0.5) return false;
  return std::abs(phi) >= 0.5 * lead;
}

namespace detail {
inline bool threshold_conditions_both_signs(const DissipativeSymbol& sym, double xi) {
  return threshold_conditions_hold(sym, xi) && threshold_conditions_hold(sym, -xi);
}
}  // namespace detail

/// Smallest M such that the threshold conditions hold at every sampled
/// |xi| in [M, xi_max]; scan of n_scan points, then bisection to `tol`.
inline double threshold_M(const DissipativeSymbol& sym, double xi_max, double tol,
                          std::size_t n_scan = 20001) {
  if (!(xi_max > 0.0) || !(tol > 0.0)) throw DomainError("threshold_M needs xi_max, tol > 0");
  if (!detail::threshold_conditions_both_signs(sym, xi_max)) {
    std::ostringstream msg;
    msg << "symbol " << sym.name << " fails the large-frequency conditions at xi_max = "
        << xi_max << "; not admissible on this range";
    throw HypothesisError(msg.str());
  }
  const double step = xi_max / static_cast<double>(n_scan - 1);
  std::size_t i = n_scan - 1;
  while (i > 0 && detail::threshold_conditions_both_signs(sym, step * static_cast<double>(i - 1))) {
    --i;
  }
  if (i == 0) return 0.0;
  double lo = step * static_cast<double>(i - 1);  // fails
  double hi = step * static_cast<double>(i);      // holds
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (detail::threshold_conditions_both_signs(sym, mid) ? hi : lo) = mid;
  }
  return hi;
}

/// sup of Phi over |xi| <= m: dense sampling, then golden-section refinement
/// around the best sample.
inline double upper_bound_CM(const DissipativeSymbol& sym, double m, std::size_t n_samples = 20001) {
  if (!(m > 0.0)) throw DomainError("upper_bound_CM needs m > 0");
  const double step = m / static_cast<double>(n_samples - 1);
  double best = -std::numeric_limits<double>::infinity();
  double best_xi = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double xi = step * static_cast<double>(i);
    for (double x : {xi, -xi}) {
      const double v = evaluate_phi(sym, x);
      if (v > best) {
        best = v;
        best_xi = x;
      }
    }
  }
  double a = std::max(-m, best_xi - step);
  double b = std::min(m, best_xi + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + std::abs(best_xi)); ++it) {
    if (evaluate_phi(sym, c) > evaluate_phi(sym, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return std::max(best, evaluate_phi(sym, 0.5 * (a + b)));
}

struct SymbolConstants {
  double threshold_m = 0.0;
  double c_m = 0.0;
  double sup_phi = 0.0;
};

inline SymbolConstants symbol_constants(const DissipativeSymbol& sym, double xi_max,
                                        double tol = 1e-10) {
  SymbolConstants out;
  out.threshold_m = threshold_M(sym, xi_max, tol);
  out.c_m = upper_bound_CM(sym, std::max(out.threshold_m, tol));
  out.sup_phi = upper_bound_CM(sym, xi_max);
  return out;
}

}  // namespace gkdv
