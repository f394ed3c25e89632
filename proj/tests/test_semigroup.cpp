#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gkdv/semigroup.hpp"

using namespace gkdv;

namespace {

GridSpec grid(std::size_t n = 256, double length = 20.0 * std::numbers::pi) { return {length, n, 2.0 / 3.0}; }

SpectralField bump(const GridSpec& g) {
  return forward_transform(sample_function(g, [](double x) { return std::exp(-x * x) * (1.0 + x); }));
}

}  // namespace

TEST(Propagator, GeneratorMatchesSymbol) {
  const auto g = grid();
  const auto sym = builtin_symbol("kdv-ks", 0.5);
  const Propagator prop(sym, g);
  const double xi = g.frequency(3);
  EXPECT_DOUBLE_EQ(prop.generator()[3].real(), 0.5 * (xi * xi - xi * xi * xi * xi));
  EXPECT_DOUBLE_EQ(prop.generator()[3].imag(), xi * xi * xi);
  EXPECT_EQ(prop.generator()[g.nyquist_slot()].imag(), 0.0);
}

TEST(Propagator, SingleModeExact) {
  // V(t) e^{i xi x} = exp(i t xi^3 + t Phi(xi)) e^{i xi x}
  const auto g = grid(64, 2.0 * std::numbers::pi);
  const auto sym = builtin_symbol("kdv-burgers");
  const Propagator prop(sym, g);
  const auto f = forward_transform(sample_function(g, [](double x) { return std::cos(2.0 * x); }));
  const auto v = apply_semigroup(prop, f, 0.1);
  const auto x = g.points();
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(v.phys[i], std::exp(-0.4) * std::cos(2.0 * x[i] + 0.8), 1e-13);
  }
}

TEST(Propagator, TimeZeroIsIdentity) {
  const auto g = grid();
  const Propagator prop(builtin_symbol("ostrovsky"), g);
  const auto f = bump(g);
  const auto v = apply_semigroup(prop, f, 0.0);
  for (std::size_t i = 0; i < f.phys.size(); ++i) EXPECT_NEAR(v.phys[i], f.phys[i], 1e-14);
}

TEST(Propagator, Errors) {
  const auto g = grid();
  const Propagator prop(builtin_symbol("kdv-ks"), g);
  EXPECT_THROW(apply_semigroup(prop, bump(g), -1e-3), DomainError);
  EXPECT_THROW(apply_semigroup(prop, bump(grid(128)), 0.1), StructuralError);
}

TEST(Quadrature, GaussLegendreNodesAndWeights) {
  const auto r = gauss_legendre(4);
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  EXPECT_NEAR(r.nodes[0], -b, 1e-15);
  EXPECT_NEAR(r.nodes[1], -a, 1e-15);
  EXPECT_NEAR(r.weights[0], (18.0 - std::sqrt(30.0)) / 36.0, 1e-15);
  EXPECT_NEAR(r.weights[1], (18.0 + std::sqrt(30.0)) / 36.0, 1e-15);
  // exact for degree 7
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += r.weights[i] * std::pow(r.nodes[i], 6);
  EXPECT_NEAR(acc, 2.0 / 7.0, 1e-15);
}

TEST(Quadrature, GradedMesh) {
  const auto m = graded_mesh(2.0, 4, 2.0);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_DOUBLE_EQ(m[1], 2.0 / 16.0);
  EXPECT_DOUBLE_EQ(m[4], 2.0);
}

TEST(Duhamel, ConstantForcingClosedForm) {
  // int_0^t exp(lambda (t - tau)) dtau = (exp(lambda t) - 1) / lambda per mode.
  const auto g = grid(64, 2.0 * std::numbers::pi);
  const auto sym = builtin_symbol("kdv-ks");
  const Propagator prop(sym, g);
  const auto f = forward_transform(sample_function(g, [](double x) { return std::sin(x) + 0.3 * std::cos(2.0 * x); }));
  const double t = 0.5;
  const auto d = duhamel_integral(prop, [&](double) { return f; }, t);
  for (std::size_t s = 0; s < g.n_points; ++s) {
    const Complex lam = prop.generator()[s];
    const Complex expect = lam == Complex{} ? t * f.spec[s] : (std::exp(lam * t) - 1.0) / lam * f.spec[s];
    EXPECT_NEAR(std::abs(d.spec[s] - expect), 0.0, 1e-11) << s;
  }
}

TEST(Duhamel, Errors) {
  const auto g = grid();
  const Propagator prop(builtin_symbol("kdv-ks"), g);
  const auto f = bump(g);
  EXPECT_THROW(duhamel_integral(prop, [&](double) { return f; }, 1.5), DomainError);
  EXPECT_THROW(duhamel_integral(prop, [&](double) { return bump(grid(128)); }, 0.5), StructuralError);
}

TEST(Profile, ZeroThetaIsFlat) {
  const std::vector<double> taus{1e-4, 1e-3, 1e-2};
  const auto prof = smoothing_norm_profile(pure_power_symbol(2.0), 0.0, taus);
  for (double v : prof) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Profile, MatchesContinuumMaximum) {
  // For Phi = -xi^2, theta = 1, tau = 0.01 the maximizer of log(1+x) - tau x^2
  // solves 2 tau x (1 + x) = 1.
  const double tau = 0.01;
  const double x = (-1.0 + std::sqrt(1.0 + 2.0 / tau)) / 2.0;
  const double expect = (1.0 + x) * std::exp(-tau * x * x);
  const std::vector<double> taus{tau};
  const auto prof = smoothing_norm_profile(pure_power_symbol(2.0), 1.0, taus);
  EXPECT_NEAR(prof[0] / expect, 1.0, 1e-5);
}

TEST(Profile, EdgeMaximizerIsAResolutionError) {
  const std::vector<double> taus{1e-6};
  EXPECT_THROW(smoothing_norm_profile(pure_power_symbol(2.0), 2.0, taus), ResolutionError);
}
