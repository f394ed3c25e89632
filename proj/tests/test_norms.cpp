#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gkdv/norms.hpp"
#include "gkdv/semigroup.hpp"

using namespace gkdv;

namespace {

const GridSpec kTorus{2.0 * std::numbers::pi, 64, 2.0 / 3.0};

SpectralField sine() {
  return forward_transform(sample_function(kTorus, [](double x) { return std::sin(x); }));
}

}  // namespace

// Exponent closed forms: gamma_k = (3k+2)/(2(k+1)), omega_k = (2p-3k-2)/(2p).
TEST(Exponents, ClosedForms) {
  EXPECT_DOUBLE_EQ(gamma_k(1.0), 5.0 / 4.0);
  EXPECT_DOUBLE_EQ(gamma_k(2.0), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(omega_k(1.0, 4.0), 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(omega_k(1.0, 3.0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(omega_k(2.0, 4.0), 0.0);
  EXPECT_TRUE(contraction_admissible(1.0, 4.0));
  EXPECT_FALSE(contraction_admissible(1.0, 2.0));
  EXPECT_FALSE(contraction_admissible(2.0, 4.0));
  EXPECT_THROW(gamma_k(0.0), DomainError);
  EXPECT_THROW(omega_k(1.0, -1.0), DomainError);
}

// ||sin||_{L^4}^4 on [0, 2 pi] = 3 pi / 4.
TEST(Lebesgue, SineFourthPower) {
  EXPECT_NEAR(lebesgue_norm(sine(), 4.0), std::pow(3.0 * std::numbers::pi / 4.0, 0.25), 1e-13);
  EXPECT_NEAR(lebesgue_norm(sine(), 2.0), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(lebesgue_norm(sine(), INFINITY), 1.0, 1e-3);
  EXPECT_THROW(lebesgue_norm(sine(), 0.5), DomainError);
}

// ||sin||_{H^s}^2 = pi (1 + 1)^{2s} with the bracket 1 + |xi|.
TEST(Sobolev, SineInHs) {
  for (double s : {-0.5, 0.0, 1.0, 2.5}) {
    EXPECT_NEAR(sobolev_norm(sine(), s), std::sqrt(std::numbers::pi) * std::pow(2.0, s), 1e-12) << s;
  }
}

TEST(Sobolev, AgreesWithPhysicalSideAtZero) {
  const auto f = forward_transform(sample_function(kTorus, [](double x) { return std::exp(std::cos(x)); }));
  EXPECT_NEAR(sobolev_norm(f, 0.0), lebesgue_norm(f, 2.0), 1e-12);
}

TEST(SampleTimes, LogSpaced) {
  const auto t = WeightedNormConfig::default_sample_times(0.5);
  ASSERT_EQ(t.size(), 20u);
  EXPECT_DOUBLE_EQ(t.front(), 0.5e-4);
  EXPECT_DOUBLE_EQ(t.back(), 0.5);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] / t[i - 1], std::pow(1e4, 1.0 / 19.0), 1e-12);
}

TEST(WeightedNorms, ConstantTrajectoryClosedForm) {
  // v(t) = sin x for all t, k = 1, s = 0: sup_t {sqrt(pi) + t^{5/16} 3 ||sin||_4}.
  auto cfg = WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0);
  const Trajectory traj = [](double) { return sine(); };
  const double l4 = std::pow(3.0 * std::numbers::pi / 4.0, 0.25);
  const auto x = x_norm(traj, cfg);
  EXPECT_NEAR(x.value, std::sqrt(std::numbers::pi) + 3.0 * l4, 1e-12);
  const auto y = y_norm(traj, cfg);
  EXPECT_NEAR(y.value, std::sqrt(std::numbers::pi) + 2.0 * l4, 1e-12);
  EXPECT_NEAR(x.h_s, std::sqrt(std::numbers::pi), 1e-12);
}

TEST(WeightedNorms, DerivativeComponentsCoincideAtSZero) {
  const auto cfg = WeightedNormConfig::make(0.0, 1.0, 3.0, 0.5);
  const Trajectory traj = [](double) { return sine(); };
  const auto r = x_norm(traj, cfg);
  for (std::size_t i = 0; i + 1 < r.components.size(); ++i) {
    if (r.components[i].name == "weighted_dx") {
      EXPECT_EQ(r.components[i + 1].name, "weighted_dsdx");
      EXPECT_NEAR(r.components[i].value, r.components[i + 1].value, 1e-12);
    }
  }
}

TEST(WeightedNorms, ComponentsListedPerSample) {
  const auto cfg = WeightedNormConfig::make(0.5, 1.0, 4.0, 1.0, 5);
  const Trajectory traj = [](double) { return sine(); };
  EXPECT_EQ(x_norm(traj, cfg).components.size(), 5u * 5u);
  EXPECT_EQ(y_norm(traj, cfg).components.size(), 5u * 4u);
}

TEST(WeightedNorms, Validation) {
  const Trajectory traj = [](double) { return sine(); };
  auto cfg = WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0);
  cfg.t_final = 2.0;
  EXPECT_THROW(x_norm(traj, cfg), DomainError);
  cfg = WeightedNormConfig::make(-1.5, 1.0, 4.0, 1.0);
  EXPECT_THROW(x_norm(traj, cfg), DomainError);
  cfg = WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0);
  cfg.sample_times = {0.5, 0.2};
  EXPECT_THROW(x_norm(traj, cfg), DomainError);
}

TEST(WeightedNorms, NonFiniteIsBlowUp) {
  const Trajectory traj = [](double) {
    auto f = sine();
    f.spec[1] = Complex{INFINITY, 0.0};
    f.spec[63] = Complex{INFINITY, 0.0};
    return f;
  };
  EXPECT_THROW(x_norm(traj, WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0)), BlowUpError);
}

TEST(ZNorms, OddExponentAndTildeWeight) {
  const Trajectory traj = [](double) { return sine(); };
  const auto cfg = WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0);
  // L^3 norm of sin on [0, 2 pi]: (8/3)^{1/3}
  EXPECT_NEAR(z_norm(traj, cfg), std::sqrt(std::numbers::pi) + std::cbrt(8.0 / 3.0), 1e-6);
  EXPECT_NEAR(z_tilde_norm(traj, cfg), 2.0 * std::sqrt(std::numbers::pi), 1e-12);
}

TEST(WeightedNorms, FreeEvolutionIsFinite) {
  const GridSpec g{40.0 * std::numbers::pi, 1024, 2.0 / 3.0};
  const Propagator prop(builtin_symbol("kdv-ks"), g);
  const auto w0 = forward_transform(sample_function(g, [](double x) { return std::exp(-x * x); }));
  const Trajectory traj = [&](double t) { return apply_semigroup(prop, w0, t); };
  const auto r = x_norm(traj, WeightedNormConfig::make(0.0, 1.0, 4.0, 1.0));
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GE(r.value, sobolev_norm(w0, 0.0) * 0.99);
}
