#include <gtest/gtest.h>

#include <cmath>

#include "gkdv/symbols.hpp"

using namespace gkdv;

TEST(Symbols, BuiltinValues) {
  const auto ks = builtin_symbol("kdv-ks");
  EXPECT_DOUBLE_EQ(evaluate_phi(ks, 2.0), 4.0 - 16.0);
  EXPECT_DOUBLE_EQ(evaluate_phi(ks, -1.0), 0.0);
  const auto ost = builtin_symbol("ostrovsky");
  EXPECT_DOUBLE_EQ(evaluate_phi(ost, -2.0), 2.0 - 8.0);
  const auto kb = builtin_symbol("kdv-burgers");
  EXPECT_DOUBLE_EQ(evaluate_phi(kb, 3.0), -9.0);
  EXPECT_DOUBLE_EQ(builtin_symbol("pure-power", 1.0, 2.5).p, 2.5);
}

TEST(Symbols, OrdersAndConstants) {
  const auto ks = builtin_symbol("kdv-ks");
  EXPECT_EQ(ks.p, 4.0);
  EXPECT_EQ(ks.q, 2.0);
  const auto ost = builtin_symbol("ostrovsky");
  EXPECT_EQ(ost.p, 3.0);
  EXPECT_EQ(ost.q, 1.0);
}

TEST(Symbols, UnknownNameListsAvailable) {
  try {
    builtin_symbol("burgers");
    FAIL();
  } catch (const LookupError& e) {
    const std::string msg = e.what();
    for (const auto& n : builtin_symbol_names()) EXPECT_NE(msg.find(n), std::string::npos);
  }
}

TEST(Symbols, RejectsBadParameters) {
  EXPECT_THROW(pure_power_symbol(0.0), DomainError);
  EXPECT_THROW(builtin_symbol("kdv-ks", -1.0), DomainError);
  DissipativeSymbol bad{"bad", 2.0, 3.0, 1.0, [](double) { return 0.0; }, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Symbols, NonFinitePhi1IsAnEvaluationError) {
  DissipativeSymbol sym{"log", 2.0, 1.0, 1.0, [](double xi) { return std::log(std::abs(xi)); }, 1.0};
  EXPECT_THROW(evaluate_phi(sym, 0.0), EvaluationError);
}

TEST(Decomposition, BuiltinsSatisfyBound) {
  for (const auto& n : builtin_symbol_names()) {
    EXPECT_TRUE(validate_decomposition(builtin_symbol(n), 100.0, 2001).ok) << n;
  }
}

TEST(Decomposition, ViolationReportsFrequency) {
  DissipativeSymbol sym{"loose", 4.0, 2.0, 0.5, [](double xi) { return xi * xi; }, 1.0};
  const auto check = validate_decomposition(sym, 10.0, 101);
  EXPECT_FALSE(check.ok);
  ASSERT_TRUE(check.violating_xi.has_value());
  EXPECT_GT(std::abs(*check.violating_xi), 1.0);
}

TEST(Tabulated, InterpolatesAndClamps) {
  const auto sym = tabulated_symbol("tab", 4.0, 2.0, 1.0, 1.0, {{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}});
  EXPECT_DOUBLE_EQ(evaluate_phi1(sym, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(evaluate_phi1(sym, -1.5), 2.5);
  EXPECT_DOUBLE_EQ(evaluate_phi1(sym, 7.0), 4.0);
}

TEST(Tabulated, RejectsTableOutsideBound) {
  EXPECT_THROW(tabulated_symbol("tab", 4.0, 1.0, 1.0, 1.0, {{0.0, 0.0}, {3.0, 9.0}}), HypothesisError);
}

// Oracles: for xi^2 - xi^4 and |xi| - |xi|^3 the three conditions reduce to
// |xi|^{p-q} >= 2, so M = sqrt(2) in both cases; pure powers need |xi| > 1.
TEST(Threshold, KnownThresholds) {
  EXPECT_NEAR(threshold_M(builtin_symbol("kdv-ks"), 50.0, 1e-12), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(threshold_M(builtin_symbol("ostrovsky"), 50.0, 1e-12), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(threshold_M(pure_power_symbol(3.0), 50.0, 1e-12), 1.0, 1e-9);
}

// Oracles by calculus: max of x^2 - x^4 is 1/4 at x^2 = 1/2; max of x - x^3 is
// 2 / (3 sqrt 3) at x^2 = 1/3.
TEST(Threshold, UpperBoundsBelowThreshold) {
  EXPECT_NEAR(upper_bound_CM(builtin_symbol("kdv-ks"), std::sqrt(2.0)), 0.25, 1e-12);
  EXPECT_NEAR(upper_bound_CM(builtin_symbol("ostrovsky"), std::sqrt(2.0)), 2.0 / (3.0 * std::sqrt(3.0)),
              1e-12);
  EXPECT_NEAR(upper_bound_CM(pure_power_symbol(2.0), 1.0), 0.0, 1e-15);
}

TEST(Threshold, FailureAtRangeEndIsAHypothesisError) {
  EXPECT_THROW(threshold_M(builtin_symbol("kdv-ks"), 1.0, 1e-10), HypothesisError);
}

TEST(Threshold, ConstantsBundle) {
  const auto c = symbol_constants(builtin_symbol("kdv-ks"), 20.0);
  EXPECT_NEAR(c.threshold_m, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(c.c_m, 0.25, 1e-12);
  EXPECT_NEAR(c.sup_phi, 0.25, 1e-12);
}
