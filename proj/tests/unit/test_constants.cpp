#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gridruin/constants.hpp"
#include "gridruin/errors.hpp"
#include "gridruin/stats.hpp"
#include "oracles.hpp"

using namespace gridruin;
using namespace gridruin::constants;

namespace {

double combined(double a, double b) { return std::hypot(a, b); }

// E[ max(e^A, 1, e^B) / (e^A + 1 + e^B) ] / eta with A, B independent
// N(-eta, 2 eta): product trapezoid rule over standard normal coordinates.
double three_point_pickands_quadrature(double eta) {
  const double h = 0.01, lim = 9.0;
  const int n = static_cast<int>(2 * lim / h) + 1;
  const double sd = std::sqrt(2.0 * eta);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z1 = -lim + i * h;
    const double a = sd * z1 - eta;
    const double w1 = std::exp(-0.5 * z1 * z1);
    for (int j = 0; j < n; ++j) {
      const double z2 = -lim + j * h;
      const double b = sd * z2 - eta;
      const double m = std::max({a, 0.0, b});
      const double f = 1.0 / (std::exp(a - m) + std::exp(-m) + std::exp(b - m));
      total += w1 * std::exp(-0.5 * z2 * z2) * f;
    }
  }
  return total * h * h / (2.0 * std::numbers::pi) / eta;
}

}  // namespace

TEST(BermanRank, EtaWeightedAndCountRules) {
  EXPECT_EQ(berman_rank(0.5, 0, BermanThreshold::eta_weighted), 1);
  EXPECT_EQ(berman_rank(0.5, 1, BermanThreshold::eta_weighted), 3);  // k/eta = 2 exactly
  EXPECT_EQ(berman_rank(0.3, 1, BermanThreshold::eta_weighted), 4);  // k/eta = 3.33
  EXPECT_EQ(berman_rank(0.2, 2, BermanThreshold::eta_weighted), 11); // 2/0.2 rounds to 10
  EXPECT_EQ(berman_rank(0.1, 3, BermanThreshold::eta_weighted), 31);
  EXPECT_EQ(berman_rank(2.0, 1, BermanThreshold::eta_weighted), 1);  // 2*1 > 1
  EXPECT_EQ(berman_rank(2.0, 2, BermanThreshold::eta_weighted), 2);  // 2*1 = 2 is not > 2
  EXPECT_EQ(berman_rank(0.2, 2, BermanThreshold::count), 3);
  EXPECT_THROW(berman_rank(0.2, -1, BermanThreshold::count), ConfigError);
}

TEST(Functionals, TwoSidedPathShape) {
  RandomStream rng = make_rng(1, 0);
  std::vector<double> w;
  sample_two_sided(0.5, 4, rng, w);
  ASSERT_EQ(w.size(), 9u);
  EXPECT_EQ(w[4], 0.0);
  RandomStream rng2 = make_rng(1, 0);
  std::vector<double> one;
  sample_one_sided(0.5, 4, rng2, one);
  for (std::size_t j = 0; j < one.size(); ++j) EXPECT_EQ(one[j], w[4 + j]);
}

TEST(Functionals, PathwiseRelations) {
  std::vector<double> w, right;
  for (std::uint64_t id = 0; id < 2000; ++id) {
    RandomStream rng = make_rng(42, id);
    sample_two_sided(0.25, 40, rng, w);
    const PathValue dy = dy_ratio(w);
    ASSERT_GT(dy.value, 0.0);
    ASSERT_LE(dy.value, 1.0);
    // T = 0 window and m = 1 rank reproduce the Dieker-Yakir integrand exactly.
    ASSERT_EQ(parisian_ratio(w, 0).value, dy.value);
    ASSERT_EQ(berman_limit_ratio(w, 1).value, dy.value);
    // Longer windows can only lower the functional.
    double prev = dy.value;
    for (std::int64_t win : {1, 2, 4, 8}) {
      const double v = parisian_ratio(w, win).value;
      ASSERT_GT(v, 0.0);
      ASSERT_LE(v, prev);
      prev = v;
    }
    // Rank monotonicity.
    prev = dy.value;
    for (std::int64_t m = 2; m <= 6; ++m) {
      const double v = berman_limit_ratio(w, m).value;
      ASSERT_LE(v, prev);
      prev = v;
    }
    right.assign(w.begin() + 40, w.end());
    ASSERT_GE(diff_functional(right).value, 0.0);
    // Piterbarg: sup includes t = 0, and larger a lowers every exponent.
    double pit_prev = INFINITY;
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
      const double v = piterbarg_functional(right, 0.25, a).value;
      ASSERT_GE(v, 1.0);
      ASSERT_LE(v, pit_prev);
      pit_prev = v;
    }
  }
}

TEST(Functionals, ParisianWindowHandComputed) {
  const std::vector<double> w{0.0, -1.0, -0.5, -0.2, -3.0};
  // Windows of 2 points: mins -1, -1, -0.5, -3 -> best -0.5 starting at 2.
  const PathValue pv = parisian_ratio(w, 1);
  double sum = 0.0;
  for (double x : w) sum += std::exp(x);
  EXPECT_NEAR(pv.value, std::exp(-0.5) / sum, 1e-15);
  EXPECT_EQ(pv.extremal_index, 2u);
  EXPECT_THROW(parisian_ratio(w, 5), ConfigError);
}

TEST(Functionals, DiffFunctionalHandComputed) {
  EXPECT_NEAR(diff_functional(std::vector<double>{0.0, -1.0, -0.3}).value, 1.0 - std::exp(-0.3), 1e-15);
  EXPECT_EQ(diff_functional(std::vector<double>{0.0, 0.5, -0.3}).value, 0.0);
}

TEST(Functionals, BermanRankReductionMatchesZQuadrature) {
  std::vector<double> w;
  for (std::uint64_t id = 0; id < 100; ++id) {
    RandomStream rng = make_rng(8, id);
    sample_one_sided(0.5, 10, rng, w);  // S = 5, 11 points
    for (std::int64_t k : {0, 1, 2}) {
      const std::int64_t m = berman_rank(0.5, k, BermanThreshold::eta_weighted);
      const double closed = berman_finite(w, m).value;
      const double quad = oracle::berman_integral_quadrature(w, 0.5, k, 20);
      ASSERT_NEAR(closed, quad, 1e-10 * std::max(1.0, closed)) << id << " k=" << k;
    }
  }
}

TEST(PickandsDy, ThreePointTruncationMatchesQuadrature) {
  const double eta = 0.5;
  RunningStats s;
  std::vector<double> w;
  for (std::uint64_t id = 0; id < 200000; ++id) {
    RandomStream rng = make_rng(3, id);
    sample_two_sided(eta, 1, rng, w);
    s.add(dy_ratio(w).value / eta);
  }
  EXPECT_NEAR(s.mean(), three_point_pickands_quadrature(eta), 3.0 * s.std_error());
}

TEST(PickandsDy, BoundedByOne) {
  for (double eta : {0.1, 0.5, 2.0}) {
    const ConstantValue v = pickands_dy(eta, {20.0, 50000, 5, 0});
    EXPECT_GT(v.estimate, 0.0);
    EXPECT_LE(v.estimate, 1.0 + 3.0 * v.std_error) << eta;
    EXPECT_FALSE(v.boundary_warning());
  }
}

TEST(PickandsDy, InputValidation) {
  EXPECT_THROW(pickands_dy(0.5, {4.5, 100, 1, 0}), ConfigError);   // trunc < 5
  EXPECT_THROW(pickands_dy(0.3, {10.0, 100, 1, 0}), ConfigError);  // not a multiple
  EXPECT_THROW(pickands_dy(-1.0, {10.0, 100, 1, 0}), ConfigError);
  EXPECT_THROW(pickands_dy(0.5, {10.0, 0, 1, 0}), ConfigError);
}

TEST(PickandsDiff, AgreesWithDyRepresentation) {
  const ConstantValue dy = pickands_dy(0.5, {20.0, 100000, 17, 0});
  const ConstantValue diff = pickands_diff(0.5, {20.0, 100000, 18, 0});
  EXPECT_NEAR(dy.estimate, diff.estimate, 3.0 * combined(dy.std_error, diff.std_error));
}

// Reference values frozen from independent high-sample runs (seed 2024,
// n = 1e6) of the estimators themselves.
constexpr double kH05 = 0.560194, kH05Se = 0.000220;
constexpr double kP11 = 1.150216, kP11Se = 0.002002;
constexpr double kH05T1 = 0.204050, kH05T1Se = 0.000080;

TEST(PickandsDiff, RegressionFixture) {
  const ConstantValue v = pickands_diff(0.5, {20.0, 200000, 77, 0});
  EXPECT_NEAR(v.estimate, kH05, 3.0 * combined(v.std_error, kH05Se));
  EXPECT_LT(v.std_error, 0.003);
}

TEST(Piterbarg, AtLeastOneAndFixture) {
  const ConstantValue v = piterbarg(1.0, 1.0, {30.0, 200000, 78, 0});
  EXPECT_GE(v.estimate, 1.0 - 3.0 * v.std_error);
  EXPECT_NEAR(v.estimate, kP11, 3.0 * combined(v.std_error, kP11Se));
  EXPECT_LT(v.std_error, 0.005);
}

TEST(Piterbarg, NonincreasingInDriftOnSharedStreams) {
  double prev = INFINITY;
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const ConstantValue v = piterbarg(0.5, a, {20.0, 5000, 4, 0});
    EXPECT_LE(v.estimate, prev);
    prev = v.estimate;
  }
}

TEST(Piterbarg, WarnsForHeavyTail) {
  const ConstantValue v = piterbarg(1.0, 0.01, {5.0, 2000, 4, 0});
  EXPECT_FALSE(v.warnings.empty());
  EXPECT_TRUE(v.boundary_warning());
  EXPECT_THROW(piterbarg(1.0, 0.0, {5.0, 10, 4, 0}), ConfigError);
}

TEST(ParisianConstant, ZeroWindowEqualsPickandsOnSharedStreams) {
  const ConstantValue h = pickands_dy(0.5, {20.0, 20000, 9, 0});
  const ConstantValue p = parisian_constant(0.5, 0.0, {20.0, 20000, 9, 0});
  EXPECT_EQ(h.estimate, p.estimate);
  EXPECT_EQ(h.std_error, p.std_error);
}

TEST(ParisianConstant, DominatedByPickandsAndFixture) {
  const ConstantValue p = parisian_constant(0.5, 1.0, {25.0, 200000, 79, 0});
  const ConstantValue h = pickands_dy(0.5, {25.0, 200000, 79, 0});
  EXPECT_GT(p.estimate, 0.0);
  EXPECT_LE(p.estimate, h.estimate);
  EXPECT_NEAR(p.estimate, kH05T1, 3.0 * combined(p.std_error, kH05T1Se));
  EXPECT_LT(p.std_error, 0.003);
}

TEST(ParisianConstant, InputValidation) {
  EXPECT_THROW(parisian_constant(0.5, 0.75, {20.0, 10, 1, 0}), ConfigError);
  EXPECT_THROW(parisian_constant(0.5, 1.0, {5.5, 10, 1, 0}), ConfigError);
}

TEST(Berman, ZeroThresholdLimitMatchesPickands) {
  const ConstantValue b = berman_limit(0.5, 0, BermanThreshold::eta_weighted, {20.0, 20000, 9, 0});
  const ConstantValue h = pickands_dy(0.5, {20.0, 20000, 9, 0});
  EXPECT_EQ(b.estimate, h.estimate);
}

TEST(Berman, FiniteHorizonNonincreasingInK) {
  double prev = INFINITY;
  for (std::int64_t k : {0, 1, 2, 3}) {
    const ConstantValue v = berman(0.5, k, BermanThreshold::eta_weighted, {10.0, 5000, 6, 0});
    EXPECT_GT(v.estimate, 0.0);
    EXPECT_TRUE(std::isfinite(v.estimate));
    EXPECT_LE(v.estimate, prev);
    prev = v.estimate;
  }
}

TEST(Berman, LimitPositiveFiniteAndNonincreasing) {
  double prev = INFINITY;
  for (std::int64_t k : {0, 1, 2, 4}) {
    const ConstantValue v = berman_limit(0.2, k, BermanThreshold::count, {20.0, 10000, 6, 0});
    EXPECT_GT(v.estimate, 0.0);
    EXPECT_TRUE(std::isfinite(v.estimate));
    EXPECT_LE(v.estimate, prev);
    prev = v.estimate;
  }
}

TEST(Berman, RejectsTooShortHorizon) {
  // m = 5 grid points needed, only 2 on [0, 0.5] with eta = 0.5.
  EXPECT_THROW(berman(0.5, 2, BermanThreshold::eta_weighted, {0.5, 10, 1, 0}), ConfigError);
  EXPECT_THROW(berman(0.5, 1, BermanThreshold::eta_weighted, {0.75, 10, 1, 0}), ConfigError);
}

TEST(Berman, PlateauDiagnosticReportsEachHorizon) {
  const std::vector<double> horizons{5.0, 10.0};
  const BermanPlateau p = berman_plateau(0.5, 0, BermanThreshold::count, horizons, {0.0, 2000, 3, 0});
  ASSERT_EQ(p.values.size(), 2u);
  EXPECT_EQ(p.horizons[1], 10.0);
  const double gap = std::abs(p.values[1].estimate - p.values[0].estimate);
  EXPECT_EQ(p.plateau, gap < 2.0 * combined(p.values[0].std_error, p.values[1].std_error));
}

TEST(Estimators, DoublingSamplesHalvesVariance) {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const ConstantValue a = pickands_dy(1.0, {10.0, 4000, 100 + rep, 0});
    const ConstantValue b = pickands_dy(1.0, {10.0, 8000, 200 + rep, 0});
    const double ratio = b.std_error / a.std_error;
    EXPECT_GE(ratio, 0.6) << rep;
    EXPECT_LE(ratio, 0.85) << rep;
  }
}

TEST(ConstantForModel, ParameterCoupling) {
  const ConstantPrecision prec{20.0, 1000, 1, 0};
  const ModelParams p{1.0, 5.0};
  const Grid g(0.1);

  const ConstantKey classical = key_for_model(ConstantKind::pickands_dy, p, g, {}, prec);
  EXPECT_DOUBLE_EQ(classical.eta, 0.2);

  VariantParams refl;
  refl.gamma = 0.5;
  const ConstantKey pit = key_for_model(ConstantKind::piterbarg, p, g, refl, prec);
  EXPECT_DOUBLE_EQ(pit.a, 1.0);
  EXPECT_DOUBLE_EQ(pit.eta, 0.05);
  EXPECT_DOUBLE_EQ(key_for_model(ConstantKind::pickands_dy, p, g, refl, prec).eta, 0.2);

  VariantParams par;
  par.parisian_T = 0.5;
  const ConstantKey pk = key_for_model(ConstantKind::parisian, p, g, par, prec);
  EXPECT_DOUBLE_EQ(pk.eta, 0.2);
  EXPECT_DOUBLE_EQ(pk.T, 1.0);

  VariantParams cum;
  cum.cumulative_k = 2;
  const ConstantKey bk = key_for_model(ConstantKind::berman_limit, p, g, cum, prec);
  EXPECT_EQ(bk.k, 2);
  EXPECT_EQ(berman_rank(bk.eta, bk.k, bk.threshold), 3);

  // c enters squared: c = 2, delta = 0.05 -> eta = 0.4
  EXPECT_DOUBLE_EQ(key_for_model(ConstantKind::pickands_dy, {2.0, 1.0}, Grid(0.05), {}, prec).eta, 0.4);
}

TEST(ConstantForModel, TruncationRoundedToConstantGrid) {
  VariantParams refl;
  refl.gamma = 0.3;  // eta' = 2 * 0.49 * 0.1 = 0.098
  const ConstantKey k = key_for_model(ConstantKind::piterbarg, {1.0, 1.0}, Grid(0.1), refl, {20.0, 10, 1, 0});
  EXPECT_TRUE(grid_steps(k.trunc, k.eta).has_value());
  EXPECT_GE(k.trunc, 20.0);
  EXPECT_THROW(key_for_model(ConstantKind::piterbarg, {1.0, 1.0}, Grid(0.1), {}, {20.0, 10, 1, 0}), ConfigError);
}

TEST(ConstantForModel, EstimatesMappedConstant) {
  const ConstantValue v =
      constant_for_model(ConstantKind::pickands_dy, {1.0, 3.0}, Grid(0.1), {}, {20.0, 5000, 2, 0});
  const ConstantValue direct = pickands_dy(0.2, {20.0, 5000, 2, 0});
  EXPECT_EQ(v.estimate, direct.estimate);
}

TEST(ConstantKey, CanonicalAndValidation) {
  ConstantKey a;
  a.kind = ConstantKind::piterbarg;
  a.eta = 0.5;
  a.a = 1.0;
  a.trunc = 20.0;
  a.n_samples = 10;
  a.seed = 3;
  EXPECT_NO_THROW(a.validate());
  ConstantKey b = a;
  EXPECT_EQ(a.canonical(), b.canonical());
  b.seed = 4;
  EXPECT_NE(a.canonical(), b.canonical());
  b = a;
  b.a = 0.0;
  EXPECT_THROW(b.validate(), ConfigError);
  b = a;
  b.kind = ConstantKind::pickands_dy;
  EXPECT_THROW(b.validate(), ConfigError);  // a set on a kind that has none
  EXPECT_THROW(parse_constant_kind("nope"), ConfigError);
}
