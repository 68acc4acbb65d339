#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "gridruin/analytic.hpp"
#include "gridruin/asymptotics.hpp"
#include "gridruin/constant_cache.hpp"

using namespace gridruin;
using namespace gridruin::asymptotics;
using constants::ConstantKind;
using constants::ConstantValue;

namespace {

ConstantValue fixed(double est, double se = 0.0) {
  ConstantValue v;
  v.estimate = est;
  v.std_error = se;
  return v;
}

}  // namespace

TEST(Approx, UnitConstantGivesExponentialTail) {
  FixedSource src;
  src.set(ConstantKind::pickands_dy, fixed(1.0));
  const ModelParams p{1.5, 2.0};
  const Approximation a = approx(Variant::classical, p, Grid(0.1), {}, src);
  EXPECT_DOUBLE_EQ(a.value, std::exp(-2.0 * 1.5 * 2.0));
  EXPECT_EQ(a.std_error, 0.0);
  ASSERT_EQ(a.keys.size(), 1u);
  EXPECT_DOUBLE_EQ(a.keys[0].eta, 2.0 * 1.5 * 1.5 * 0.1);
}

TEST(Approx, ReflectedMultipliesConstantsAndPropagatesErrors) {
  FixedSource src;
  src.set(ConstantKind::pickands_dy, fixed(0.5, 0.005));
  src.set(ConstantKind::piterbarg, fixed(2.0, 0.04));
  VariantParams vp;
  vp.gamma = 0.5;
  const ModelParams p{1.0, 3.0};
  const Approximation a = approx(Variant::reflected, p, Grid(0.1), vp, src);
  const double tail = analytic::psi_inf(p);
  EXPECT_DOUBLE_EQ(a.value, 1.0 * tail);
  EXPECT_NEAR(a.std_error, a.value * std::hypot(0.01, 0.02), 1e-15);
  ASSERT_EQ(a.keys.size(), 2u);
  EXPECT_DOUBLE_EQ(a.keys[0].a, 1.0);

  // Piterbarg >= 1 makes the reflected approximation dominate the classical one.
  const Approximation cl = approx(Variant::classical, p, Grid(0.1), {}, src);
  EXPECT_GE(a.value, cl.value);
}

TEST(Approx, DecreasingInCapital) {
  FixedSource src;
  src.set(ConstantKind::parisian, fixed(0.3));
  VariantParams vp;
  vp.parisian_T = 0.2;
  double prev = INFINITY;
  for (double u : {1.0, 2.0, 5.0, 10.0}) {
    const double v = approx(Variant::parisian, {1.0, u}, Grid(0.1), vp, src).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Approx, ZeroWindowAndZeroCountReduceToClassical) {
  EstimatingSource src({20.0, 4000, 3, 1});
  const ModelParams p{1.0, 4.0};
  const Grid g(0.1);
  const Approximation cl = approx(Variant::classical, p, g, {}, src);

  VariantParams par;
  par.parisian_T = 0.0;
  EXPECT_EQ(approx(Variant::parisian, p, g, par, src).value, cl.value);

  VariantParams cum;
  cum.cumulative_k = 0;
  EXPECT_EQ(approx(Variant::cumulative, p, g, cum, src).value, cl.value);
}

TEST(Approx, MissingInputsRejected) {
  FixedSource src;
  EXPECT_THROW(approx(Variant::classical, {1.0, 1.0}, Grid(0.1), {}, src), ConfigError);
  src.set(ConstantKind::pickands_dy, fixed(0.7));
  EXPECT_THROW(approx(Variant::reflected, {1.0, 1.0}, Grid(0.1), {}, src), ConfigError);
}

TEST(EstimatingSourceCache, SecondLookupIsCached) {
  const auto path = std::filesystem::temp_directory_path() / "gridruin_asym_cache.jsonl";
  std::filesystem::remove(path);
  {
    ConstantCache cache(path);
    EstimatingSource src({20.0, 2000, 3, 1}, &cache);
    const Approximation first = approx(Variant::classical, {1.0, 2.0}, Grid(0.1), {}, src);
    const Approximation second = approx(Variant::classical, {1.0, 5.0}, Grid(0.1), {}, src);
    EXPECT_FALSE(first.constants_used[0].cached);
    EXPECT_TRUE(second.constants_used[0].cached);
    EXPECT_EQ(first.constants_used[0].estimate, second.constants_used[0].estimate);
  }
  std::filesystem::remove(path);
}

TEST(ValidateRatio, StubbedMonteCarloGivesUnitRatio) {
  FixedSource src;
  src.set(ConstantKind::pickands_dy, fixed(0.69, 0.0069));
  const Grid g(0.1);
  const McSource mc = [&](double u) {
    Estimate e;
    e.value = 0.69 * std::exp(-2.0 * u);
    e.std_error = 0.02 * e.value;
    return e;
  };
  const std::vector<double> us{2.0, 4.0, 8.0};
  const auto rows = validate_ratio(Variant::classical, 1.0, us, g, {}, src, mc);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].u, us[i]);
    EXPECT_NEAR(rows[i].ratio, 1.0, 1e-14);
    EXPECT_NEAR(rows[i].ratio_se, std::hypot(0.02, 0.01), 1e-14);
  }
}

TEST(ValidateRatio, RequiresIncreasingCapital) {
  FixedSource src;
  src.set(ConstantKind::pickands_dy, fixed(0.69));
  const McSource mc = [](double) { return Estimate{}; };
  const std::vector<double> us{4.0, 2.0};
  EXPECT_THROW(validate_ratio(Variant::classical, 1.0, us, Grid(0.1), {}, src, mc), ConfigError);
  const std::vector<double> dup{2.0, 2.0};
  EXPECT_THROW(validate_ratio(Variant::classical, 1.0, dup, Grid(0.1), {}, src, mc), ConfigError);
}

TEST(ValidateRatio, McSourceUsesRequestedWindow) {
  McConfig cfg;
  cfg.n = 500;
  cfg.threads = 1;
  cfg.window_mult = 1.0;
  const McSource mc = make_mc_source(Variant::classical, 1.0, Grid(0.1), {}, cfg);
  const Estimate e = mc(4.0);
  EXPECT_DOUBLE_EQ(e.horizon, default_horizon({1.0, 4.0}, 1.0));
  EXPECT_EQ(e.n, 500u);
  EXPECT_EQ(e.method, Method::tilted);
}

// Far in the tail e^{2cu} psi_delta(u) is flat in u, so the long-horizon DP
// oracle pins the discrete Pickands constant independently of its sampler.
TEST(Approx, PickandsConstantMatchesDpTail) {
  const ModelParams p{1.0, 6.0};
  const Grid g(0.1);
  const std::int64_t steps = 4 * steps_for_horizon(g, default_horizon(p));
  const double scaled = analytic::dp_classical_ruin(p, g, steps) / analytic::psi_inf(p);
  const ConstantValue h = constants::pickands_dy(0.2, {20.0, 200000, 12, 0});
  EXPECT_NEAR(h.estimate, scaled, 3.0 * h.std_error);
}
