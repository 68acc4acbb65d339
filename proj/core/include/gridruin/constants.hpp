#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridruin/model.hpp"
#include "gridruin/rng.hpp"

namespace gridruin {

class ConstantCache;

namespace constants {

// Throughout, W(t) = sqrt(2) B(t) - |t| sampled on eta*Z, B a two-sided
// standard Brownian motion with B(0) = 0.

enum class ConstantKind {
  pickands_dy,    // (1/eta) E[ max e^W / sum e^W ], two-sided grid
  pickands_diff,  // (1/eta) E[ max_{t>=0} e^W - max_{t>=eta} e^W ], one-sided grid
  piterbarg,      // E[ max_{t>=0} e^{W(t) - a t} ], one-sided grid
  parisian,       // E[ max_t min_{[t,t+T]} e^W / (eta sum e^W) ], two-sided grid
  berman,         // E[ e^{M_m} ] / S with M_m the m-th largest W on [0, S]
  berman_limit,   // (1/eta) E[ e^{M_m} / sum e^W ], two-sided grid (S -> infinity)
};

std::string_view to_string(ConstantKind kind);
ConstantKind parse_constant_kind(std::string_view name);

// How the exceedance count of the Berman functional is compared with k.
enum class BermanThreshold {
  eta_weighted,  // eta * #{s : W(s) + z > 0} > k
  count,         // #{s : W(s) + z > 0} > k
};

std::string_view to_string(BermanThreshold threshold);
BermanThreshold parse_berman_threshold(std::string_view name);

// Number of grid points that must exceed the level: smallest integer m with
// eta*m > k (eta_weighted) or m > k (count). When k/eta is an integer up to
// rounding, the eta-weighted rank is k/eta + 1.
std::int64_t berman_rank(double eta, std::int64_t k, BermanThreshold threshold);

struct ConstantKey {
  ConstantKind kind = ConstantKind::pickands_dy;
  double eta = 0.0;
  double a = 0.0;         // piterbarg
  double T = 0.0;         // parisian
  std::int64_t k = 0;     // berman kinds
  BermanThreshold threshold = BermanThreshold::eta_weighted;  // berman kinds
  double trunc = 20.0;    // half-width (two-sided), length (one-sided), S (berman)
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError when a field required (or forbidden) by `kind` is off.
  void validate() const;
  // Stable textual identity; equal keys give equal strings.
  std::string canonical() const;
};

struct ConstantValue {
  double estimate = 0.0;
  double std_error = 0.0;
  // Fraction of samples whose extremal point lies in the outer 10% of the
  // truncation window.
  double boundary_fraction = 0.0;
  std::uint64_t n = 0;
  bool cached = false;
  std::vector<std::string> warnings;

  static constexpr double kBoundaryWarnLevel = 0.01;
  bool boundary_warning() const { return boundary_fraction > kBoundaryWarnLevel; }
};

// --- per-path functionals -------------------------------------------------

// Fills `w` with W on {-half*eta, ..., half*eta}; w[half] = 0. The right
// half is drawn first, so a one-sided path from the same stream equals the
// right half of this one.
void sample_two_sided(double eta, std::int64_t half_steps, RandomStream& rng, std::vector<double>& w);
// Fills `w` with W on {0, eta, ..., steps*eta}.
void sample_one_sided(double eta, std::int64_t steps, RandomStream& rng, std::vector<double>& w);

struct PathValue {
  double value = 0.0;
  std::size_t extremal_index = 0;
};

// max e^w / sum e^w
PathValue dy_ratio(std::span<const double> w);
// max over windows of min e^w on window_steps+1 consecutive points, / sum e^w.
// With window_steps = 0 the result equals dy_ratio bit for bit.
PathValue parisian_ratio(std::span<const double> w, std::int64_t window_steps);
// e^{w[0]} vee max_{i>=1} e^{w[i]}  minus  max_{i>=1} e^{w[i]}
PathValue diff_functional(std::span<const double> w);
// max_i e^{w[i] - a * i * eta}
PathValue piterbarg_functional(std::span<const double> w, double eta, double a);
// e^{M_m}, M_m the m-th largest entry of w
PathValue berman_finite(std::span<const double> w, std::int64_t m);
// e^{M_m} / sum e^w; with m = 1 equals dy_ratio bit for bit.
PathValue berman_limit_ratio(std::span<const double> w, std::int64_t m);

// --- estimators ------------------------------------------------------------

struct SamplingOptions {
  double trunc = 20.0;
  std::uint64_t n = 200000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

inline constexpr double kMinTrunc = 5.0;
inline constexpr double kPiterbargHeavyTail = 0.05;

ConstantValue pickands_dy(double eta, const SamplingOptions& opts);
ConstantValue pickands_diff(double eta, const SamplingOptions& opts);
ConstantValue piterbarg(double eta, double a, const SamplingOptions& opts);
ConstantValue parisian_constant(double eta, double T, const SamplingOptions& opts);
// Finite-horizon Berman functional B_eta(S, k) / S; opts.trunc is S.
ConstantValue berman(double eta, std::int64_t k, BermanThreshold threshold, const SamplingOptions& opts);
// Limit constant B_eta(k) through the shift-invariant ratio representation.
ConstantValue berman_limit(double eta, std::int64_t k, BermanThreshold threshold, const SamplingOptions& opts);

ConstantValue estimate(const ConstantKey& key, unsigned threads = 0);

struct BermanPlateau {
  std::vector<double> horizons;
  std::vector<ConstantValue> values;
  bool plateau = false;  // |B(S_last) - B(S_prev)| < 2 combined SE
};

// Finite-S estimates over `horizons` (ascending) with the plateau test.
BermanPlateau berman_plateau(double eta, std::int64_t k, BermanThreshold threshold,
                             std::span<const double> horizons, const SamplingOptions& opts);

// --- model coupling --------------------------------------------------------

struct ConstantPrecision {
  double trunc = 20.0;
  std::uint64_t n = 200000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Constant parameters implied by a ruin model on grid G(delta):
// eta = 2c^2 delta for the Pickands, Parisian and Berman constants,
// a = gamma/(1-gamma) and eta = 2c^2 (1-gamma)^2 delta for Piterbarg, and a
// Parisian window 2c^2 T. Truncations are rounded up to the constant's grid.
ConstantKey key_for_model(ConstantKind kind, const ModelParams& params, const Grid& grid,
                          const VariantParams& variant, const ConstantPrecision& precision);

ConstantValue constant_for_model(ConstantKind kind, const ModelParams& params, const Grid& grid,
                                 const VariantParams& variant, const ConstantPrecision& precision,
                                 ConstantCache* cache = nullptr);

}  // namespace constants
}  // namespace gridruin
