#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridruin/detectors.hpp"
#include "gridruin/model.hpp"
#include "gridruin/stats.hpp"

namespace gridruin {

enum class Method { crude, tilted };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct EstimateRequest {
  Variant variant = Variant::classical;
  ModelParams params;
  double delta = 0.1;
  VariantParams variant_params;
  Method method = Method::tilted;
  double horizon = 0.0;  // <= 0 selects default_horizon(params)
  std::uint64_t n = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;  // replicates in which ruin was detected
  Method method = Method::crude;
  double horizon = 0.0;
  std::int64_t steps = 0;
  double horizon_bias_bound = 0.0;  // crossing_after(horizon, params)
  double ci_low = 0.0;              // 95% normal interval, clipped at 0
  double ci_high = 0.0;
  std::vector<std::string> warnings;
};

// Unbiased estimate of the ruin-by-horizon probability.
//
// crude:  mean of ruin indicators under the model drift -c.
// tilted: paths use drift +c and each detected ruin is weighted by
//         exp(-2c S_tau), the likelihood ratio of N(-c d, d) to N(c d, d)
//         increments accumulated up to the detection step.
// Replicate i always uses make_rng(seed, i), so variants and methods are
// coupled through their Gaussian draws.
Estimate estimate(const EstimateRequest& request);

// Horizon actually simulated for a request (default when request.horizon <= 0).
double resolved_horizon(const EstimateRequest& request);

// --- coupled-path comparisons --------------------------------------------

struct CoupledComparison {
  std::uint64_t n = 0;
  std::uint64_t classical_hits = 0;
  std::uint64_t reflected_hits = 0;
  std::uint64_t parisian_hits = 0;
  std::vector<std::uint64_t> cumulative_hits;  // k = 0 .. k_max
  // Paths violating parisian <= classical <= reflected.
  std::uint64_t dominance_violations = 0;
  // Paths where cumulative(k+1) fires but cumulative(k) does not.
  std::uint64_t cumulative_violations = 0;
  // Paths where Parisian with T = 0 or cumulative with k = 0 disagrees with
  // the classical decision or detection step.
  std::uint64_t parisian_t0_mismatches = 0;
  std::uint64_t cumulative_k0_mismatches = 0;
};

struct CoupledRequest {
  ModelParams params;
  double delta = 0.1;
  double gamma = 0.5;
  double parisian_T = 0.3;
  std::int64_t k_max = 3;
  double horizon = 0.0;  // <= 0: default
  std::uint64_t n = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Crude paths under drift -c; every detector sees the same path.
CoupledComparison compare_variants_coupled(const CoupledRequest& request);

struct RefinementComparison {
  Estimate coarse;  // grid delta
  Estimate fine;    // grid delta / 2
  std::uint64_t violations = 0;  // coarse ruin without fine ruin
};

// Simulates on G(delta/2) and reads G(delta) off the even indices.
RefinementComparison compare_refinement(const ModelParams& params, double delta, double horizon,
                                        std::uint64_t n, std::uint64_t seed, unsigned threads = 0);

// --- ruin time -----------------------------------------------------------

struct RuinTimeSample {
  // x = c^{3/2} (tau - u/c) / sqrt(u), weight = tilted likelihood ratio.
  std::vector<WeightedPoint> points;
  std::uint64_t n = 0;
  std::vector<std::string> warnings;
};

// Tilted sampling of the conditional ruin time; request.method is ignored.
RuinTimeSample ruin_time_distribution(const EstimateRequest& request);

}  // namespace gridruin
