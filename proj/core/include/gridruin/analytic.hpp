#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridruin/model.hpp"

namespace gridruin::analytic {

// Continuous-time ruin probability e^{-2cu}.
double psi_inf(const ModelParams& params);

// Probability that B(t) - ct exceeds u at some time t >= T (continuous time):
// sf((u + cT)/sqrt(T)) + e^{-2cu} cdf((u - cT)/sqrt(T)).
// Bounds the truncation bias of any grid estimator stopped at horizon T.
double crossing_after(double T, const ModelParams& params);

// Normal approximation of the conditional ruin-time law:
// cdf(c^{3/2} (t - u/c) / sqrt(u)).
double ruin_time_cdf_approx(double t, const ModelParams& params);

struct DpOracleConfig {
  std::int64_t state_points = 0;  // nodes on [state_lo, barrier]
  double state_lo = 0.0;
  double barrier = 0.0;           // = u
};

// Mass escaping below state_lo can only return above u with probability
// e^{-2c(u - state_lo)}; the default keeps that under 1e-9 * e^{-2cu}, with
// about 32 nodes per increment standard deviation.
DpOracleConfig default_dp_config(const ModelParams& params, const Grid& grid);

// Largest tolerated |sum of discretised kernel weights - 1|. Beyond it the
// state grid cannot resolve one increment and the oracle refuses to answer.
inline constexpr double kDpKernelMassTolerance = 1e-6;

// P(max_{0<=n<=n_steps} S_n > u) for the walk with N(-c delta, delta)
// increments, by propagating the sub-density of S_n on (-inf, u] with a
// trapezoid-rule convolution. Appends to `warnings` (if given) when the
// horizon n_steps*delta is shorter than default_horizon(params).
double dp_classical_ruin(const ModelParams& params, const Grid& grid, std::int64_t n_steps,
                         const DpOracleConfig& cfg, std::vector<std::string>* warnings = nullptr);

inline double dp_classical_ruin(const ModelParams& params, const Grid& grid, std::int64_t n_steps) {
  return dp_classical_ruin(params, grid, n_steps, default_dp_config(params, grid));
}

}  // namespace gridruin::analytic
