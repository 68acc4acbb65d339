#include "gridruin/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridruin/errors.hpp"
#include "gridruin/normal.hpp"

namespace gridruin::analytic {

double psi_inf(const ModelParams& params) {
  params.validate();
  return std::exp(-2.0 * params.c * params.u);
}

double crossing_after(double T, const ModelParams& params) {
  params.validate();
  if (!(T > 0.0)) throw ConfigError("crossing_after requires T > 0");
  const double c = params.c, u = params.u;
  const double root = std::sqrt(T);
  // Work in logs: both terms may sit far below DBL_MIN relative scale.
  const double direct = normal::sf((u + c * T) / root);
  const double mirrored = std::exp(-2.0 * c * u + std::log(normal::cdf((u - c * T) / root)));
  return direct + mirrored;
}

double ruin_time_cdf_approx(double t, const ModelParams& params) {
  params.validate();
  if (!(params.u > 0.0)) throw ConfigError("ruin-time approximation requires u > 0");
  const double c = params.c;
  return normal::cdf(c * std::sqrt(c) * (t - params.u / c) / std::sqrt(params.u));
}

DpOracleConfig default_dp_config(const ModelParams& params, const Grid& grid) {
  params.validate();
  const double sd = std::sqrt(grid.delta());
  DpOracleConfig cfg;
  cfg.barrier = params.u;
  // e^{-2c(u - lo)} <= 1e-9 e^{-2cu}  <=>  lo <= -ln(1e9)/(2c)
  cfg.state_lo = -std::log(1e9) / (2.0 * params.c) - 8.0 * sd;
  const double h_target = sd / 32.0;
  cfg.state_points = std::max<std::int64_t>(
      64, static_cast<std::int64_t>(std::ceil((cfg.barrier - cfg.state_lo) / h_target)) + 1);
  return cfg;
}

double dp_classical_ruin(const ModelParams& params, const Grid& grid, std::int64_t n_steps,
                         const DpOracleConfig& cfg, std::vector<std::string>* warnings) {
  params.validate();
  if (n_steps < 0) throw ConfigError("n_steps must be nonnegative");
  if (cfg.state_points < 64) throw ConfigError("DP oracle needs at least 64 state points");
  if (!(cfg.state_lo < cfg.barrier)) throw ConfigError("DP oracle needs state_lo < barrier");
  if (cfg.barrier != params.u) throw ConfigError("DP oracle barrier must equal u");

  if (warnings && grid.time(n_steps) < default_horizon(params)) {
    std::ostringstream msg;
    msg << "DP horizon " << grid.time(n_steps) << " is shorter than the recommended "
        << default_horizon(params);
    warnings->push_back(msg.str());
  }
  if (n_steps == 0) return 0.0;

  const double u = params.u;
  const double mu = -params.c * grid.delta();
  const double sd = std::sqrt(grid.delta());
  const auto n_nodes = static_cast<std::size_t>(cfg.state_points);
  const double h = (cfg.barrier - cfg.state_lo) / static_cast<double>(n_nodes - 1);

  // Discretised increment density on node offsets d*h, |d| <= half_width.
  const auto half_width = static_cast<std::ptrdiff_t>(
      std::min<double>(std::ceil(9.0 * sd / h) + 1.0, static_cast<double>(n_nodes)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half_width + 1));
  double kernel_mass = 0.0;
  for (std::ptrdiff_t d = -half_width; d <= half_width; ++d) {
    const double v = normal::pdf((static_cast<double>(d) * h - mu) / sd) / sd;
    kernel[static_cast<std::size_t>(d + half_width)] = v;
    kernel_mass += v * h;
  }
  if (std::abs(kernel_mass - 1.0) > kDpKernelMassTolerance) {
    std::ostringstream msg;
    msg << "DP oracle state grid under-resolved: kernel mass " << kernel_mass
        << " (step " << h << " vs increment sd " << sd << ")";
    throw NumericalError(msg.str());
  }

  std::vector<double> x(n_nodes), w(n_nodes, h), tail(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    x[j] = cfg.state_lo + static_cast<double>(j) * h;
    tail[j] = normal::sf((u - x[j] - mu) / sd);
  }
  x.back() = u;
  w.front() = w.back() = 0.5 * h;

  // Step 1 from the point mass at S_0 = 0.
  double ruin = normal::sf((u - mu) / sd);
  std::vector<double> density(n_nodes), next(n_nodes), weighted(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) density[j] = normal::pdf((x[j] - mu) / sd) / sd;

  for (std::int64_t step = 1; step < n_steps; ++step) {
    double exits = 0.0;
    for (std::size_t j = 0; j < n_nodes; ++j) {
      weighted[j] = w[j] * density[j];
      exits += weighted[j] * tail[j];
    }
    ruin += exits;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, ii - half_width);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n_nodes) - 1, ii + half_width);
      double acc = 0.0;
      const double* k = kernel.data() + (ii - lo + half_width);
      for (std::ptrdiff_t j = lo; j <= hi; ++j, --k) acc += weighted[static_cast<std::size_t>(j)] * *k;
      next[i] = acc;
    }
    density.swap(next);
  }
  return ruin;
}

}  // namespace gridruin::analytic
