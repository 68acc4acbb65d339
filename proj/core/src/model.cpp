#include "gridruin/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridruin/errors.hpp"

namespace gridruin {

Grid::Grid(double delta) : delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive and finite");
}

void ModelParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c must be positive and finite");
  if (!(u >= 0.0) || !std::isfinite(u)) throw ConfigError("u must be nonnegative and finite");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::classical: return "classical";
    case Variant::reflected: return "reflected";
    case Variant::parisian: return "parisian";
    case Variant::cumulative: return "cumulative";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "classical") return Variant::classical;
  if (name == "reflected") return Variant::reflected;
  if (name == "parisian") return Variant::parisian;
  if (name == "cumulative") return Variant::cumulative;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

std::optional<std::int64_t> grid_steps(double T, double delta) {
  if (!(T >= 0.0) || !std::isfinite(T) || !(delta > 0.0)) return std::nullopt;
  const double ratio = T / delta;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) return std::nullopt;
  return static_cast<std::int64_t>(nearest);
}

void VariantParams::validate(Variant variant, const Grid& grid) const {
  const int active = int(gamma.has_value()) + int(parisian_T.has_value()) + int(cumulative_k.has_value());
  if (active > 1) throw ConfigError("at most one variant parameter may be set");
  switch (variant) {
    case Variant::classical:
      if (active != 0) throw ConfigError("classical variant takes no variant parameter");
      break;
    case Variant::reflected:
      if (!gamma) throw ConfigError("reflected variant requires gamma");
      if (!(*gamma > 0.0 && *gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
      break;
    case Variant::parisian:
      if (!parisian_T) throw ConfigError("parisian variant requires T");
      if (!(*parisian_T >= 0.0)) throw ConfigError("T must be nonnegative");
      if (!grid_steps(*parisian_T, grid.delta())) throw ConfigError("T must be a multiple of delta");
      break;
    case Variant::cumulative:
      if (!cumulative_k) throw ConfigError("cumulative variant requires k");
      if (*cumulative_k < 0) throw ConfigError("k must be nonnegative");
      break;
  }
}

PathStream::PathStream(const Grid& grid, double drift, std::int64_t max_steps, RandomStream rng)
    : mean_step_(drift * grid.delta()),
      sd_step_(std::sqrt(grid.delta())),
      drift_(drift),
      max_steps_(max_steps),
      rng_(rng) {
  if (!std::isfinite(drift)) throw ConfigError("drift must be finite");
  if (max_steps < 0) throw ConfigError("n_steps must be nonnegative");
}

bool PathStream::advance() noexcept {
  if (index_ >= max_steps_) return false;
  value_ += mean_step_ + sd_step_ * rng_.next_normal();
  ++index_;
  return true;
}

PathSample simulate_path(const Grid& grid, double drift, std::int64_t n_steps, RandomStream& rng) {
  if (!std::isfinite(drift)) throw ConfigError("drift must be finite");
  if (n_steps < 0) throw ConfigError("n_steps must be nonnegative");
  const double mean_step = drift * grid.delta();
  const double sd_step = std::sqrt(grid.delta());
  PathSample sample;
  sample.steps = n_steps;
  sample.drift_used = drift;
  sample.replicate_id = rng.replicate_id();
  sample.values.resize(static_cast<std::size_t>(n_steps) + 1);
  sample.values[0] = 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < sample.values.size(); ++i) {
    s += mean_step + sd_step * rng.next_normal();
    sample.values[i] = s;
  }
  return sample;
}

double default_horizon(const ModelParams& params, double window_mult) {
  params.validate();
  if (!(window_mult > 0.0)) throw ConfigError("window multiplier must be positive");
  const double v = std::max(params.u, std::numbers::e);
  const double window = params.u / params.c + window_mult * std::sqrt(v) * std::log(v);
  return std::max(window, 10.0 / params.c);
}

std::int64_t steps_for_horizon(const Grid& grid, double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be nonnegative");
  const double ratio = horizon / grid.delta();
  return static_cast<std::int64_t>(std::ceil(ratio - 1e-9));
}

}  // namespace gridruin
