#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridruin/rng.hpp"

namespace gridruin {

// Uniform monitoring grid {0, delta, 2 delta, ...}.
class Grid {
 public:
  explicit Grid(double delta);

  double delta() const noexcept { return delta_; }
  // One multiplication; never accumulated.
  double time(std::int64_t i) const noexcept { return static_cast<double>(i) * delta_; }

 private:
  double delta_;
};

struct ModelParams {
  double c = 1.0;  // premium rate
  double u = 0.0;  // initial capital

  void validate() const;
};

enum class Variant { classical, reflected, parisian, cumulative };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

// Parameters of the non-classical ruin notions. At most one is set.
struct VariantParams {
  std::optional<double> gamma;             // reflected, in (0, 1)
  std::optional<double> parisian_T;        // parisian window length, multiple of delta
  std::optional<std::int64_t> cumulative_k;  // cumulative exceedance count

  // Checks the fields required by `variant` are present and valid on `grid`.
  void validate(Variant variant, const Grid& grid) const;
};

// Returns T / delta when T is an exact multiple of delta (to rounding),
// otherwise nullopt.
std::optional<std::int64_t> grid_steps(double T, double delta);

struct PathSample {
  std::int64_t steps = 0;
  std::vector<double> values;  // S_0 .. S_steps, S_0 = 0
  double drift_used = 0.0;
  std::uint64_t replicate_id = 0;
};

// Lazily generated net-loss walk S_{i+1} = S_i + drift*delta + sqrt(delta)*Z.
// Holds at most `max_steps` increments; no path storage.
class PathStream {
 public:
  PathStream(const Grid& grid, double drift, std::int64_t max_steps, RandomStream rng);

  std::int64_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }
  std::int64_t max_steps() const noexcept { return max_steps_; }
  double drift() const noexcept { return drift_; }
  // Moves to the next grid point; false once max_steps is reached.
  bool advance() noexcept;

 private:
  double mean_step_;
  double sd_step_;
  double drift_;
  std::int64_t max_steps_;
  std::int64_t index_ = 0;
  double value_ = 0.0;
  RandomStream rng_;
};

// Deterministic path over stored values; same interface as PathStream.
class FixedPath {
 public:
  explicit FixedPath(std::span<const double> values) : values_(values) {}

  std::int64_t index() const noexcept { return index_; }
  double value() const noexcept { return values_[static_cast<std::size_t>(index_)]; }
  bool advance() noexcept {
    if (index_ + 1 >= static_cast<std::int64_t>(values_.size())) return false;
    ++index_;
    return true;
  }

 private:
  std::span<const double> values_;
  std::int64_t index_ = 0;
};

PathSample simulate_path(const Grid& grid, double drift, std::int64_t n_steps, RandomStream& rng);

inline constexpr double kDefaultWindowMult = 3.0;

// Simulation horizon covering the window where ruin concentrates:
// max(u/c + mult*sqrt(v)*ln(v), 10/c) with v = max(u, e).
double default_horizon(const ModelParams& params, double window_mult = kDefaultWindowMult);

// Number of grid steps needed to reach `horizon` (rounded up).
std::int64_t steps_for_horizon(const Grid& grid, double horizon);

}  // namespace gridruin
