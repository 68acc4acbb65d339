#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridruin/constants.hpp"
#include "gridruin/estimators.hpp"
#include "gridruin/model.hpp"

namespace gridruin {

class ConstantCache;

namespace asymptotics {

// Supplies constant estimates by key.
class ConstantSource {
 public:
  virtual ~ConstantSource() = default;
  virtual constants::ConstantValue get(const constants::ConstantKey& key) = 0;
  // Sampling settings used to build keys for this source.
  virtual constants::ConstantPrecision precision() const = 0;
};

// Estimates on demand, through an optional cache.
class EstimatingSource final : public ConstantSource {
 public:
  explicit EstimatingSource(constants::ConstantPrecision precision, ConstantCache* cache = nullptr)
      : precision_(precision), cache_(cache) {}

  constants::ConstantValue get(const constants::ConstantKey& key) override;
  constants::ConstantPrecision precision() const override { return precision_; }

 private:
  constants::ConstantPrecision precision_;
  ConstantCache* cache_;
};

// Fixed values per constant kind; for tests and what-if runs.
class FixedSource final : public ConstantSource {
 public:
  void set(constants::ConstantKind kind, constants::ConstantValue value) { values_[kind] = value; }
  constants::ConstantValue get(const constants::ConstantKey& key) override;
  constants::ConstantPrecision precision() const override { return {}; }

 private:
  std::map<constants::ConstantKind, constants::ConstantValue> values_;
};

struct Approximation {
  Variant formula = Variant::classical;
  double value = 0.0;
  double std_error = 0.0;  // first-order propagation of constant SEs
  std::vector<constants::ConstantKey> keys;
  std::vector<constants::ConstantValue> constants_used;
};

// Large-u approximations, all of the form (constant product) * e^{-2cu}:
//   classical   H_{2c^2 d}
//   reflected   P^{g/(1-g)}_{2c^2 (1-g)^2 d} * H_{2c^2 d}
//   parisian    H_{2c^2 d, 2c^2 T}
//   cumulative  B_{2c^2 d}(k)
Approximation approx(Variant variant, const ModelParams& params, const Grid& grid,
                     const VariantParams& variant_params, ConstantSource& source);

struct RatioRow {
  double u = 0.0;
  double mc = 0.0;
  double mc_se = 0.0;
  double approx = 0.0;
  double approx_se = 0.0;
  double ratio = 0.0;
  double ratio_se = 0.0;
};

struct McConfig {
  Method method = Method::tilted;
  std::uint64_t n = 100000;
  std::uint64_t seed = 1;
  double window_mult = kDefaultWindowMult;
  unsigned threads = 0;
};

// Monte Carlo estimate for a given u; replaceable for tests.
using McSource = std::function<Estimate(double u)>;

McSource make_mc_source(Variant variant, double c, const Grid& grid, const VariantParams& variant_params,
                        const McConfig& config);

// Ratio of Monte Carlo estimate to approximation for each u (ascending).
// Reports ratios with uncertainty; pass/fail is left to the caller.
std::vector<RatioRow> validate_ratio(Variant variant, double c, std::span<const double> us, const Grid& grid,
                                     const VariantParams& variant_params, ConstantSource& source,
                                     const McSource& mc);

}  // namespace asymptotics
}  // namespace gridruin
