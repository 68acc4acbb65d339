#include "gridruin/asymptotics.hpp"

#include <cmath>

#include "gridruin/analytic.hpp"
#include "gridruin/constant_cache.hpp"
#include "gridruin/errors.hpp"

namespace gridruin::asymptotics {

using constants::ConstantKey;
using constants::ConstantKind;
using constants::ConstantValue;

ConstantValue EstimatingSource::get(const ConstantKey& key) {
  if (cache_) {
    if (auto hit = cache_->find(key)) return *hit;
  }
  ConstantValue value = constants::estimate(key, precision_.threads);
  if (cache_) cache_->store(key, value);
  return value;
}

ConstantValue FixedSource::get(const ConstantKey& key) {
  const auto it = values_.find(key.kind);
  if (it == values_.end()) throw ConfigError("no fixed value for constant " + std::string(to_string(key.kind)));
  return it->second;
}

Approximation approx(Variant variant, const ModelParams& params, const Grid& grid,
                     const VariantParams& variant_params, ConstantSource& source) {
  params.validate();
  variant_params.validate(variant, grid);
  const auto precision = source.precision();

  Approximation out;
  out.formula = variant;
  auto use = [&](ConstantKind kind) {
    const ConstantKey key = constants::key_for_model(kind, params, grid, variant_params, precision);
    out.keys.push_back(key);
    out.constants_used.push_back(source.get(key));
  };
  switch (variant) {
    case Variant::classical: use(ConstantKind::pickands_dy); break;
    case Variant::reflected:
      use(ConstantKind::piterbarg);
      use(ConstantKind::pickands_dy);
      break;
    case Variant::parisian: use(ConstantKind::parisian); break;
    case Variant::cumulative: use(ConstantKind::berman_limit); break;
  }

  double product = 1.0, rel_var = 0.0;
  for (const auto& cv : out.constants_used) {
    product *= cv.estimate;
    if (cv.estimate != 0.0) rel_var += (cv.std_error / cv.estimate) * (cv.std_error / cv.estimate);
  }
  const double tail = analytic::psi_inf(params);
  out.value = product * tail;
  out.std_error = std::abs(out.value) * std::sqrt(rel_var);
  return out;
}

McSource make_mc_source(Variant variant, double c, const Grid& grid, const VariantParams& variant_params,
                        const McConfig& config) {
  return [=](double u) {
    EstimateRequest r;
    r.variant = variant;
    r.params = {c, u};
    r.delta = grid.delta();
    r.variant_params = variant_params;
    r.method = config.method;
    r.horizon = default_horizon(r.params, config.window_mult);
    r.n = config.n;
    r.seed = config.seed;
    r.threads = config.threads;
    return estimate(r);
  };
}

std::vector<RatioRow> validate_ratio(Variant variant, double c, std::span<const double> us, const Grid& grid,
                                     const VariantParams& variant_params, ConstantSource& source,
                                     const McSource& mc) {
  for (std::size_t i = 1; i < us.size(); ++i) {
    if (!(us[i] > us[i - 1])) throw ConfigError("u values must be strictly increasing");
  }
  std::vector<RatioRow> rows;
  rows.reserve(us.size());
  for (double u : us) {
    const ModelParams params{c, u};
    const Approximation a = approx(variant, params, grid, variant_params, source);
    const Estimate e = mc(u);
    RatioRow row;
    row.u = u;
    row.mc = e.value;
    row.mc_se = e.std_error;
    row.approx = a.value;
    row.approx_se = a.std_error;
    row.ratio = a.value > 0.0 ? e.value / a.value : 0.0;
    const double rel_mc = e.value > 0.0 ? e.std_error / e.value : 0.0;
    const double rel_ap = a.value > 0.0 ? a.std_error / a.value : 0.0;
    row.ratio_se = std::abs(row.ratio) * std::hypot(rel_mc, rel_ap);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gridruin::asymptotics
