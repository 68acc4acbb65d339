#include "gridruin/estimators.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <variant>

#include "gridruin/analytic.hpp"
#include "gridruin/errors.hpp"
#include "gridruin/parallel.hpp"

namespace gridruin {

std::string_view to_string(Method m) { return m == Method::crude ? "crude" : "tilted"; }

Method parse_method(std::string_view name) {
  if (name == "crude") return Method::crude;
  if (name == "tilted") return Method::tilted;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

namespace {

using AnyDetector = std::variant<ClassicalDetector, ReflectedDetector, ParisianDetector, CumulativeDetector>;

AnyDetector make_detector(Variant variant, double u, const VariantParams& vp, const Grid& grid) {
  switch (variant) {
    case Variant::classical: return ClassicalDetector(u);
    case Variant::reflected: return ReflectedDetector(u, *vp.gamma);
    case Variant::parisian: return ParisianDetector(u, *grid_steps(*vp.parisian_T, grid.delta()));
    case Variant::cumulative: return CumulativeDetector(u, *vp.cumulative_k);
  }
  throw ConfigError("unknown variant");
}

struct EventStats {
  RunningStats stats;
  std::uint64_t hits = 0;
};

void validate_request(const EstimateRequest& r, const Grid& grid) {
  r.params.validate();
  r.variant_params.validate(r.variant, grid);
  if (r.n == 0) throw ConfigError("number of replicates must be positive");
  if (!std::isfinite(r.horizon)) throw ConfigError("horizon must be finite");
}

// Runs one replicate and returns the detection event with its weight set.
RuinEvent run_replicate(const EstimateRequest& r, const Grid& grid, const AnyDetector& proto,
                        double drift, std::int64_t steps, std::uint64_t id) {
  PathStream stream(grid, drift, steps, make_rng(r.seed, id));
  RuinEvent ev = std::visit(
      [&](auto det) { return run_detector(stream, det, grid); }, proto);
  if (ev.occurred && drift > 0.0) {
    ev.weight = std::exp(-2.0 * r.params.c * ev.level);
    if (!std::isfinite(ev.weight)) throw NumericalError("non-finite likelihood ratio");
  }
  return ev;
}

void horizon_warning(const EstimateRequest& r, double horizon, std::vector<std::string>& warnings) {
  const double recommended = default_horizon(r.params);
  if (horizon < recommended) {
    std::ostringstream msg;
    msg << "horizon " << horizon << " is shorter than the recommended " << recommended;
    warnings.push_back(msg.str());
  }
}

}  // namespace

double resolved_horizon(const EstimateRequest& request) {
  return request.horizon > 0.0 ? request.horizon : default_horizon(request.params);
}

Estimate estimate(const EstimateRequest& r) {
  const Grid grid(r.delta);
  validate_request(r, grid);
  const double horizon = resolved_horizon(r);
  const std::int64_t steps = steps_for_horizon(grid, horizon);
  const AnyDetector proto = make_detector(r.variant, r.params.u, r.variant_params, grid);
  const double drift = r.method == Method::tilted ? r.params.c : -r.params.c;

  auto block = [&](std::uint64_t first, std::uint64_t last) {
    EventStats part;
    for (std::uint64_t id = first; id < last; ++id) {
      const RuinEvent ev = run_replicate(r, grid, proto, drift, steps, id);
      part.stats.add(ev.occurred ? ev.weight : 0.0);
      part.hits += ev.occurred ? 1 : 0;
    }
    return part;
  };
  auto merge = [](EventStats& acc, const EventStats& p) {
    acc.stats.merge(p.stats);
    acc.hits += p.hits;
  };
  const EventStats total = reduce_replicates<EventStats>(r.n, r.threads, block, merge);

  Estimate out;
  out.value = total.stats.mean();
  out.std_error = total.stats.std_error();
  out.n = total.stats.count();
  out.hits = total.hits;
  out.method = r.method;
  out.horizon = horizon;
  out.steps = steps;
  out.horizon_bias_bound = horizon > 0.0 ? analytic::crossing_after(grid.time(steps), r.params) : 1.0;
  out.ci_low = std::max(0.0, out.value - kZ95 * out.std_error);
  out.ci_high = out.value + kZ95 * out.std_error;
  horizon_warning(r, horizon, out.warnings);
  return out;
}

CoupledComparison compare_variants_coupled(const CoupledRequest& r) {
  r.params.validate();
  const Grid grid(r.delta);
  if (r.n == 0) throw ConfigError("number of replicates must be positive");
  if (!(r.gamma > 0.0 && r.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (r.k_max < 0) throw ConfigError("k_max must be nonnegative");
  const auto window = grid_steps(r.parisian_T, r.delta);
  if (!window) throw ConfigError("T must be a multiple of delta");
  const double horizon = r.horizon > 0.0 ? r.horizon : default_horizon(r.params);
  const std::int64_t steps = steps_for_horizon(grid, horizon);
  const double u = r.params.u;
  const auto n_k = static_cast<std::size_t>(r.k_max + 1);

  auto block = [&](std::uint64_t first, std::uint64_t last) {
    CoupledComparison part;
    part.cumulative_hits.assign(n_k, 0);
    for (std::uint64_t id = first; id < last; ++id) {
      RandomStream rng = make_rng(r.seed, id);
      const PathSample path = simulate_path(grid, -r.params.c, steps, rng);
      auto run = [&](auto det) {
        FixedPath src(path.values);
        return run_detector(src, det, grid);
      };
      const RuinEvent classical = run(ClassicalDetector(u));
      const RuinEvent reflected = run(ReflectedDetector(u, r.gamma));
      const RuinEvent parisian = run(ParisianDetector(u, *window));
      const RuinEvent parisian0 = run(ParisianDetector(u, 0));

      ++part.n;
      part.classical_hits += classical.occurred;
      part.reflected_hits += reflected.occurred;
      part.parisian_hits += parisian.occurred;
      if ((parisian.occurred && !classical.occurred) || (classical.occurred && !reflected.occurred)) {
        ++part.dominance_violations;
      }
      if (parisian0.occurred != classical.occurred || parisian0.step != classical.step) {
        ++part.parisian_t0_mismatches;
      }
      bool previous = true;
      for (std::size_t k = 0; k < n_k; ++k) {
        const RuinEvent cum = run(CumulativeDetector(u, static_cast<std::int64_t>(k)));
        part.cumulative_hits[k] += cum.occurred;
        if (cum.occurred && !previous) ++part.cumulative_violations;
        previous = cum.occurred;
        if (k == 0 && (cum.occurred != classical.occurred || cum.step != classical.step)) {
          ++part.cumulative_k0_mismatches;
        }
      }
    }
    return part;
  };
  auto merge = [n_k](CoupledComparison& acc, const CoupledComparison& p) {
    if (acc.cumulative_hits.empty()) acc.cumulative_hits.assign(n_k, 0);
    acc.n += p.n;
    acc.classical_hits += p.classical_hits;
    acc.reflected_hits += p.reflected_hits;
    acc.parisian_hits += p.parisian_hits;
    for (std::size_t k = 0; k < n_k; ++k) acc.cumulative_hits[k] += p.cumulative_hits[k];
    acc.dominance_violations += p.dominance_violations;
    acc.cumulative_violations += p.cumulative_violations;
    acc.parisian_t0_mismatches += p.parisian_t0_mismatches;
    acc.cumulative_k0_mismatches += p.cumulative_k0_mismatches;
  };
  return reduce_replicates<CoupledComparison>(r.n, r.threads, block, merge);
}

namespace {
Estimate indicator_estimate(const RunningStats& s, std::uint64_t hits, double horizon, std::int64_t steps,
                            const ModelParams& params, const Grid& grid) {
  Estimate e;
  e.value = s.mean();
  e.std_error = s.std_error();
  e.n = s.count();
  e.hits = hits;
  e.method = Method::crude;
  e.horizon = horizon;
  e.steps = steps;
  e.horizon_bias_bound = analytic::crossing_after(grid.time(steps), params);
  e.ci_low = std::max(0.0, e.value - kZ95 * e.std_error);
  e.ci_high = e.value + kZ95 * e.std_error;
  return e;
}
}  // namespace

RefinementComparison compare_refinement(const ModelParams& params, double delta, double horizon,
                                        std::uint64_t n, std::uint64_t seed, unsigned threads) {
  params.validate();
  const Grid coarse(delta);
  const Grid fine(delta / 2.0);
  if (n == 0) throw ConfigError("number of replicates must be positive");
  const double h = horizon > 0.0 ? horizon : default_horizon(params);
  const std::int64_t coarse_steps = steps_for_horizon(coarse, h);
  const std::int64_t fine_steps = 2 * coarse_steps;

  struct Part {
    RunningStats coarse, fine;
    std::uint64_t coarse_hits = 0, fine_hits = 0, violations = 0;
  };
  auto block = [&](std::uint64_t first, std::uint64_t last) {
    Part part;
    std::vector<double> even;
    for (std::uint64_t id = first; id < last; ++id) {
      RandomStream rng = make_rng(seed, id);
      const PathSample path = simulate_path(fine, -params.c, fine_steps, rng);
      even.clear();
      for (std::size_t i = 0; i < path.values.size(); i += 2) even.push_back(path.values[i]);
      FixedPath fine_src(path.values);
      FixedPath coarse_src(even);
      const bool f = detect_classical(fine_src, params.u, fine).occurred;
      const bool c = detect_classical(coarse_src, params.u, coarse).occurred;
      part.fine.add(f ? 1.0 : 0.0);
      part.coarse.add(c ? 1.0 : 0.0);
      part.fine_hits += f;
      part.coarse_hits += c;
      part.violations += (c && !f);
    }
    return part;
  };
  auto merge = [](Part& acc, const Part& p) {
    acc.coarse.merge(p.coarse);
    acc.fine.merge(p.fine);
    acc.coarse_hits += p.coarse_hits;
    acc.fine_hits += p.fine_hits;
    acc.violations += p.violations;
  };
  const Part total = reduce_replicates<Part>(n, threads, block, merge);

  RefinementComparison out;
  out.coarse = indicator_estimate(total.coarse, total.coarse_hits, h, coarse_steps, params, coarse);
  out.fine = indicator_estimate(total.fine, total.fine_hits, h, fine_steps, params, fine);
  out.violations = total.violations;
  return out;
}

RuinTimeSample ruin_time_distribution(const EstimateRequest& request) {
  EstimateRequest r = request;
  r.method = Method::tilted;
  const Grid grid(r.delta);
  validate_request(r, grid);
  if (!(r.params.u > 0.0)) throw ConfigError("ruin-time distribution requires u > 0");
  const double horizon = resolved_horizon(r);
  const std::int64_t steps = steps_for_horizon(grid, horizon);
  const AnyDetector proto = make_detector(r.variant, r.params.u, r.variant_params, grid);
  const double c = r.params.c, u = r.params.u;
  const double scale = c * std::sqrt(c) / std::sqrt(u);

  using Points = std::vector<WeightedPoint>;
  auto block = [&](std::uint64_t first, std::uint64_t last) {
    Points part;
    for (std::uint64_t id = first; id < last; ++id) {
      const RuinEvent ev = run_replicate(r, grid, proto, c, steps, id);
      if (ev.occurred) part.push_back({scale * (*ev.time - u / c), ev.weight});
    }
    return part;
  };
  auto merge = [](Points& acc, const Points& p) { acc.insert(acc.end(), p.begin(), p.end()); };

  RuinTimeSample out;
  out.points = reduce_replicates<Points>(r.n, r.threads, block, merge);
  out.n = r.n;
  if (out.points.empty()) throw NumericalError("no ruin observed among tilted replicates");
  if (u < 10.0) out.warnings.push_back("u < 10: the normal ruin-time window is not yet meaningful");
  horizon_warning(r, horizon, out.warnings);
  return out;
}

}  // namespace gridruin
