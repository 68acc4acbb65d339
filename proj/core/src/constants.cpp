#include "gridruin/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

#include "gridruin/constant_cache.hpp"
#include "gridruin/errors.hpp"
#include "gridruin/parallel.hpp"
#include "gridruin/stats.hpp"

namespace gridruin::constants {

std::string_view to_string(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::pickands_dy: return "pickands_dy";
    case ConstantKind::pickands_diff: return "pickands_diff";
    case ConstantKind::piterbarg: return "piterbarg";
    case ConstantKind::parisian: return "parisian";
    case ConstantKind::berman: return "berman";
    case ConstantKind::berman_limit: return "berman_limit";
  }
  return "unknown";
}

ConstantKind parse_constant_kind(std::string_view name) {
  for (auto kind : {ConstantKind::pickands_dy, ConstantKind::pickands_diff, ConstantKind::piterbarg,
                    ConstantKind::parisian, ConstantKind::berman, ConstantKind::berman_limit}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown constant kind '" + std::string(name) + "'");
}

std::string_view to_string(BermanThreshold threshold) {
  return threshold == BermanThreshold::count ? "count" : "eta_weighted";
}

BermanThreshold parse_berman_threshold(std::string_view name) {
  if (name == "count") return BermanThreshold::count;
  if (name == "eta_weighted") return BermanThreshold::eta_weighted;
  throw ConfigError("unknown Berman threshold '" + std::string(name) + "'");
}

std::int64_t berman_rank(double eta, std::int64_t k, BermanThreshold threshold) {
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (k < 0) throw ConfigError("k must be nonnegative");
  if (threshold == BermanThreshold::count) return k + 1;
  const double q = static_cast<double>(k) / eta;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return static_cast<std::int64_t>(nearest) + 1;
  return static_cast<std::int64_t>(std::floor(q)) + 1;
}

namespace {

bool needs_a(ConstantKind k) { return k == ConstantKind::piterbarg; }
bool needs_T(ConstantKind k) { return k == ConstantKind::parisian; }
bool needs_k(ConstantKind k) { return k == ConstantKind::berman || k == ConstantKind::berman_limit; }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::int64_t require_multiple(double length, double eta, const char* what) {
  const auto steps = grid_steps(length, eta);
  if (!steps) throw ConfigError(std::string(what) + " must be a multiple of eta");
  return *steps;
}

void check_common(double eta, double trunc, std::uint64_t n) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
  if (!(trunc >= kMinTrunc)) throw ConfigError("truncation must be at least 5");
  if (n == 0) throw ConfigError("number of samples must be positive");
}

struct ExpSum {
  double max = -std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  double sum = 0.0;  // sum of e^{w - max}
};

ExpSum exp_sum(std::span<const double> w) {
  ExpSum r;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > r.max) {
      r.max = w[i];
      r.argmax = i;
    }
  }
  for (double x : w) r.sum += std::exp(x - r.max);
  return r;
}

struct Partial {
  RunningStats stats;
  std::uint64_t boundary = 0;
};

// `path_value(rng, scratch)` returns the functional and whether its extremal
// point fell in the outer 10% of the window.
template <class PathFn>
ConstantValue run_estimator(std::uint64_t n, std::uint64_t seed, unsigned threads, double scale,
                            PathFn&& path_value) {
  auto block = [&](std::uint64_t first, std::uint64_t last) {
    Partial part;
    std::vector<double> scratch;
    for (std::uint64_t id = first; id < last; ++id) {
      RandomStream rng = make_rng(seed, id);
      const auto [value, at_boundary] = path_value(rng, scratch);
      part.stats.add(value);
      part.boundary += at_boundary ? 1 : 0;
    }
    return part;
  };
  auto merge = [](Partial& acc, const Partial& p) {
    acc.stats.merge(p.stats);
    acc.boundary += p.boundary;
  };
  const Partial total = reduce_replicates<Partial>(n, threads, block, merge);

  ConstantValue out;
  out.estimate = total.stats.mean() * scale;
  out.std_error = total.stats.std_error() * scale;
  out.n = total.stats.count();
  out.boundary_fraction = static_cast<double>(total.boundary) / static_cast<double>(out.n);
  if (out.boundary_warning()) {
    std::ostringstream msg;
    msg << "extremal point near the truncation boundary in " << out.boundary_fraction * 100.0
        << "% of samples; increase the truncation";
    out.warnings.push_back(msg.str());
  }
  return out;
}

bool two_sided_boundary(std::size_t index, std::int64_t half) {
  const double offset = std::abs(static_cast<double>(index) - static_cast<double>(half));
  return offset > 0.9 * static_cast<double>(half);
}

bool one_sided_boundary(std::size_t index, std::int64_t steps) {
  return static_cast<double>(index) > 0.9 * static_cast<double>(steps);
}

}  // namespace

void ConstantKey::validate() const {
  check_common(eta, kind == ConstantKind::berman ? std::max(trunc, kMinTrunc) : trunc,
               n_samples);
  if (needs_a(kind) != (a != 0.0)) {
    throw ConfigError(needs_a(kind) ? "piterbarg constant requires a > 0" : "parameter a only applies to piterbarg");
  }
  if (needs_a(kind) && !(a > 0.0)) throw ConfigError("a must be positive");
  if (!needs_T(kind) && T != 0.0) throw ConfigError("parameter T only applies to the parisian constant");
  if (needs_T(kind)) {
    if (!(T >= 0.0)) throw ConfigError("T must be nonnegative");
    require_multiple(T, eta, "T");
  }
  if (!needs_k(kind) && k != 0) throw ConfigError("parameter k only applies to Berman constants");
  if (k < 0) throw ConfigError("k must be nonnegative");
  require_multiple(trunc, eta, "truncation");
}

std::string ConstantKey::canonical() const {
  std::ostringstream s;
  s << to_string(kind) << "|eta=" << fmt_double(eta);
  if (needs_a(kind)) s << "|a=" << fmt_double(a);
  if (needs_T(kind)) s << "|T=" << fmt_double(T);
  if (needs_k(kind)) s << "|k=" << k << "|threshold=" << to_string(threshold);
  s << "|trunc=" << fmt_double(trunc) << "|n=" << n_samples << "|seed=" << seed;
  return s.str();
}

void sample_two_sided(double eta, std::int64_t half_steps, RandomStream& rng, std::vector<double>& w) {
  const auto half = static_cast<std::size_t>(half_steps);
  w.resize(2 * half + 1);
  const double sd = std::sqrt(eta);
  w[half] = 0.0;
  double b = 0.0;
  for (std::size_t j = 1; j <= half; ++j) {
    b += sd * rng.next_normal();
    w[half + j] = std::numbers::sqrt2 * b - static_cast<double>(j) * eta;
  }
  b = 0.0;
  for (std::size_t j = 1; j <= half; ++j) {
    b += sd * rng.next_normal();
    w[half - j] = std::numbers::sqrt2 * b - static_cast<double>(j) * eta;
  }
}

void sample_one_sided(double eta, std::int64_t steps, RandomStream& rng, std::vector<double>& w) {
  const auto n = static_cast<std::size_t>(steps);
  w.resize(n + 1);
  const double sd = std::sqrt(eta);
  w[0] = 0.0;
  double b = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    b += sd * rng.next_normal();
    w[j] = std::numbers::sqrt2 * b - static_cast<double>(j) * eta;
  }
}

PathValue dy_ratio(std::span<const double> w) {
  const ExpSum es = exp_sum(w);
  return {std::exp(w[es.argmax] - es.max) / es.sum, es.argmax};
}

PathValue parisian_ratio(std::span<const double> w, std::int64_t window_steps) {
  if (window_steps < 0) throw ConfigError("window must be nonnegative");
  const auto window = static_cast<std::size_t>(window_steps);
  if (window + 1 > w.size()) throw ConfigError("window longer than the path");
  const ExpSum es = exp_sum(w);
  if (window == 0) return {std::exp(w[es.argmax] - es.max) / es.sum, es.argmax};

  // Sliding-window minimum; best window reported by its start index.
  std::deque<std::size_t> q;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_start = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    while (!q.empty() && w[q.back()] >= w[i]) q.pop_back();
    q.push_back(i);
    if (i >= window) {
      const std::size_t start = i - window;
      while (q.front() < start) q.pop_front();
      if (w[q.front()] > best) {
        best = w[q.front()];
        best_start = start;
      }
    }
  }
  return {std::exp(best - es.max) / es.sum, best_start};
}

PathValue diff_functional(std::span<const double> w) {
  double rest = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] > rest) {
      rest = w[i];
      arg = i;
    }
  }
  const double rest_exp = std::exp(rest);
  const double all_exp = std::max(std::exp(w[0]), rest_exp);
  return {all_exp - rest_exp, w[0] >= rest ? 0 : arg};
}

PathValue piterbarg_functional(std::span<const double> w, double eta, double a) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i] - a * static_cast<double>(i) * eta;
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return {std::exp(best), arg};
}

namespace {
// m-th largest entry of w (1-based), by selection on a copy.
double mth_largest(std::span<const double> w, std::int64_t m, std::vector<double>& work) {
  if (m < 1 || static_cast<std::size_t>(m) > w.size()) throw ConfigError("rank m outside the path");
  work.assign(w.begin(), w.end());
  auto nth = work.begin() + (m - 1);
  std::nth_element(work.begin(), nth, work.end(), std::greater<>());
  return *nth;
}
}  // namespace

PathValue berman_finite(std::span<const double> w, std::int64_t m) {
  std::vector<double> work;
  const double mm = mth_largest(w, m, work);
  const auto arg = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  return {std::exp(mm), arg};
}

PathValue berman_limit_ratio(std::span<const double> w, std::int64_t m) {
  const ExpSum es = exp_sum(w);
  if (m == 1) return {std::exp(w[es.argmax] - es.max) / es.sum, es.argmax};
  std::vector<double> work;
  const double mm = mth_largest(w, m, work);
  return {std::exp(mm - es.max) / es.sum, es.argmax};
}

ConstantValue pickands_dy(double eta, const SamplingOptions& opts) {
  check_common(eta, opts.trunc, opts.n);
  const std::int64_t half = require_multiple(opts.trunc, eta, "truncation");
  return run_estimator(opts.n, opts.seed, opts.threads, 1.0 / eta,
                       [&](RandomStream& rng, std::vector<double>& w) {
                         sample_two_sided(eta, half, rng, w);
                         const PathValue pv = dy_ratio(w);
                         return std::pair{pv.value, two_sided_boundary(pv.extremal_index, half)};
                       });
}

ConstantValue pickands_diff(double eta, const SamplingOptions& opts) {
  check_common(eta, opts.trunc, opts.n);
  const std::int64_t steps = require_multiple(opts.trunc, eta, "truncation");
  return run_estimator(opts.n, opts.seed, opts.threads, 1.0 / eta,
                       [&](RandomStream& rng, std::vector<double>& w) {
                         sample_one_sided(eta, steps, rng, w);
                         const PathValue pv = diff_functional(w);
                         return std::pair{pv.value, one_sided_boundary(pv.extremal_index, steps)};
                       });
}

ConstantValue piterbarg(double eta, double a, const SamplingOptions& opts) {
  check_common(eta, opts.trunc, opts.n);
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("a must be positive");
  const std::int64_t steps = require_multiple(opts.trunc, eta, "truncation");
  ConstantValue out = run_estimator(opts.n, opts.seed, opts.threads, 1.0,
                                    [&](RandomStream& rng, std::vector<double>& w) {
                                      sample_one_sided(eta, steps, rng, w);
                                      const PathValue pv = piterbarg_functional(w, eta, a);
                                      return std::pair{pv.value, one_sided_boundary(pv.extremal_index, steps)};
                                    });
  if (a < kPiterbargHeavyTail) {
    out.warnings.push_back("a < 0.05: heavy-tailed functional, truncation bias and variance grow as a -> 0");
  }
  return out;
}

ConstantValue parisian_constant(double eta, double T, const SamplingOptions& opts) {
  check_common(eta, opts.trunc, opts.n);
  if (!(T >= 0.0)) throw ConfigError("T must be nonnegative");
  const std::int64_t window = require_multiple(T, eta, "T");
  if (!(opts.trunc >= kMinTrunc + T)) throw ConfigError("truncation must be at least 5 + T");
  const std::int64_t half = require_multiple(opts.trunc, eta, "truncation");
  return run_estimator(opts.n, opts.seed, opts.threads, 1.0 / eta,
                       [&](RandomStream& rng, std::vector<double>& w) {
                         sample_two_sided(eta, half, rng, w);
                         const PathValue pv = parisian_ratio(w, window);
                         return std::pair{pv.value, two_sided_boundary(pv.extremal_index, half)};
                       });
}

ConstantValue berman(double eta, std::int64_t k, BermanThreshold threshold, const SamplingOptions& opts) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
  if (opts.n == 0) throw ConfigError("number of samples must be positive");
  const double S = opts.trunc;
  if (!(S > 0.0)) throw ConfigError("S must be positive");
  const std::int64_t steps = require_multiple(S, eta, "S");
  const std::int64_t m = berman_rank(eta, k, threshold);
  if (steps + 1 < m) throw ConfigError("S too small: fewer than m grid points in [0, S]");
  return run_estimator(opts.n, opts.seed, opts.threads, 1.0 / S,
                       [&](RandomStream& rng, std::vector<double>& w) {
                         sample_one_sided(eta, steps, rng, w);
                         const PathValue pv = berman_finite(w, m);
                         return std::pair{pv.value, one_sided_boundary(pv.extremal_index, steps)};
                       });
}

ConstantValue berman_limit(double eta, std::int64_t k, BermanThreshold threshold, const SamplingOptions& opts) {
  check_common(eta, opts.trunc, opts.n);
  const std::int64_t half = require_multiple(opts.trunc, eta, "truncation");
  const std::int64_t m = berman_rank(eta, k, threshold);
  if (2 * half + 1 < m) throw ConfigError("truncation too small: fewer than m grid points");
  return run_estimator(opts.n, opts.seed, opts.threads, 1.0 / eta,
                       [&](RandomStream& rng, std::vector<double>& w) {
                         sample_two_sided(eta, half, rng, w);
                         const PathValue pv = berman_limit_ratio(w, m);
                         return std::pair{pv.value, two_sided_boundary(pv.extremal_index, half)};
                       });
}

ConstantValue estimate(const ConstantKey& key, unsigned threads) {
  key.validate();
  const SamplingOptions opts{key.trunc, key.n_samples, key.seed, threads};
  switch (key.kind) {
    case ConstantKind::pickands_dy: return pickands_dy(key.eta, opts);
    case ConstantKind::pickands_diff: return pickands_diff(key.eta, opts);
    case ConstantKind::piterbarg: return piterbarg(key.eta, key.a, opts);
    case ConstantKind::parisian: return parisian_constant(key.eta, key.T, opts);
    case ConstantKind::berman: return berman(key.eta, key.k, key.threshold, opts);
    case ConstantKind::berman_limit: return berman_limit(key.eta, key.k, key.threshold, opts);
  }
  throw ConfigError("unknown constant kind");
}

BermanPlateau berman_plateau(double eta, std::int64_t k, BermanThreshold threshold,
                             std::span<const double> horizons, const SamplingOptions& opts) {
  if (horizons.size() < 2) throw ConfigError("plateau check needs at least two horizons");
  BermanPlateau out;
  for (double S : horizons) {
    SamplingOptions o = opts;
    o.trunc = S;
    out.horizons.push_back(S);
    out.values.push_back(berman(eta, k, threshold, o));
  }
  const auto& last = out.values.back();
  const auto& prev = out.values[out.values.size() - 2];
  const double combined = std::hypot(last.std_error, prev.std_error);
  out.plateau = std::abs(last.estimate - prev.estimate) < 2.0 * combined;
  return out;
}

namespace {
double round_up_to_grid(double length, double eta) {
  const double steps = std::ceil(length / eta - 1e-9);
  return steps * eta;
}
}  // namespace

ConstantKey key_for_model(ConstantKind kind, const ModelParams& params, const Grid& grid,
                          const VariantParams& variant, const ConstantPrecision& precision) {
  params.validate();
  const double c2 = params.c * params.c;
  ConstantKey key;
  key.kind = kind;
  key.eta = 2.0 * c2 * grid.delta();
  key.n_samples = precision.n;
  key.seed = precision.seed;
  double trunc = precision.trunc;

  switch (kind) {
    case ConstantKind::pickands_dy:
    case ConstantKind::pickands_diff:
      break;
    case ConstantKind::piterbarg: {
      if (!variant.gamma) throw ConfigError("piterbarg constant requires gamma");
      const double g = *variant.gamma;
      if (!(g > 0.0 && g < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
      key.a = g / (1.0 - g);
      key.eta = 2.0 * c2 * (1.0 - g) * (1.0 - g) * grid.delta();
      break;
    }
    case ConstantKind::parisian: {
      const double T = variant.parisian_T.value_or(0.0);
      const auto steps = grid_steps(T, grid.delta());
      if (!steps) throw ConfigError("T must be a multiple of delta");
      key.T = static_cast<double>(*steps) * key.eta;
      trunc = std::max(trunc, kMinTrunc + key.T);
      break;
    }
    case ConstantKind::berman:
    case ConstantKind::berman_limit:
      key.k = variant.cumulative_k.value_or(0);
      // The ruin event counts grid points, so the matching constant does too.
      key.threshold = BermanThreshold::count;
      break;
  }
  key.trunc = round_up_to_grid(trunc, key.eta);
  key.validate();
  return key;
}

ConstantValue constant_for_model(ConstantKind kind, const ModelParams& params, const Grid& grid,
                                 const VariantParams& variant, const ConstantPrecision& precision,
                                 ConstantCache* cache) {
  const ConstantKey key = key_for_model(kind, params, grid, variant, precision);
  if (cache) {
    if (auto hit = cache->find(key)) return *hit;
  }
  ConstantValue value = estimate(key, precision.threads);
  if (cache) cache->store(key, value);
  return value;
}

}  // namespace gridruin::constants
