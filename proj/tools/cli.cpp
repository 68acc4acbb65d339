#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridruin/analytic.hpp"
#include "gridruin/asymptotics.hpp"
#include "gridruin/constant_cache.hpp"
#include "gridruin/constants.hpp"
#include "gridruin/errors.hpp"
#include "gridruin/estimators.hpp"
#include "gridruin/normal.hpp"

namespace gridruin::cli {

namespace {

using Record = nlohmann::ordered_json;

struct RunConfig {
  // shared
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string format = "csv";
  std::string out_path;
  std::string cache_path;
  std::string config_path;

  // model
  std::string variant = "classical";
  double c = 1.0;
  double u = 1.0;
  std::string u_list = "4,6,8,10";
  double delta = 0.1;
  std::optional<double> gamma;
  std::optional<double> T;
  std::optional<std::int64_t> k;
  std::string method = "tilted";
  std::optional<std::uint64_t> n;
  double horizon_mult = kDefaultWindowMult;

  // constants
  std::string kind = "pickands_dy";
  std::optional<double> eta;
  std::optional<double> a;
  std::string threshold = "eta_weighted";
  std::optional<double> S;
  double trunc = 20.0;
  bool plateau = false;
  std::uint64_t const_n = 200000;

  // ruin time
  std::optional<double> delta2;
};

// --- output ---------------------------------------------------------------

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_cell(const Record& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return v.dump();
}

// CSV (header from the first record's keys) or JSON Lines; both render the
// same fields in the same order.
class RecordWriter {
 public:
  RecordWriter(std::ostream& os, std::string format) : os_(os), format_(std::move(format)) {}

  void write(const Record& r) {
    if (format_ == "json") {
      os_ << r.dump() << '\n';
      return;
    }
    if (!header_written_) {
      bool first = true;
      for (const auto& [key, _] : r.items()) {
        os_ << (first ? "" : ",") << key;
        first = false;
      }
      os_ << '\n';
      header_written_ = true;
    }
    bool first = true;
    for (const auto& [_, value] : r.items()) {
      os_ << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  std::string format_;
  bool header_written_ = false;
};

template <class T>
Record optional_json(const std::optional<T>& v) {
  return v ? Record(*v) : Record(nullptr);
}

void emit_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// --- config ---------------------------------------------------------------

void add_shared_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Base seed for replicate streams");
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores); never changes results");
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", cfg.out_path, "Write records to this file instead of stdout");
  sub->add_option("--cache", cfg.cache_path, "Constant cache file (append-only)");
  sub->add_option("--config", cfg.config_path, "key=value file; command-line flags take precedence");
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--variant", cfg.variant, "classical|reflected|parisian|cumulative");
  sub->add_option("--c", cfg.c, "Premium rate");
  sub->add_option("--delta", cfg.delta, "Grid step");
  sub->add_option("--gamma", cfg.gamma, "Reflection parameter (reflected)");
  sub->add_option("--T", cfg.T, "Parisian window length, a multiple of delta");
  sub->add_option("--k", cfg.k, "Exceedance count threshold (cumulative)");
  sub->add_option("--horizon-mult", cfg.horizon_mult, "Horizon window multiplier");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Applies key=value lines to options not given on the command line.
void merge_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "config") throw ConfigError("config files cannot include other config files");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

VariantParams variant_params(const RunConfig& cfg) {
  VariantParams vp;
  vp.gamma = cfg.gamma;
  vp.parisian_T = cfg.T;
  vp.cumulative_k = cfg.k;
  return vp;
}

std::string variant_extra(const VariantParams& vp) {
  std::ostringstream s;
  if (vp.gamma) s << "gamma=" << format_number(*vp.gamma);
  if (vp.parisian_T) s << "T=" << format_number(*vp.parisian_T);
  if (vp.cumulative_k) s << "k=" << *vp.cumulative_k;
  return s.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + t + "' in list");
    }
  }
  if (values.empty()) throw ConfigError("empty value list");
  return values;
}

void check_common(const RunConfig& cfg) {
  if (cfg.horizon_mult <= 0.0) throw ConfigError("horizon multiplier must be positive");
  if (cfg.n && *cfg.n == 0) throw ConfigError("n must be positive");
}

std::unique_ptr<ConstantCache> open_cache(const RunConfig& cfg, std::ostream& err) {
  if (cfg.cache_path.empty()) return nullptr;
  auto cache = std::make_unique<ConstantCache>(cfg.cache_path);
  if (cache->corrupted_lines() > 0) {
    err << "warning: skipped " << cache->corrupted_lines() << " corrupted line(s) in " << cfg.cache_path << '\n';
  }
  return cache;
}

// --- commands -------------------------------------------------------------

void cmd_estimate(const RunConfig& cfg, RecordWriter& writer, std::ostream& err) {
  check_common(cfg);
  EstimateRequest r;
  r.variant = parse_variant(cfg.variant);
  r.params = {cfg.c, cfg.u};
  r.params.validate();
  r.delta = Grid(cfg.delta).delta();
  r.variant_params = variant_params(cfg);
  r.variant_params.validate(r.variant, Grid(cfg.delta));
  r.method = parse_method(cfg.method);
  r.n = cfg.n.value_or(r.method == Method::crude ? 1000000 : 100000);
  r.seed = cfg.seed;
  r.threads = cfg.threads;
  r.horizon = default_horizon(r.params, cfg.horizon_mult);

  const auto start = std::chrono::steady_clock::now();
  const Estimate e = estimate(r);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Record rec;
  rec["command"] = "estimate";
  rec["variant"] = cfg.variant;
  rec["c"] = cfg.c;
  rec["u"] = cfg.u;
  rec["delta"] = cfg.delta;
  rec["gamma"] = optional_json(cfg.gamma);
  rec["T"] = optional_json(cfg.T);
  rec["k"] = optional_json(cfg.k);
  rec["method"] = cfg.method;
  rec["n"] = e.n;
  rec["seed"] = cfg.seed;
  rec["horizon_mult"] = cfg.horizon_mult;
  rec["horizon"] = e.horizon;
  rec["steps"] = e.steps;
  rec["value"] = e.value;
  rec["std_error"] = e.std_error;
  rec["ci95_low"] = e.ci_low;
  rec["ci95_high"] = e.ci_high;
  rec["horizon_bias_bound"] = e.horizon_bias_bound;
  rec["hits"] = e.hits;
  writer.write(rec);
  emit_warnings(e.warnings, err);
  err << "wall_time_s=" << format_number(wall) << '\n';
}

constants::ConstantKey constant_key(const RunConfig& cfg) {
  using namespace constants;
  const ConstantKind kind = parse_constant_kind(cfg.kind);
  const std::uint64_t n = cfg.n.value_or(200000);
  if (!cfg.eta) {
    // Constant implied by a ruin model on grid delta.
    const ConstantPrecision precision{cfg.S.value_or(cfg.trunc), n, cfg.seed, cfg.threads};
    VariantParams vp = variant_params(cfg);
    return key_for_model(kind, ModelParams{cfg.c, 0.0}, Grid(cfg.delta), vp, precision);
  }
  ConstantKey key;
  key.kind = kind;
  key.eta = *cfg.eta;
  key.a = cfg.a.value_or(0.0);
  key.T = cfg.T.value_or(0.0);
  key.k = cfg.k.value_or(0);
  key.threshold = parse_berman_threshold(cfg.threshold);
  key.trunc = kind == ConstantKind::berman ? cfg.S.value_or(cfg.trunc) : cfg.trunc;
  key.n_samples = n;
  key.seed = cfg.seed;
  key.validate();
  return key;
}

Record constant_record(const constants::ConstantKey& key, const constants::ConstantValue& v) {
  using namespace constants;
  const bool berman_kind = key.kind == ConstantKind::berman || key.kind == ConstantKind::berman_limit;
  Record rec;
  rec["command"] = "constant";
  rec["kind"] = std::string(to_string(key.kind));
  rec["eta"] = key.eta;
  rec["a"] = key.kind == ConstantKind::piterbarg ? Record(key.a) : Record(nullptr);
  rec["T"] = key.kind == ConstantKind::parisian ? Record(key.T) : Record(nullptr);
  rec["k"] = berman_kind ? Record(key.k) : Record(nullptr);
  rec["threshold"] = berman_kind ? Record(std::string(to_string(key.threshold))) : Record(nullptr);
  rec["m"] = berman_kind ? Record(berman_rank(key.eta, key.k, key.threshold)) : Record(nullptr);
  rec["trunc"] = key.trunc;
  rec["n"] = key.n_samples;
  rec["seed"] = key.seed;
  rec["estimate"] = v.estimate;
  rec["std_error"] = v.std_error;
  rec["ci95_low"] = v.estimate - kZ95 * v.std_error;
  rec["ci95_high"] = v.estimate + kZ95 * v.std_error;
  rec["boundary_fraction"] = v.boundary_fraction;
  rec["boundary_warning"] = v.boundary_warning();
  rec["cached"] = v.cached;
  return rec;
}

void cmd_constant(const RunConfig& cfg, RecordWriter& writer, std::ostream& err) {
  using namespace constants;
  check_common(cfg);
  const ConstantKey key = constant_key(cfg);

  if (cfg.plateau) {
    if (key.kind != ConstantKind::berman) throw ConfigError("--plateau applies to --kind berman only");
    const std::vector<double> horizons{25.0, 50.0, 100.0};
    const BermanPlateau p = berman_plateau(key.eta, key.k, key.threshold, horizons,
                                           SamplingOptions{key.trunc, key.n_samples, key.seed, cfg.threads});
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      ConstantKey k = key;
      k.trunc = p.horizons[i];
      Record rec = constant_record(k, p.values[i]);
      rec["plateau"] = p.plateau;
      writer.write(rec);
      emit_warnings(p.values[i].warnings, err);
    }
    return;
  }

  auto cache = open_cache(cfg, err);
  std::optional<ConstantValue> value;
  if (cache) value = cache->find(key);
  if (!value) {
    value = constants::estimate(key, cfg.threads);
    if (cache) cache->store(key, *value);
  }
  writer.write(constant_record(key, *value));
  emit_warnings(value->warnings, err);
}

void cmd_validate(const RunConfig& cfg, RecordWriter& writer, std::ostream& err) {
  check_common(cfg);
  const Variant variant = parse_variant(cfg.variant);
  const Grid grid(cfg.delta);
  const VariantParams vp = variant_params(cfg);
  vp.validate(variant, grid);
  ModelParams{cfg.c, 0.0}.validate();
  const std::vector<double> us = parse_list(cfg.u_list);
  for (double u : us) ModelParams{cfg.c, u}.validate();

  auto cache = open_cache(cfg, err);
  asymptotics::EstimatingSource source(
      constants::ConstantPrecision{cfg.trunc, cfg.const_n, cfg.seed, cfg.threads}, cache.get());
  asymptotics::McConfig mc;
  mc.method = parse_method(cfg.method);
  mc.n = cfg.n.value_or(mc.method == Method::crude ? 1000000 : 100000);
  mc.seed = cfg.seed;
  mc.window_mult = cfg.horizon_mult;
  mc.threads = cfg.threads;

  const auto rows = asymptotics::validate_ratio(variant, cfg.c, us, grid, vp, source,
                                                asymptotics::make_mc_source(variant, cfg.c, grid, vp, mc));
  for (const auto& row : rows) {
    Record rec;
    rec["variant"] = cfg.variant;
    rec["u"] = row.u;
    rec["c"] = cfg.c;
    rec["delta"] = cfg.delta;
    rec["extra"] = variant_extra(vp);
    rec["mc"] = row.mc;
    rec["mc_se"] = row.mc_se;
    rec["approx"] = row.approx;
    rec["approx_se"] = row.approx_se;
    rec["ratio"] = row.ratio;
    rec["ratio_se"] = row.ratio_se;
    rec["method"] = cfg.method;
    rec["n"] = mc.n;
    rec["seed"] = cfg.seed;
    rec["const_n"] = cfg.const_n;
    rec["trunc"] = cfg.trunc;
    rec["horizon_mult"] = cfg.horizon_mult;
    writer.write(rec);
  }
}

void cmd_ruin_time(const RunConfig& cfg, RecordWriter& writer, std::ostream& err) {
  check_common(cfg);
  EstimateRequest r;
  r.variant = parse_variant(cfg.variant);
  r.params = {cfg.c, cfg.u};
  r.params.validate();
  if (!(cfg.u > 0.0)) throw ConfigError("ruin-time requires u > 0");
  r.variant_params = variant_params(cfg);
  r.n = cfg.n.value_or(100000);
  r.seed = cfg.seed;
  r.threads = cfg.threads;
  r.horizon = default_horizon(r.params, cfg.horizon_mult);

  const std::vector<double> deltas{cfg.delta, cfg.delta2.value_or(cfg.delta / 2.0)};
  for (double d : deltas) r.variant_params.validate(r.variant, Grid(d));

  auto base = [&](const char* record, double delta) {
    Record rec;
    rec["record"] = record;
    rec["variant"] = cfg.variant;
    rec["c"] = cfg.c;
    rec["u"] = cfg.u;
    rec["delta"] = delta;
    rec["n"] = r.n;
    rec["seed"] = cfg.seed;
    return rec;
  };

  std::vector<double> ks;
  for (double d : deltas) {
    r.delta = d;
    const RuinTimeSample sample = ruin_time_distribution(r);
    emit_warnings(sample.warnings, err);
    for (int i = -8; i <= 8; ++i) {
      const double s = 0.25 * i;
      Record rec = base("quantile", d);
      rec["s"] = s;
      rec["f_hat"] = weighted_cdf(sample.points, s);
      rec["phi"] = normal::cdf(s);
      rec["ks"] = nullptr;
      writer.write(rec);
    }
    ks.push_back(weighted_ks_to_normal(sample.points));
    Record rec = base("ks", d);
    rec["s"] = nullptr;
    rec["f_hat"] = nullptr;
    rec["phi"] = nullptr;
    rec["ks"] = ks.back();
    writer.write(rec);
  }
  Record rec = base("ks_difference", deltas[1]);
  rec["s"] = nullptr;
  rec["f_hat"] = nullptr;
  rec["phi"] = nullptr;
  rec["ks"] = std::abs(ks[0] - ks[1]);
  writer.write(rec);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Discrete-grid ruin probabilities for the Brownian risk model"};
  app.require_subcommand(1);

  auto* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo ruin probability");
  add_shared_options(estimate_cmd, cfg);
  add_model_options(estimate_cmd, cfg);
  estimate_cmd->add_option("--u", cfg.u, "Initial capital");
  estimate_cmd->add_option("--method", cfg.method, "crude|tilted");
  estimate_cmd->add_option("--n", cfg.n, "Replicates (default: crude 1e6, tilted 1e5)");

  auto* constant_cmd = app.add_subcommand("constant", "Estimate a limiting constant");
  add_shared_options(constant_cmd, cfg);
  add_model_options(constant_cmd, cfg);
  constant_cmd->add_option("--kind", cfg.kind,
                           "pickands_dy|pickands_diff|piterbarg|parisian|berman|berman_limit");
  constant_cmd->add_option("--eta", cfg.eta, "Constant grid step (omit to derive from --c/--delta)");
  constant_cmd->add_option("--a", cfg.a, "Piterbarg drift parameter");
  constant_cmd->add_option("--threshold", cfg.threshold, "Berman count rule: eta_weighted|count");
  constant_cmd->add_option("--S", cfg.S, "Finite Berman horizon");
  constant_cmd->add_option("--trunc", cfg.trunc, "Truncation of the constant's grid");
  constant_cmd->add_option("--n", cfg.n, "Sample paths (default 2e5)");
  constant_cmd->add_flag("--plateau", cfg.plateau, "Berman plateau check over S = 25, 50, 100");

  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo / approximation ratio table");
  add_shared_options(validate_cmd, cfg);
  add_model_options(validate_cmd, cfg);
  validate_cmd->add_option("--u-list", cfg.u_list, "Comma-separated increasing u values");
  validate_cmd->add_option("--method", cfg.method, "crude|tilted");
  validate_cmd->add_option("--n", cfg.n, "Replicates per u");
  validate_cmd->add_option("--const-n", cfg.const_n, "Sample paths per constant");
  validate_cmd->add_option("--trunc", cfg.trunc, "Constant truncation");

  auto* ruin_time_cmd = app.add_subcommand("ruin-time", "Conditional ruin-time law vs the normal limit");
  add_shared_options(ruin_time_cmd, cfg);
  add_model_options(ruin_time_cmd, cfg);
  ruin_time_cmd->add_option("--u", cfg.u, "Initial capital");
  ruin_time_cmd->add_option("--n", cfg.n, "Tilted replicates per grid (default 1e5)");
  ruin_time_cmd->add_option("--delta2", cfg.delta2, "Second grid step (default delta/2)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!cfg.config_path.empty()) merge_config_file(active, cfg.config_path);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) throw ConfigError("cannot open output file " + cfg.out_path);
      sink = &file;
    }
    RecordWriter writer(*sink, cfg.format);

    if (active == estimate_cmd) cmd_estimate(cfg, writer, err);
    else if (active == constant_cmd) cmd_constant(cfg, writer, err);
    else if (active == validate_cmd) cmd_validate(cfg, writer, err);
    else cmd_ruin_time(cfg, writer, err);
    sink->flush();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace gridruin::cli
