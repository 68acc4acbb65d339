#include "gridruin/constant_cache.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "gridruin/errors.hpp"

namespace gridruin {

using nlohmann::json;
using constants::ConstantKey;
using constants::ConstantValue;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

json key_to_json(const ConstantKey& key) {
  return json{{"kind", std::string(constants::to_string(key.kind))},
              {"eta", key.eta},
              {"a", key.a},
              {"T", key.T},
              {"k", key.k},
              {"threshold", std::string(constants::to_string(key.threshold))},
              {"trunc", key.trunc},
              {"n", key.n_samples},
              {"seed", key.seed}};
}

ConstantKey key_from_json(const json& j) {
  ConstantKey key;
  key.kind = constants::parse_constant_kind(j.at("kind").get<std::string>());
  key.eta = j.at("eta").get<double>();
  key.a = j.at("a").get<double>();
  key.T = j.at("T").get<double>();
  key.k = j.at("k").get<std::int64_t>();
  key.threshold = constants::parse_berman_threshold(j.at("threshold").get<std::string>());
  key.trunc = j.at("trunc").get<double>();
  key.n_samples = j.at("n").get<std::uint64_t>();
  key.seed = j.at("seed").get<std::uint64_t>();
  return key;
}

}  // namespace

ConstantCache::ConstantCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

void ConstantCache::load() {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json record = json::parse(line);
      const std::string checksum = record.at("checksum").get<std::string>();
      record.erase("checksum");
      if (hex16(fnv1a64(record.dump())) != checksum) {
        ++corrupted_;
        continue;
      }
      ConstantValue value;
      value.estimate = record.at("estimate").get<double>();
      value.std_error = record.at("std_error").get<double>();
      value.boundary_fraction = record.at("boundary_fraction").get<double>();
      value.n = record.at("n").get<std::uint64_t>();
      entries_[key_from_json(record).canonical()] = value;
    } catch (const std::exception&) {
      ++corrupted_;
    }
  }
}

std::optional<ConstantValue> ConstantCache::find(const ConstantKey& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key.canonical());
  if (it == entries_.end()) return std::nullopt;
  ConstantValue v = it->second;
  v.cached = true;
  return v;
}

void ConstantCache::store(const ConstantKey& key, const ConstantValue& value) {
  std::lock_guard lock(mutex_);
  json record = key_to_json(key);
  record["estimate"] = value.estimate;
  record["std_error"] = value.std_error;
  record["boundary_fraction"] = value.boundary_fraction;
  record["timestamp"] = utc_timestamp();
  record["checksum"] = hex16(fnv1a64(record.dump()));

  std::ofstream out(path_, std::ios::app);
  if (!out) throw NumericalError("cannot open constant cache " + path_.string());
  out << record.dump() << '\n';
  if (!out.flush()) throw NumericalError("cannot write constant cache " + path_.string());

  ConstantValue stored = value;
  stored.cached = false;
  stored.warnings.clear();
  entries_[key.canonical()] = stored;
}

std::size_t ConstantCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t ConstantCache::corrupted_lines() const {
  std::lock_guard lock(mutex_);
  return corrupted_;
}

}  // namespace gridruin
