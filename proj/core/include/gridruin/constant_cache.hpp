#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "gridruin/constants.hpp"

namespace gridruin {

// Append-only on-disk table of constant estimates.
//
// One JSON object per line:
//   {"kind", "eta", "a", "T", "k", "threshold", "trunc", "n", "seed",
//    "estimate", "std_error", "boundary_fraction", "timestamp", "checksum"}
// `checksum` is the FNV-1a 64-bit hash (16 hex digits) of the line's JSON
// serialisation with the checksum member removed (keys sorted, compact).
// Lines that fail to parse or whose checksum does not match are skipped and
// counted; the last valid record for a key wins.
//
// Lookups and appends are serialised by an internal mutex.
class ConstantCache {
 public:
  explicit ConstantCache(std::filesystem::path path);

  std::optional<constants::ConstantValue> find(const constants::ConstantKey& key) const;
  void store(const constants::ConstantKey& key, const constants::ConstantValue& value);

  std::size_t size() const;
  std::size_t corrupted_lines() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  void load();

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, constants::ConstantValue> entries_;
  std::size_t corrupted_ = 0;
};

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace gridruin
