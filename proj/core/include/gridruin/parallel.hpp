#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gridruin {

// Replicates are cut into fixed-size blocks; each block is reduced
// sequentially, and block partials are merged in block order. The worker
// count only decides who computes a block, never the arithmetic.
inline constexpr std::uint64_t kReplicateBlock = 2048;

// Clamps a requested worker count; 0 means "all hardware threads".
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// `block_fn(first, last)` returns a partial for replicates [first, last);
// `merge(acc, partial)` folds partials left to right.
template <class Partial, class BlockFn, class Merge>
Partial reduce_replicates(std::uint64_t n, unsigned threads, BlockFn&& block_fn, Merge&& merge) {
  const std::uint64_t n_blocks = (n + kReplicateBlock - 1) / kReplicateBlock;
  std::vector<Partial> partials(n_blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::uint64_t first = b * kReplicateBlock;
      const std::uint64_t last = std::min(n, first + kReplicateBlock);
      try {
        partials[b] = block_fn(first, last);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n_blocks, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Partial total{};
  for (auto& p : partials) merge(total, p);
  return total;
}

}  // namespace gridruin
