#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ordwalk {

/// Process-wide worker count used by all estimators (default: hardware).
void set_workers(int n);
int workers();

/// Items per block. Blocks are the unit of work and of reduction: partial
/// results are returned in block order, so a fixed block size makes every
/// reduction independent of how many workers ran.
inline constexpr std::uint64_t kBlockSize = 4096;

/// Calls fn(begin, end) for consecutive blocks of [0, n) on the worker pool
/// and returns the per-block results in block order.
template <class Fn>
auto run_blocks(std::uint64_t n, Fn&& fn, std::uint64_t block = kBlockSize) {
  using R = decltype(fn(std::uint64_t{0}, std::uint64_t{0}));
  const std::uint64_t nblocks = n == 0 ? 0 : (n + block - 1) / block;
  std::vector<R> out(nblocks);
  const int nw = static_cast<int>(std::min<std::uint64_t>(std::max(1, workers()), std::max<std::uint64_t>(nblocks, 1)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      try {
        out[b] = fn(b * block, std::min(n, (b + 1) * block));
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next = nblocks;
        return;
      }
    }
  };
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

/// run_blocks followed by an in-order merge(acc, partial).
template <class Acc, class Fn>
Acc reduce_blocks(std::uint64_t n, Fn&& fn, std::uint64_t block = kBlockSize) {
  auto parts = run_blocks(n, std::forward<Fn>(fn), block);
  Acc acc{};
  for (auto& p : parts) acc.merge(p);
  return acc;
}

}  // namespace ordwalk
