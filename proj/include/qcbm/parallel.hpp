#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qcbm {

/// Shots per chunk in chunked sampling. Fixed so that the chunk → seed
/// mapping, and therefore every result, is independent of thread count.
inline constexpr std::uint64_t kShotChunk = 1u << 16;

/// Runs `fn(chunk_index, first, count)` over `total` items split into fixed
/// chunks, on up to `threads` workers. Callers merge per-chunk results in
/// chunk order.
template <typename Fn>
void for_each_chunk(std::uint64_t total, unsigned threads, Fn&& fn) {
  const std::uint64_t chunks = (total + kShotChunk - 1) / kShotChunk;
  auto body = [&](std::uint64_t c) {
    const std::uint64_t first = c * kShotChunk;
    fn(c, first, std::min(kShotChunk, total - first));
  };
  threads = std::max(1u, threads);
  if (threads == 1 || chunks <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::uint64_t c = t; c < chunks; c += threads) body(c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers. Each index
/// is an independent job; callers store results by index.
template <typename Fn>
void parallel_for_each(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qcbm
