#ifndef PGC_PARALLEL_HPP
#define PGC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pgc {

/// Rows per work unit. Results are reduced per chunk, so they depend on this
/// constant but never on the thread count.
inline constexpr std::size_t kChunkRows = 64;

/// Calls fn(chunk, begin, end) for each chunk of [0, n). Chunks are handed
/// out to `threads` workers; the first exception is rethrown.
template <typename Fn>
void for_each_chunk(std::size_t n, std::size_t threads, Fn&& fn) {
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  auto run = [&](std::size_t c) {
    fn(c, c * kChunkRows, std::min(n, (c + 1) * kChunkRows));
  };
  threads = std::max<std::size_t>(1, std::min(threads, chunks));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = chunks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise reduction in a fixed tree shape: ((0+1)+(2+3))+... . `add`
/// folds its second argument into the first.
template <typename T, typename Add>
T tree_reduce(std::vector<T> parts, Add&& add) {
  if (parts.empty()) return T{};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      add(parts[i], parts[i + stride]);
    }
  }
  return std::move(parts.front());
}

}  // namespace pgc

#endif  // PGC_PARALLEL_HPP
