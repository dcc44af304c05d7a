#pragma once

// Replication-parallel Monte Carlo engine with schedule-independent results.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace uclt::lab {

/// Stream tags keep the randomness of different checks independent.
enum class Stream : std::uint64_t {
  Eta = 1,
  Moments = 2,
  Osekowski = 3,
  TailSum = 4,
  MartingaleProperty = 5,
  Covariance = 6,
  CltSmall = 7,
  CltLarge = 8,
  Equicontinuity = 9,
  Weights = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `replication` in `stream`: a pure function of its arguments.
constexpr std::uint64_t substream_seed(std::uint64_t master, Stream stream,
                                       std::uint64_t replication) {
  const std::uint64_t base = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream)));
  return splitmix64(base + replication);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, Stream stream, std::uint64_t replication) {
  return Engine(substream_seed(master, stream, replication));
}

struct LabOptions {
  /// Worker cap; 0 means hardware concurrency. Never affects results.
  unsigned threads = 1;
  /// Replications are cut into this many fixed blocks (also the jackknife groups).
  std::size_t blocks = 20;
};

unsigned resolve_threads(unsigned requested);

/// Half-open replication range of block `b` out of `blocks` for `replications` total.
inline std::pair<std::size_t, std::size_t> block_range(std::size_t replications,
                                                       std::size_t blocks, std::size_t b) {
  return {b * replications / blocks, (b + 1) * replications / blocks};
}

/// Runs `work(block, begin, end)` for every block and returns the per-block results in block
/// order. Blocks are fixed up front, so results are identical for any thread count.
template <class Result>
std::vector<Result> run_blocks(std::size_t replications, const LabOptions& options,
                               const std::function<Result(std::size_t, std::size_t, std::size_t)>& work) {
  const std::size_t blocks = std::max<std::size_t>(1, std::min(options.blocks, std::max<std::size_t>(replications, 1)));
  std::vector<Result> results(blocks);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(options.threads), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto [begin, end] = block_range(replications, blocks, b);
      results[b] = work(b, begin, end);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = next++; b < blocks; b = next++) {
            const auto [begin, end] = block_range(replications, blocks, b);
            results[b] = work(b, begin, end);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace uclt::lab
