#ifndef BGCS_RANDOM_HPP
#define BGCS_RANDOM_HPP

// Deterministic per-worker random streams and mergeable running moments.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

#include "bgcs/errors.hpp"

namespace bgcs {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 42;

/// One splitmix64 step; used only to spread (seed, stream) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Engine for stream `stream` of `seed`. Streams are the worker indices.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  return Engine(seq);
}

/// Welford accumulator; merge() follows Chan et al. so per-worker partials combine exactly.
class RunningMoments {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningMoments& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double n = n1 + n2;
    mean_ += delta * n2 / n;
    m2_ += other.m2_ + delta * delta * n1 * n2 / n;
    count_ += other.count_;
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double standard_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Splits `samples` into contiguous blocks, one per worker. Worker w draws from
/// make_stream(seed, w) and fills its own copy of `proto`; the copies are returned in
/// worker order so the caller's reduction is independent of thread scheduling.
///
/// body(Engine&, Acc&, std::size_t count) must not touch shared mutable state.
template <class Acc, class Body>
std::vector<Acc> run_streams(std::uint64_t seed, std::size_t samples, unsigned workers, const Acc& proto, Body body) {
  if (workers == 0) throw PreconditionError("run_streams: need at least one worker");
  std::vector<Acc> partial(workers, proto);
  std::vector<std::exception_ptr> failures(workers);
  auto task = [&](unsigned w) {
    try {
      const std::size_t begin = samples * w / workers;
      const std::size_t end = samples * (w + 1) / workers;
      Engine engine = make_stream(seed, w);
      body(engine, partial[w], end - begin);
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    task(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(task, w);
    for (auto& t : threads) t.join();
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return partial;
}

}  // namespace bgcs

#endif  // BGCS_RANDOM_HPP
