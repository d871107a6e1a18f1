#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace weyl {

// Deterministic, implementation-independent RNG (splitmix64).  The standard
// distributions are not pinned across library versions, so experiment
// reproducibility goes through this instead.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() {  // in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double gaussian() {  // Box-Muller, deterministic pairing
    double u1 = uniform01(), u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * 3.14159265358979323846 * u2);
  }

  SplitMix64 fork(std::uint64_t stream) const {
    SplitMix64 child(state ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    child.next();
    return child;
  }
};

// Pairwise (tree) summation in the given order; the reduction shape depends
// only on the length, so results are bit-stable.
inline std::complex<double> tree_sum(std::vector<std::complex<double>>& terms) {
  if (terms.empty()) return {0.0, 0.0};
  size_t n = terms.size();
  while (n > 1) {
    size_t half = (n + 1) / 2;
    for (size_t i = 0; i + half < n; ++i) terms[i] += terms[i + half];
    n = half;
  }
  return terms[0];
}

inline int default_thread_budget() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Deterministic parallel map: jobs are cut into fixed-size chunks and results
// written by index, so the output does not depend on the thread budget.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int threads, F&& fn) {
  std::vector<T> out(count);
  if (count == 0) return out;
  threads = std::max(1, threads);
  if (threads == 1 || count < 8) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::future<void>> futures;
  for (int t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    futures.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

// FNV-1a, for config hashes in report headers.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace weyl
