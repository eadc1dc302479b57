#pragma once
/*
Reproducible sampling plumbing.

Streams: engine is std::mt19937_64; stream k of master seed s is seeded with
splitmix64 applied to (s, k), so chunked Monte-Carlo runs are deterministic
for a given master seed regardless of how chunks are scheduled.

AliasSampler: Vose alias tables for O(1) categorical draws. Index selection
uses the 128-bit multiply trick (no modulo bias); uniforms take the top 53
bits of the engine output.
*/
#include <cstdint>
#include <random>
#include <vector>

#include "missmass/errors.hpp"

namespace missmass {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

inline Engine make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return Engine(splitmix64(splitmix64(master_seed) ^ splitmix64(~stream_index)));
}

inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n) via multiply-shift.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(eng()) * n) >> 64);
}

class AliasSampler {
public:
  explicit AliasSampler(const std::vector<double>& weights)
      : accept_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    if (n == 0) fail(errc::bad_param, "alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) accept_[i] = 1.0, alias_[i] = i;
    for (std::uint32_t i : small) accept_[i] = 1.0, alias_[i] = i;
  }

  std::size_t draw(Engine& eng) const {
    const std::uint64_t i = uniform_index(eng, accept_.size());
    return uniform01(eng) < accept_[i] ? i : alias_[i];
  }

  std::size_t size() const noexcept { return accept_.size(); }

private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace missmass
