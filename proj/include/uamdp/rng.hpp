#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uamdp {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> streams) {
  std::uint64_t s = base;
  for (auto v : streams) s = derive_seed(s, v);
  return s;
}

// Named streams keep seed derivations readable at call sites.
enum class Stream : std::uint64_t {
  thompson = 1,
  planner = 2,
  environment = 3,
  market = 4,
  particles = 5,
  noise = 6,
  forecaster_train = 7,
  episode = 8,
  agent = 9,
};

inline std::uint64_t derive_seed(std::uint64_t base, Stream s, std::uint64_t index = 0) {
  return derive_seed(base, {static_cast<std::uint64_t>(s), index});
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace uamdp
