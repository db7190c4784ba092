#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace streamsched {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// The transforms below are spelled out instead of using <random>
// distributions so draws are identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ using Uint128 = unsigned __int128;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<Uint128>(rng()) * n) >> 64);
}

inline double exponential(Rng& rng, double mean) {
  return -mean * std::log1p(-uniform01(rng));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace streamsched
