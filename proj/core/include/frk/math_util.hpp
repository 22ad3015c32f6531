#pragma once

#include <cmath>
#include <cstdint>

namespace frk {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;  // 1/sqrt(2*pi)
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244008444);  // 1/sqrt(2)
}

// Inverse of normal_cdf on (0,1), accurate to ~1e-15 after refinement.
double normal_quantile(double p);

// SplitMix64 mixing step; used to derive independent sub-seeds from a base
// seed plus an index, so per-target sampling stays deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace frk
