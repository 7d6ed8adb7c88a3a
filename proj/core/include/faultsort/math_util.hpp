#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace faultsort {

// ceil(log2(v)) for v >= 1.
inline int ceil_log2(std::uint64_t v) {
  if (v <= 1) return 0;
  return 64 - std::countl_zero(v - 1);
}

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// ceil(ln(m)) for m >= 1. ln(m) is irrational for integer m >= 2, so the
// floating point round cannot straddle an integer boundary at these scales.
inline std::int64_t ceil_ln(std::int64_t m) {
  if (m <= 1) return 0;
  return static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(m))));
}

// Smallest t >= 0 with base^t >= m. Integer arithmetic, safe at exact powers.
inline std::int64_t ceil_log_int(std::int64_t m, std::int64_t base) {
  std::int64_t t = 0;
  __int128 pow = 1;
  while (pow < m) {
    pow *= base;
    ++t;
  }
  return t;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace faultsort
