#pragma once

// Integer helpers shared by every module. Products of two values up to
// 2^63 are formed in 128-bit arithmetic.

#include <cstdint>
#include <numeric>

namespace dlab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 floor_mod(i64 a, u64 m) {
  const i128 r = static_cast<i128>(a) % static_cast<i128>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i128>(m) : r);
}

inline u64 floor_mod(i128 a, u64 m) {
  const i128 r = a % static_cast<i128>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i128>(m) : r);
}

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

inline u64 abs_u64(i64 a) {
  return a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
}

inline u64 gcd_i(i64 a, u64 b) { return std::gcd(abs_u64(a), b); }

// Integer square root, floor(sqrt(n)).
u64 isqrt(u64 n);

// Number of divisors / Euler phi by trial division; used for values that sit
// outside a table's range.
u64 divisor_count_direct(u64 n);
u64 euler_phi_direct(u64 n);

}  // namespace dlab
