#pragma once

#include <cstdint>
#include <vector>

#include "dlab/numeric.hpp"

namespace dlab {

/// Sieve tables up to a fixed limit: divisor functions tau_k (k <= k_max),
/// Euler phi, Moebius mu, radical (kernel) and smallest prime factor.
/// Immutable after build(); safe to share between worker threads.
class ArithTables {
 public:
  /// Throws InvalidArgument for limit == 0, k_max == 0, or a limit that
  /// does not fit the 32-bit table entries.
  static ArithTables build(u64 limit, int k_max);

  u64 limit() const noexcept { return limit_; }
  int k_max() const noexcept { return k_max_; }
  bool covers(u64 n) const noexcept { return n >= 1 && n <= limit_; }

  u64 tau(int k, u64 n) const;
  u64 phi(u64 n) const;
  int mu(u64 n) const;
  u64 rad(u64 n) const;
  u64 spf(u64 n) const;

  /// Distinct primes of n in increasing order.
  std::vector<u64> prime_divisors(u64 n) const;

  /// Throws TableLimitError unless n <= limit.
  void require(u64 n) const;

 private:
  ArithTables() = default;
  void check(u64 n) const;

  u64 limit_ = 0;
  int k_max_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> phi_;
  std::vector<std::uint32_t> rad_;
  std::vector<std::int8_t> mu_;
  // tau_[k-2] holds tau_k for k >= 2; tau_1 is identically 1.
  std::vector<std::vector<std::uint32_t>> tau_;
};

/// Inverse of n modulo q in [0, q). q == 1 returns 0. Throws NotInvertible
/// carrying gcd(n, q) otherwise.
u64 mod_inverse(i64 n, u64 q);

/// Same contract for 128-bit arguments (used by the exact fraction code).
u64 mod_inverse(i128 n, u64 q);

/// n1 = d * nu1, n2 = d * nu2 with d = gcd(n1, n2), and nu1 = d1 * nu1p where
/// d1 collects the part of nu1 supported on primes of d.
struct CoprimeDecomposition {
  u64 d = 1;
  u64 nu1 = 1;
  u64 nu2 = 1;
  u64 d1 = 1;
  u64 nu1p = 1;
};

CoprimeDecomposition coprime_split(u64 n1, u64 n2);

/// Partial sum of sum_{nu | n^inf} 1/nu over nu <= cutoff, i.e. over nu whose
/// radical divides n. Nondecreasing in cutoff with limit n/phi(n).
double n_over_phi_expansion(u64 n, u64 cutoff);

/// tau_2(w) for every w in [lo, hi), by sieving divisors d <= sqrt(hi).
std::vector<std::uint32_t> divisor_count_segment(u64 lo, u64 hi);

}  // namespace dlab
