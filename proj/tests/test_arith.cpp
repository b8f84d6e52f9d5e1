#include <numeric>

#include "doctest.h"
#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "oracles.hpp"

using namespace dlab;

TEST_CASE("tables: small values") {
  const auto t = ArithTables::build(12, 2);
  CHECK(t.tau(2, 12) == 6);
  CHECK(t.phi(12) == 4);
  CHECK(t.mu(12) == 0);
  CHECK(t.rad(12) == 6);

  const auto one = ArithTables::build(1, 1);
  CHECK(one.tau(1, 1) == 1);
  CHECK(one.phi(1) == 1);
  CHECK(one.mu(1) == 1);
  CHECK(one.rad(1) == 1);

  CHECK(ArithTables::build(4, 3).tau(3, 4) == 6);
}

TEST_CASE("tables: reject bad configuration") {
  CHECK_THROWS_AS(ArithTables::build(0, 2), InvalidArgument);
  CHECK_THROWS_AS(ArithTables::build(10, 0), InvalidArgument);
  const auto t = ArithTables::build(10, 2);
  CHECK_THROWS_AS(t.require(11), TableLimitError);
  CHECK_NOTHROW(t.require(10));
}

TEST_CASE("tables: agree with trial division up to 2000") {
  const u64 L = 2000;
  const auto t = ArithTables::build(L, 3);
  for (u64 n = 1; n <= L; ++n) {
    REQUIRE(t.tau(1, n) == 1);
    REQUIRE(t.tau(2, n) == oracle::divisors_fast(n));
    REQUIRE(t.phi(n) == euler_phi_direct(n));
    REQUIRE(t.mu(n) == oracle::mu(n));
    REQUIRE(t.rad(n) == oracle::rad(n));
    if (n > 1) REQUIRE(n % t.spf(n) == 0);
  }
  for (u64 n = 1; n <= 60; ++n) REQUIRE(t.tau(3, n) == oracle::tau_k(3, n));
}

TEST_CASE("tables: structural identities") {
  const u64 L = 3000;
  const auto t = ArithTables::build(L, 4);
  for (u64 n = 1; n <= L; ++n) {
    u64 phi_sum = 0;
    for (int k = 2; k <= 4; ++k) {
      u64 conv = 0;
      for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) {
          conv += t.tau(k - 1, d);
          if (k == 2) phi_sum += t.phi(d);
        }
      REQUIRE(t.tau(k, n) == conv);
    }
    REQUIRE(phi_sum == n);
    const u64 r = t.rad(n);
    REQUIRE(n % r == 0);
    REQUIRE(t.mu(r) != 0);
    REQUIRE((t.mu(n) != 0) == (n == r));
    if (n >= 2) {
      u128 power = 1;
      for (int i = 0; i < 64 && power % n != 0; ++i) power = (power * r) % n;
      REQUIRE(power % n == 0);
    }
  }
}

TEST_CASE("mod_inverse") {
  CHECK(mod_inverse(i64{3}, 7) == 5);
  CHECK(mod_inverse(i64{1}, 1) == 0);
  CHECK(mod_inverse(i64{-3}, 7) == 2);
  try {
    mod_inverse(i64{2}, 4);
    FAIL("expected NotInvertible");
  } catch (const NotInvertible& e) {
    CHECK(e.gcd() == 2);
  }
  for (u64 q = 2; q < 200; ++q)
    for (u64 n = 1; n < q; ++n)
      if (std::gcd(n, q) == 1) REQUIRE(mul_mod(mod_inverse(static_cast<i64>(n), q), n, q) == 1);
  const i128 big = static_cast<i128>(1) << 100;
  CHECK(mul_mod(mod_inverse(big + 1, 1000003), floor_mod(big + 1, 1000003), 1000003) == 1);
}

TEST_CASE("coprime_split examples") {
  auto c = coprime_split(12, 18);
  CHECK(c.d == 6);
  CHECK(c.nu1 == 2);
  CHECK(c.nu2 == 3);
  CHECK(c.d1 == 2);
  CHECK(c.nu1p == 1);
  c = coprime_split(5, 7);
  CHECK(c.d == 1);
  CHECK(c.nu1p == 5);
  CHECK(c.d1 == 1);
  c = coprime_split(4, 8);
  CHECK(c.d == 4);
  CHECK(c.nu1 == 1);
  CHECK(c.nu2 == 2);
  CHECK(c.d1 == 1);
  CHECK(c.nu1p == 1);
}

TEST_CASE("coprime_split reassembles for n1, n2 <= 400") {
  for (u64 n1 = 1; n1 <= 400; ++n1)
    for (u64 n2 = 1; n2 <= 400; ++n2) {
      const auto c = coprime_split(n1, n2);
      REQUIRE(n1 == c.d * c.d1 * c.nu1p);
      REQUIRE(n2 == c.d * c.nu2);
      REQUIRE(std::gcd(c.nu1, c.nu2) == 1);
      REQUIRE(std::gcd(c.nu1p, c.d) == 1);
      REQUIRE(oracle::rad(c.d) % oracle::rad(c.d1) == 0);
    }
}

TEST_CASE("n_over_phi_expansion") {
  CHECK(n_over_phi_expansion(6, 1000000) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(n_over_phi_expansion(1, 5) == 1.0);
  CHECK(n_over_phi_expansion(2, 3) == 1.5);
  for (u64 n = 1; n <= 200; ++n) {
    const double limit = static_cast<double>(n) / static_cast<double>(euler_phi_direct(n));
    double prev = 0.0;
    for (u64 cut : {1ull, 10ull, 100ull, 10000ull}) {
      const double v = n_over_phi_expansion(n, cut);
      REQUIRE(v >= prev);
      REQUIRE(v <= limit + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("divisor_count_segment matches direct counts") {
  const auto seg = divisor_count_segment(999000, 1001000);
  for (u64 i = 0; i < seg.size(); i += 37) REQUIRE(seg[i] == divisor_count_direct(999000 + i));
  const auto low = divisor_count_segment(1, 500);
  for (u64 n = 1; n < 500; ++n) REQUIRE(low[n - 1] == oracle::divisors(n));
}

TEST_CASE("isqrt near squares") {
  for (u64 r : {0ull, 1ull, 2ull, 3037000499ull, 4294967295ull}) {
    CHECK(isqrt(r * r) == r);
    if (r > 0) CHECK(isqrt(r * r - 1) == r - 1);
  }
}

TEST_CASE("parallel_map is order-preserving and rethrows the first failure") {
  set_worker_count(4);
  const auto v = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); });
  for (int i = 0; i < 100; ++i) REQUIRE(v[i] == i * i);
  CHECK_THROWS_WITH(parallel_map(50,
                                 [](std::size_t i) -> int {
                                   if (i == 7 || i == 31) throw InvalidArgument(std::to_string(i));
                                   return 0;
                                 }),
                    "7");
  set_worker_count(1);
}
