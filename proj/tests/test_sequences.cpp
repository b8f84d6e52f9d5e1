#include <cmath>

#include "doctest.h"
#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/sequences.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {
const ArithTables& tables() {
  static const ArithTables t = ArithTables::build(1 << 16, 3);
  return t;
}
}  // namespace

TEST_CASE("built-in kinds") {
  const auto one = make_sequence(SequenceKind::constant_one, 10, tables());
  CHECK(one.lower() == 10);
  CHECK(one.upper() == 20);
  for (u64 n = 10; n < 20; ++n) CHECK(one[n] == 1.0);
  CHECK(one[9] == 0.0);
  CHECK(one[20] == 0.0);

  CHECK(make_sequence(SequenceKind::moebius, 10, tables())[10] == 1.0);
  CHECK(make_sequence(SequenceKind::tau2, 4, tables())[6] == 4.0);
  CHECK(make_sequence(SequenceKind::tau2, 4, tables()).order_k() == 2);
}

TEST_CASE("random kinds are seeded and within the bound") {
  const auto a = make_sequence(SequenceKind::random, 500, tables(), 3);
  const auto b = make_sequence(SequenceKind::random, 500, tables(), 3);
  const auto c = make_sequence(SequenceKind::random, 500, tables(), 4);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  for (u64 n = 500; n < 1000; ++n) REQUIRE(std::fabs(a[n]) <= tables().tau(2, n));
  const auto s = make_sequence(SequenceKind::sign, 500, tables(), 9);
  for (u64 n = 500; n < 1000; ++n) REQUIRE(std::fabs(s[n]) == 1.0);
}

TEST_CASE("divisor bound violations list every offending index") {
  std::vector<double> v{1.0, 2.0, 1.0, 5.0};  // n = 4..7, order 2: tau(5) = 2, tau(7) = 2
  try {
    CoefficientSequence s(4, v, 2, tables());
    FAIL("expected DivisorBoundViolation");
  } catch (const DivisorBoundViolation& e) {
    CHECK(e.offending() == std::vector<u64>{7});
  }
  std::vector<double> w{2.0, 1.0, -3.0};
  try {
    CoefficientSequence s(10, w, 1, tables());
    FAIL("expected DivisorBoundViolation");
  } catch (const DivisorBoundViolation& e) {
    CHECK(e.offending() == std::vector<u64>{10, 12});
  }
}

TEST_CASE("sequence text format") {
  const auto s = parse_sequence("# c\n10 1\n12 -0.5  # tail\n\n11 2\n", 2, tables());
  CHECK(s.lower() == 10);
  CHECK(s.upper() == 13);
  CHECK(s[11] == 2.0);
  CHECK(s[12] == -0.5);
  CHECK_THROWS_AS(parse_sequence("10 1\n10 2\n", 2, tables()), ParseError);
  CHECK_THROWS_AS(parse_sequence("10\n", 2, tables()), ParseError);
  CHECK_THROWS_AS(parse_sequence("10 x\n", 2, tables()), ParseError);
  CHECK_THROWS_AS(parse_sequence("0 1\n", 2, tables()), ParseError);
  CHECK_THROWS_AS(parse_sequence("# nothing\n", 2, tables()), ParseError);
  CHECK_THROWS_AS(parse_sequence("7 3\n", 2, tables()), DivisorBoundViolation);
  CHECK_THROWS_AS(load_sequence("/nonexistent/file", 2, tables()), Error);
}

TEST_CASE("sw_defect") {
  const auto one = make_sequence(SequenceKind::constant_one, 1000, tables());
  CHECK(sw_defect(one, 1, 1, 1) == 0.0);
  const auto rnd = make_sequence(SequenceKind::random, 1000, tables(), 1);
  CHECK(std::fabs(sw_defect(rnd, 2, 1, 2)) < 1e-9);
  CHECK_THROWS_AS(sw_defect(one, 6, 2, 1), InvalidArgument);

  const auto mu = make_sequence(SequenceKind::moebius, 1000, tables());
  double hit = 0, cop = 0;
  for (u64 n = 1000; n < 2000; ++n) {
    if (n % 3 == 1) hit += mu[n];
    if (n % 3 != 0) cop += mu[n];
  }
  CHECK(sw_defect(mu, 3, 1, 1) == doctest::Approx(hit - cop / 2));

  // Summed over residues the defect is bounded by the total variation.
  double mass = 0;
  for (u64 n = 1000; n < 2000; ++n) mass += std::fabs(rnd[n]);
  for (u64 q = 1; q <= 20; ++q) {
    double total = 0;
    for (u64 a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1) total += std::fabs(sw_defect(rnd, q, static_cast<i64>(a), 1));
    REQUIRE(total <= 2 * mass);
  }
}

TEST_CASE("bdh_variance") {
  const auto one = make_sequence(SequenceKind::constant_one, 1000, tables());
  CHECK(bdh_variance(one, 1) == 0.0);
  double phi_sum = 0;
  for (u64 q = 1; q <= 50; ++q) phi_sum += static_cast<double>(tables().phi(q));
  CHECK(bdh_variance(one, 50) <= phi_sum);

  // Direct evaluation.
  const auto mu = make_sequence(SequenceKind::moebius, 300, tables());
  double direct = 0;
  for (u64 q = 1; q <= 30; ++q) {
    double all = 0;
    for (u64 n = 300; n < 600; ++n)
      if (std::gcd(n, q) == 1) all += mu[n];
    const double mean = all / static_cast<double>(oracle::phi(q));
    for (u64 a = 1; a <= q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      double s = 0;
      for (u64 n = 300; n < 600; ++n)
        if (n % q == a % q) s += mu[n];
      direct += (s - mean) * (s - mean);
    }
  }
  CHECK(bdh_variance(mu, 30) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("bdh_variance trend at fixed Q_max / N") {
  const auto t = ArithTables::build(200000, 2);
  double prev = INFINITY, prev_plain = 0;
  for (u64 N : {10000u, 100000u}) {
    const auto one = make_sequence(SequenceKind::constant_one, N, t);
    const u64 Q = N / 100;
    const double v = bdh_variance(one, Q);
    const double Nd = static_cast<double>(N);
    const double scaled = v / (static_cast<double>(Q) * Nd * std::log(Nd));
    CHECK(scaled < prev);
    prev = scaled;
    // Without the factor Q the ratio grows: the variance of constant_one is of size Q^2.
    CHECK(v / (Nd * std::log(Nd)) > prev_plain);
    prev_plain = v / (Nd * std::log(Nd));
  }
}

TEST_CASE("tau in progressions") {
  const auto k1 = tau_ap_ratio(1000, 300, 7, 3, 1, tables());
  u64 count = 0;
  for (u64 n = 701; n <= 1000; ++n)
    if (n % 7 == 3) ++count;
  CHECK(k1.sum == static_cast<double>(count));

  const auto k2 = tau_ap_ratio(100, 50, 3, 1, 2, tables());
  u64 s = 0;
  for (u64 n = 51; n <= 100; ++n)
    if (n % 3 == 1) s += oracle::divisors(n);
  CHECK(k2.sum == static_cast<double>(s));
  CHECK(k2.bound_ratio == doctest::Approx(s / (50.0 / 2 * std::log(200.0))));

  const auto big = tau_ap_ratio(10000, 1000, 1, 1, 2, tables());
  CHECK(big.bound_ratio > 0.1);
  CHECK(big.bound_ratio < 10);
  CHECK_THROWS_AS(tau_ap_ratio(100, 50, 6, 2, 2, tables()), InvalidArgument);
}
