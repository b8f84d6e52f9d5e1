#include <cmath>

#include "doctest.h"
#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/exp_sums.hpp"
#include "dlab/rng.hpp"
#include "oracles.hpp"

using namespace dlab;

TEST_CASE("unit fractions") {
  const UnitFraction f(BigInt(7), BigInt(-3));
  CHECK(f.to_string() == "2/3");
  CHECK((UnitFraction(1, 3) + UnitFraction(2, 3)).to_string() == "0/1");
  CHECK((UnitFraction(1, 2) - UnitFraction(3, 4)).to_string() == "3/4");
  CHECK((-UnitFraction(1, 5)).to_string() == "4/5");
  CHECK(UnitFraction(2, 4) == UnitFraction(1, 2));
  CHECK_THROWS_AS(UnitFraction(1, 0), InvalidArgument);
}

TEST_CASE("Kloosterman sums") {
  for (u64 c = 1; c <= 30; ++c) CHECK(std::abs(kloosterman(0, 0, c) - double(oracle::phi(c))) < 1e-12);
  CHECK(std::abs(kloosterman(1, 1, 2) - 1.0) < 1e-14);
  CHECK(kloosterman(1, 1, 5).real() == doctest::Approx(2 + 2 * std::cos(4 * M_PI / 5)));
  CHECK(weil_ratio(1, 1, 5) == doctest::Approx(0.381966 / (2 * std::sqrt(5.0))).epsilon(1e-5));
  CHECK(weil_ratio(1, 0, 7) <= 1.0);
  for (u64 c = 1; c <= 40; ++c)
    for (i64 a = -3; a < 5; ++a)
      for (i64 b = 0; b < 6; ++b)
        REQUIRE(std::abs(kloosterman(a, b, c) - oracle::kloosterman(a, b, c)) < 1e-11);
  for (u64 c = 1; c <= 1000; ++c) REQUIRE(weil_ratio(0, 0, c) <= 1.0);
  CHECK_THROWS_AS(kloosterman(1, 1, 0), InvalidArgument);
}

TEST_CASE("Kloosterman table agrees with the direct sum") {
  const KloostermanTable t(36);
  for (i64 a = 0; a < 36; a += 5)
    for (i64 b = 0; b < 36; b += 7) REQUIRE(std::abs(t(a, b) - kloosterman(a, b, 36)) < 1e-12);
}

TEST_CASE("Weil sweep small") {
  const auto w = weil_sweep(40);
  CHECK(w.violations == 0);
  CHECK(w.max_ratio <= 1.0 + 1e-12);
  CHECK(w.max_ratio_by_c.size() == 40);
  u64 checked = 0;
  for (u64 c = 1; c <= 40; ++c) checked += c * c;
  CHECK(w.checked == checked);
}

TEST_CASE("short weighted Kloosterman sums") {
  const auto single = short_kloosterman_weighted(1, 1, 3, 7, 1);
  CHECK(std::abs(single.value - std::polar(1.0, 2 * M_PI * 3 / 7)) < 1e-14);
  CHECK(single.terms == 1);

  std::complex<double> ref = 0;
  for (u64 n : {1, 3, 7, 9}) {
    const double w = double(n) / double(oracle::phi(n));
    ref += w * std::polar(1.0, 2 * M_PI * double(oracle::inverse(n, 10)) / 10);
  }
  const auto ten = short_kloosterman_weighted(1, 10, 1, 10, 1);
  CHECK(std::abs(ten.value - ref) < 1e-12);
  CHECK(ten.eps0 == 0.1);

  const auto zero = short_kloosterman_weighted(1, 50, 0, 50, 3);
  CHECK(zero.value.real() > 0);
  CHECK(std::fabs(zero.value.imag()) < 1e-12);
  CHECK_THROWS_AS(short_kloosterman_weighted(2, 11, 1, 10, 1), InvalidArgument);

  const auto sweep = short_kloosterman_sweep(50, 1000, 10, 1);
  CHECK(sweep.trials == 50);
  CHECK(sweep.median_ratio <= sweep.max_ratio);
}

TEST_CASE("Bezout reciprocity") {
  const auto b = bezout_reciprocity(1, 3, 5);
  CHECK(b.exact_match);
  CHECK(b.rhs2.to_string() == "1/15");
  CHECK(bezout_reciprocity(7, 4, 9).exact_match);
  const auto z = bezout_reciprocity(0, 4, 9);
  CHECK(z.lhs.to_string() == "0/1");
  CHECK(z.exact_match);
  CHECK_THROWS_AS(bezout_reciprocity(1, 4, 6), NotInvertible);
  const auto s = bezout_sweep(2000, 1000000000, 3);
  CHECK(s.trials == 2000);
  CHECK(s.mismatches == 0);
}

TEST_CASE("Kloosterman fraction factorization") {
  FactorizationInput in{1, 1, 1, 1, 1, 5, 3};
  auto f = kloosterman_fraction_factorization(in);
  CHECK(f.q == 2);
  CHECK(f.exact_match);
  CHECK(f.pieces[0].den() == 1);

  // d = d1 = 2; two tuples congruent modulo d d1 = 4.
  FactorizationInput p{3, 5, 1, 2, 2, 5, 7};
  FactorizationInput p2{7, 9, 1, 2, 2, 9, 11};
  // q = 2*5 - 7 = 3 and 2*9 - 11 = 7.
  auto f1 = kloosterman_fraction_factorization(p);
  auto f2 = kloosterman_fraction_factorization(p2);
  CHECK(f1.exact_match);
  CHECK(f2.exact_match);
  CHECK(f1.xi_modulus == 4);
  CHECK(f1.xi_residue == f2.xi_residue);
  CHECK(xi_from_residues(p) == f1.xi_residue);

  CHECK_THROWS_AS(kloosterman_fraction_factorization({1, 1, 1, 2, 1, 3, 1}), PreconditionError);
  CHECK_THROWS_AS(kloosterman_fraction_factorization({1, 1, 2, 1, 1, 5, 2}), PreconditionError);

  const auto sweep = factorization_sweep(500, 11);
  CHECK(sweep.trials == 500);
  CHECK(sweep.mismatches == 0);
  CHECK(sweep.xi_pairs > 0);
  CHECK(sweep.xi_pair_mismatches == 0);
}

TEST_CASE("xi needs r invertible modulo d d1") {
  // (a, h, r, d, d1, nu1p, nu2) with r = 2, d = 4: two tuples congruent mod 4
  // in every variable give different xi.
  FactorizationInput u{1, 1, 2, 4, 1, 3, 1};
  FactorizationInput v{1, 1, 2, 4, 1, 7, 1};
  const auto fu = kloosterman_fraction_factorization(u);
  const auto fv = kloosterman_fraction_factorization(v);
  CHECK(fu.exact_match);
  CHECK(fv.exact_match);
  CHECK(fu.xi_residue != fv.xi_residue);
  CHECK_THROWS_AS(xi_from_residues(u), NotInvertible);
}

TEST_CASE("trilinear form") {
  TrilinearInstance one{1, 1, 1, 1, {2.0}, {3.0}, {-1.5}};
  const auto r1 = trilinear_form(one);
  CHECK(std::abs(r1.value - std::complex<double>(-9.0, 0)) < 1e-14);

  const auto inst = random_sign_instance(16, 16, 16, 1, 4);
  const auto r = trilinear_form(inst);
  CHECK(std::abs(r.value) < r.trivial_bound);
  const auto ref = oracle::trilinear(inst.theta, inst.A, inst.M, inst.N, inst.alpha, inst.beta, inst.nu);
  CHECK(std::abs(r.value - ref.value) <= 1e-12 * std::max(1.0, std::abs(ref.value)));
  CHECK(r.skipped_pairs == ref.skipped);

  TrilinearInstance ones{1, 4, 8, 8, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0),
                         std::vector<double>(4, 1.0)};
  const auto ro = trilinear_form(ones);
  const auto refo = oracle::trilinear(1, 4, 8, 8, ones.alpha, ones.beta, ones.nu);
  CHECK(std::abs(ro.value - refo.value) <= 1e-12 * std::max(1.0, std::abs(refo.value)));
  CHECK(ro.bc_bound > 0);
  CHECK(ro.ratio == doctest::Approx(std::abs(ro.value) / ro.bc_bound));
  CHECK(ro.bc_bound_normalized < ro.bc_bound);

  TrilinearInstance bad = one;
  bad.theta = 0;
  CHECK_THROWS_AS(trilinear_form(bad), InvalidArgument);
}

TEST_CASE("random-sign trilinear median ratio shrinks with size") {
  double prev = 2.0;
  for (u64 s : {8, 16, 32}) {
    std::vector<double> ratios;
    for (u64 seed = 0; seed < 9; ++seed) {
      const auto r = trilinear_form(random_sign_instance(s, s, s, 1, seed));
      ratios.push_back(std::abs(r.value) / r.trivial_bound);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[4] < prev);
    prev = ratios[4];
  }
}
