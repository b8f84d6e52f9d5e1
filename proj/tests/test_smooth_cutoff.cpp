#include <cmath>

#include "doctest.h"
#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/rng.hpp"
#include "dlab/smooth_cutoff.hpp"

using namespace dlab;

namespace {
const SmoothCutoff& psi() {
  static const SmoothCutoff p = SmoothCutoff::build();
  return p;
}
}  // namespace

TEST_CASE("psi shape") {
  const auto& f = psi();
  CHECK(f(1.5) == 1.0);
  CHECK(f(1.0) == 1.0);
  CHECK(f(2.0) == 1.0);
  CHECK(f(0.4) == 0.0);
  CHECK(f(0.5) == 0.0);
  CHECK(f(2.5) == 0.0);
  CHECK(f(3.0) == 0.0);
  CHECK(f(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(2.25) == doctest::Approx(0.5).epsilon(1e-15));
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.5 + 0.002 * i;
    REQUIRE(f(t) >= 0.0);
    REQUIRE(f(t) <= 1.0);
    // Ramp symmetry about 3/4 and 9/4.
    if (t < 1.0) REQUIRE(f(t) + f(1.5 - t) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("build rejects bad tolerances") {
  CHECK_THROWS_AS(SmoothCutoff::build(0.0), InvalidArgument);
  CHECK_THROWS_AS(SmoothCutoff::build(1e-3), InvalidArgument);
  CHECK_NOTHROW(SmoothCutoff::build(1e-6));
}

TEST_CASE("step function") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (int i = 1; i < 100; ++i) {
    const double x = i / 100.0;
    REQUIRE(smooth_step(x) + smooth_step(1 - x) == doctest::Approx(1.0).epsilon(1e-14));
    const double h = 1e-6;
    const double fd = (smooth_step(x + h) - smooth_step(x - h)) / (2 * h);
    REQUIRE(smooth_step_derivative(x) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("psi_hat at zero is the mass of psi") {
  CHECK(psi().hat_zero() == doctest::Approx(1.5).epsilon(1e-10));
  // Riemann sum check of the mass.
  double mass = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) mass += psi()(0.5 + 2.0 * (i + 0.5) / n) * (2.0 / n);
  CHECK(mass == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("psi_hat symmetry and direct quadrature") {
  for (double xi : {0.1, 0.37, 1.0, 2.5, 7.3}) {
    const auto p = psi().hat(xi);
    const auto m = psi().hat(-xi);
    CHECK(std::abs(p - std::conj(m)) < 1e-10);
    // Midpoint rule on the full transform.
    std::complex<double> direct = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double t = 0.5 + 2.0 * (i + 0.5) / n;
      direct += psi()(t) * std::polar(1.0, -2 * M_PI * xi * t) * (2.0 / n);
    }
    CHECK(std::abs(p - direct) < 1e-8);
  }
}

TEST_CASE("psi_hat decays fast") {
  const double small = std::abs(psi().hat(100.3));
  const double large = std::abs(psi().hat(10.3));
  CHECK(small <= large * 1e-3);
}

TEST_CASE("kernel transform agrees with the extended-precision path") {
  for (double xi : {0.0, 0.5, 3.0, 17.0, 60.0}) {
    double err = 0.0;
    const double d = psi().kernel_hat(xi, &err);
    const double mp = detail::kernel_hat_mp(xi, 40, 0);
    CHECK(std::fabs(d - mp) <= std::max(err, 1e-13));
  }
}

TEST_CASE("poisson threshold") {
  CHECK(poisson_threshold(100, 7) == doctest::Approx(7.0 / 100 * std::pow(std::log(200.0), 4)));
}

TEST_CASE("truncated poisson: small residual and precondition") {
  const auto r = truncated_poisson_ap(psi(), 100, 7, 3, poisson_threshold(100, 7));
  CHECK(std::fabs(r.residual) <= 10.0 / 100);
  CHECK(r.main == doctest::Approx(1.5 * 100 / 7));
  CHECK(std::fabs(r.lhs - r.main - r.dual_sum - r.residual) < 1e-12);
  CHECK_THROWS_AS(truncated_poisson_ap(psi(), 100, 7, 3, 1.0), PreconditionError);
}

TEST_CASE("truncated poisson: working and extended precision agree at small M") {
  const double H = poisson_threshold(100, 5);
  const auto w = truncated_poisson_ap(psi(), 100, 5, 2, H, Precision::working);
  const auto e = truncated_poisson_ap(psi(), 100, 5, 2, H, Precision::extended);
  CHECK(w.lhs == doctest::Approx(e.lhs).epsilon(1e-12));
  CHECK(std::fabs(w.dual_sum - e.dual_sum) < 1e-8);
}

TEST_CASE("truncated poisson: lhs equals a direct sum") {
  const u64 M = 300, q = 9;
  const i64 a = 4;
  double direct = 0.0;
  for (u64 m = 1; m <= 3 * M; ++m)
    if (m % q == static_cast<u64>(a)) direct += psi()(static_cast<double>(m) / M);
  const auto r = truncated_poisson_ap(psi(), M, q, a, poisson_threshold(M, q));
  CHECK(r.lhs == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("coprime sum") {
  const u64 M = 500, q = 12;
  double direct = 0.0;
  for (u64 m = 1; m <= 3 * M; ++m)
    if (std::gcd(m, q) == 1) direct += psi()(static_cast<double>(m) / M);
  const auto c = coprime_psi_sum(psi(), M, q);
  CHECK(c.lhs == doctest::Approx(direct).epsilon(1e-13));
  CHECK(c.main == doctest::Approx(4.0 / 12 * 1.5 * M).epsilon(1e-10));
  CHECK(c.constant <= 10.0);
}

TEST_CASE("truncated poisson: 50 random progressions") {
  SeededRng rng(50);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    // log-uniform in [10, 10^4]
    const u64 M = static_cast<u64>(std::pow(10.0, 1.0 + 3.0 * rng.uniform01()));
    const u64 q = rng.uniform_int(1, 30);
    const i64 a = rng.uniform_int(-100, 100);
    const auto r = truncated_poisson_ap(psi(), M, q, a, poisson_threshold(M, q));
    REQUIRE(std::fabs(r.residual) <= 10.0 / static_cast<double>(M));
    worst = std::max(worst, std::fabs(r.residual) * static_cast<double>(M));
  }
  MESSAGE("max |residual| * M = " << worst);
}

TEST_CASE("psi_hat is bit-identical across calls") {
  const auto other = SmoothCutoff::build();
  for (double xi : {0.1, 1.7, 12.25}) {
    const auto a = psi().hat(xi);
    CHECK(a == psi().hat(xi));
    CHECK(a == other.hat(xi));
  }
}
