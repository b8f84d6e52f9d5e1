#include "dlab/exp_sums.hpp"

#include <algorithm>
#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <cmath>
#include <numeric>

#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rng.hpp"
#include "dlab/summation.hpp"

namespace dlab {

namespace {

// e(k / c) for an exact residue k in [0, c).
std::complex<double> unit_root(u64 k, u64 c) {
  const double t = 2.0 * static_cast<double>(k) / static_cast<double>(c);
  return {boost::math::cos_pi(t), boost::math::sin_pi(t)};
}

BigInt big(i64 v) { return BigInt(v); }
BigInt big(u64 v) { return BigInt(v); }

}  // namespace

UnitFraction::UnitFraction(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidArgument("fraction with zero denominator");
  BigInt n = den < 0 ? BigInt(-num) : num;
  BigInt d = den < 0 ? BigInt(-den) : den;
  n %= d;
  if (n < 0) n += d;
  const BigInt g = boost::multiprecision::gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n == 0) d = 1;
  num_ = std::move(n);
  den_ = std::move(d);
}

std::string UnitFraction::to_string() const { return num_.str() + "/" + den_.str(); }

double UnitFraction::to_double() const {
  return num_.convert_to<double>() / den_.convert_to<double>();
}

UnitFraction UnitFraction::operator+(const UnitFraction& o) const {
  return UnitFraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

UnitFraction UnitFraction::operator-(const UnitFraction& o) const {
  return UnitFraction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

UnitFraction UnitFraction::operator-() const { return UnitFraction(-num_, den_); }

// Kloosterman sums

KloostermanTable::KloostermanTable(u64 c) : c_(c) {
  if (c == 0) throw InvalidArgument("Kloosterman modulus must be >= 1");
  tau_ = divisor_count_direct(c);
  for (u64 x = 0; x < c; ++x) {
    if (std::gcd(x, c) != 1) continue;
    units_.push_back(x);
    inverses_.push_back(c == 1 ? 0 : mod_inverse(static_cast<i64>(x), c));
  }
  cos_.resize(c);
  sin_.resize(c);
  for (u64 k = 0; k < c; ++k) {
    const auto z = unit_root(k, c);
    cos_[k] = z.real();
    sin_[k] = z.imag();
  }
}

std::complex<double> KloostermanTable::operator()(i64 a, i64 b) const {
  const u64 ar = floor_mod(a, c_);
  const u64 br = floor_mod(b, c_);
  CompensatedSum re;
  CompensatedSum im;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const u64 k = (mul_mod(ar, units_[i], c_) + mul_mod(br, inverses_[i], c_)) % c_;
    re += cos_[k];
    im += sin_[k];
  }
  return {re.value(), im.value()};
}

double KloostermanTable::weil_bound(i64 a, i64 b) const {
  const u64 g = std::gcd(std::gcd(abs_u64(a), abs_u64(b)), c_);
  return static_cast<double>(tau_) * std::sqrt(static_cast<double>(g)) *
         std::sqrt(static_cast<double>(c_));
}

std::complex<double> kloosterman(i64 a, i64 b, u64 c) { return KloostermanTable(c)(a, b); }

double weil_ratio(i64 a, i64 b, u64 c) {
  const KloostermanTable t(c);
  return std::abs(t(a, b)) / t.weil_bound(a, b);
}

WeilSweep weil_sweep(u64 c_max) {
  const std::vector<WeilSweep> parts = parallel_map(c_max, [&](std::size_t i) {
    const u64 c = i + 1;
    const KloostermanTable t(c);
    WeilSweep s;
    for (u64 a = 0; a < c; ++a) {
      for (u64 b = 0; b < c; ++b) {
        const double bound = t.weil_bound(static_cast<i64>(a), static_cast<i64>(b));
        const double value = std::abs(t(static_cast<i64>(a), static_cast<i64>(b)));
        ++s.checked;
        if (value > bound * (1.0 + 1e-12) + 1e-12) ++s.violations;
        const double ratio = value / bound;
        if (ratio > s.max_ratio) {
          s.max_ratio = ratio;
          s.worst_a = a;
          s.worst_b = b;
          s.worst_c = c;
        }
      }
    }
    return s;
  });
  WeilSweep out;
  out.c_max = c_max;
  for (const WeilSweep& s : parts) {
    out.max_ratio_by_c.push_back(s.max_ratio);
    out.checked += s.checked;
    out.violations += s.violations;
    if (s.max_ratio > out.max_ratio) {
      out.max_ratio = s.max_ratio;
      out.worst_a = s.worst_a;
      out.worst_b = s.worst_b;
      out.worst_c = s.worst_c;
    }
  }
  return out;
}

ShortKloosterman short_kloosterman_weighted(u64 lo, u64 hi, i64 ell, u64 a, u64 b) {
  if (a == 0 || b == 0) throw InvalidArgument("a and b must be >= 1");
  if (lo == 0 || lo > hi || hi > a) throw InvalidArgument("interval must lie inside [1, a]");
  ShortKloosterman out;
  const u64 ell_mod = floor_mod(ell, a);
  ComplexCompensatedSum sum;
  for (u64 n = lo; n <= hi; ++n) {
    if (std::gcd(n, a) != 1 || std::gcd(n, b) != 1) continue;
    const u64 inv = a == 1 ? 0 : mod_inverse(static_cast<i64>(n), a);
    const double weight = static_cast<double>(n) / static_cast<double>(euler_phi_direct(n));
    sum += weight * unit_root(mul_mod(ell_mod, inv, a), a);
    ++out.terms;
  }
  out.value = sum.value();
  const double g = static_cast<double>(std::gcd(abs_u64(ell), a));
  out.bound_ratio =
      std::abs(out.value) / (std::sqrt(g) * std::pow(static_cast<double>(a), 0.5 + out.eps0));
  return out;
}

ShortKloostermanSweep short_kloosterman_sweep(u64 trials, u64 a_max, u64 b_max, std::uint64_t seed) {
  if (a_max < 1 || b_max < 1) throw InvalidArgument("a_max and b_max must be >= 1");
  struct Trial {
    u64 lo, hi, a, b;
    i64 ell;
  };
  SeededRng rng(seed);
  std::vector<Trial> draws(trials);
  for (Trial& t : draws) {
    t.a = static_cast<u64>(rng.uniform_int(1, static_cast<i64>(a_max)));
    t.b = static_cast<u64>(rng.uniform_int(1, static_cast<i64>(b_max)));
    t.ell = rng.uniform_int(-static_cast<i64>(a_max), static_cast<i64>(a_max));
    u64 x = static_cast<u64>(rng.uniform_int(1, static_cast<i64>(t.a)));
    u64 y = static_cast<u64>(rng.uniform_int(1, static_cast<i64>(t.a)));
    t.lo = std::min(x, y);
    t.hi = std::max(x, y);
  }
  std::vector<double> ratios = parallel_map(trials, [&](std::size_t i) {
    const Trial& t = draws[i];
    return short_kloosterman_weighted(t.lo, t.hi, t.ell, t.a, t.b).bound_ratio;
  });
  ShortKloostermanSweep out;
  out.trials = trials;
  if (ratios.empty()) return out;
  out.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  std::sort(ratios.begin(), ratios.end());
  const std::size_t mid = ratios.size() / 2;
  out.median_ratio = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  return out;
}

// Bezout reciprocity

BezoutCheck bezout_reciprocity(i64 a, u64 m, u64 n) {
  if (m == 0 || n == 0) throw InvalidArgument("m and n must be >= 1");
  const u64 g = std::gcd(m, n);
  if (g != 1) throw NotInvertible(static_cast<i64>(m), n, g);
  BezoutCheck out;
  const u64 m_inv = mod_inverse(static_cast<i128>(m), n);
  const u64 n_inv = mod_inverse(static_cast<i128>(n), m);
  out.lhs = UnitFraction(big(a) * big(m_inv), big(n));
  out.rhs1 = UnitFraction(-big(a) * big(n_inv), big(m));
  out.rhs2 = UnitFraction(big(a), big(m) * big(n));
  out.exact_match = out.lhs == out.rhs1 + out.rhs2;
  return out;
}

BezoutSweep bezout_sweep(u64 trials, u64 bound, std::uint64_t seed) {
  if (bound < 1) throw InvalidArgument("bound must be >= 1");
  SeededRng rng(seed);
  BezoutSweep out;
  const auto hi = static_cast<i64>(bound);
  for (u64 t = 0; t < trials; ++t) {
    const i64 a = rng.uniform_int(-hi, hi);
    u64 m, n;
    do {
      m = static_cast<u64>(rng.uniform_int(1, hi));
      n = static_cast<u64>(rng.uniform_int(1, hi));
    } while (std::gcd(m, n) != 1);
    ++out.trials;
    if (!bezout_reciprocity(a, m, n).exact_match) ++out.mismatches;
  }
  return out;
}

// Kloosterman-fraction factorization

namespace {

bool supported_on(u64 d1, u64 d) {
  for (u64 g = std::gcd(d1, d); g > 1; g = std::gcd(d1, d)) {
    while (d1 % g == 0) d1 /= g;
  }
  return d1 == 1;
}

i128 diff_of(const FactorizationInput& in) {
  return static_cast<i128>(in.d1) * in.nu1p - static_cast<i128>(in.nu2);
}

u64 xi_numerator(i64 a, i64 h, u64 nu1p_inv, u64 q_inv, u64 D) {
  if (D == 1) return 0;
  u64 v = mul_mod(floor_mod(a, D), floor_mod(h, D), D);
  v = mul_mod(v, nu1p_inv, D);
  v = mul_mod(v, q_inv, D);
  return v == 0 ? 0 : D - v;
}

}  // namespace

FactorizationCheck kloosterman_fraction_factorization(const FactorizationInput& in) {
  if (in.d == 0 || in.d1 == 0 || in.nu1p == 0 || in.nu2 == 0)
    throw PreconditionError("d, d1, nu1p and nu2 must be >= 1");
  if (in.r == 0) throw PreconditionError("r must be nonzero");
  const BigInt D = big(in.d) * big(in.d1);
  if (D > BigInt(UINT64_MAX)) throw PreconditionError("d d1 exceeds 64 bits");
  const u64 Du = static_cast<u64>(D);
  if (BigInt(boost::multiprecision::gcd(big(in.d1) * big(in.nu1p), big(in.nu2))) != 1)
    throw PreconditionError("(d1 nu1p, nu2) != 1");
  if (std::gcd(in.nu1p, in.d) != 1) throw PreconditionError("(nu1p, d) != 1");
  if (!supported_on(in.d1, in.d)) throw PreconditionError("d1 does not divide d^inf");
  const i128 diff = diff_of(in);
  if (diff % in.r != 0) throw PreconditionError("r does not divide d1 nu1p - nu2");
  const i128 q_signed = diff / in.r;
  if (q_signed < 1) throw PreconditionError("q = (d1 nu1p - nu2) / r must be >= 1");
  const BigInt big_diff = BigInt(static_cast<i64>(diff));
  {
    const BigInt g = boost::multiprecision::gcd(D * big(in.nu1p) * abs(big(in.r)), abs(big_diff));
    if (g != abs(big(in.r)))
      throw PreconditionError("(d d1 nu1p r, d1 nu1p - nu2) = " + g.str() + " != |r|");
  }
  const auto q = static_cast<u64>(q_signed);
  const BigInt ah = big(in.a) * big(in.h);

  FactorizationCheck out;
  out.q = q;
  out.xi_modulus = Du;

  const BigInt Dnu = D * big(in.nu1p);
  const u64 inv_dnu_mod_q = mod_inverse(static_cast<i128>(Dnu % q), q);
  out.original = UnitFraction(ah * big(inv_dnu_mod_q), big(q));

  const UnitFraction tail(ah * big(in.r), Dnu * big_diff);
  const auto Dnu_u = static_cast<u64>(Dnu);
  out.first_step = UnitFraction(-ah * big(mod_inverse(static_cast<i128>(q % Dnu_u), Dnu_u)), Dnu) + tail;

  const u64 nu1p_inv = Du == 1 ? 0 : mod_inverse(static_cast<i128>(in.nu1p % Du), Du);
  const u64 q_inv = Du == 1 ? 0 : mod_inverse(static_cast<i128>(q % Du), Du);
  out.xi_residue = xi_numerator(in.a, in.h, nu1p_inv, q_inv, Du);
  const UnitFraction xi(big(out.xi_residue), D);

  const BigInt Dnu2 = D * big(in.nu2);
  const u64 inv_dnu2 =
      in.nu1p == 1 ? 0 : mod_inverse(static_cast<i128>(Dnu2 % in.nu1p), in.nu1p);
  const UnitFraction middle(ah * big(in.r) * big(inv_dnu2), big(in.nu1p));

  out.pieces = {xi, middle, tail};
  out.exact_match = out.original == out.first_step && out.original == xi + middle + tail;
  return out;
}

u64 xi_from_residues(const FactorizationInput& in) {
  const u64 D = in.d * in.d1;
  if (D == 0) throw PreconditionError("d and d1 must be >= 1");
  if (D == 1) return 0;
  const u64 r = floor_mod(in.r, D);
  const u64 g = std::gcd(r, D);
  if (g != 1) throw NotInvertible(in.r, D, g);
  const u64 nu1p = in.nu1p % D;
  const u64 nu2 = in.nu2 % D;
  const u64 diff = floor_mod(static_cast<i128>(mul_mod(in.d1 % D, nu1p, D)) - nu2, D);
  const u64 q = mul_mod(diff, mod_inverse(static_cast<i128>(r), D), D);
  return xi_numerator(in.a, in.h, mod_inverse(static_cast<i128>(nu1p), D),
                      mod_inverse(static_cast<i128>(q), D), D);
}

namespace {

const u64 kSmallPrimes[] = {2, 3, 5, 7, 11};

// Random admissible tuple; values stay below about 10^6.
FactorizationInput draw_tuple(SeededRng& rng) {
  for (;;) {
    FactorizationInput in;
    in.d = 1;
    for (u64 p : kSmallPrimes)
      if (rng.uniform_int(0, 2) == 0) in.d *= p;
    in.d1 = 1;
    for (u64 p : kSmallPrimes)
      if (in.d % p == 0)
        for (i64 e = rng.uniform_int(0, 2); e > 0; --e) in.d1 *= p;
    in.nu1p = static_cast<u64>(rng.uniform_int(1, 100000));
    in.nu2 = static_cast<u64>(rng.uniform_int(1, 100000));
    in.a = rng.uniform_int(-1000000, 1000000);
    in.h = rng.uniform_int(-1000, 1000);
    if (std::gcd(in.nu1p, in.d) != 1 || std::gcd(in.d1 * in.nu1p, in.nu2) != 1) continue;
    const i128 diff = diff_of(in);
    if (diff == 0) continue;
    // |r| = (part of |diff| on primes of d d1 nu1p) * (small divisor of the rest).
    u64 rest = static_cast<u64>(diff < 0 ? -diff : diff);
    const u64 Dn = in.d * in.d1 * in.nu1p;
    u64 t = 1;
    for (u64 g = std::gcd(rest, Dn); g > 1; g = std::gcd(rest, Dn)) {
      while (rest % g == 0) {
        rest /= g;
        t *= g;
      }
    }
    std::vector<u64> small;
    for (u64 k = 1; k <= 30 && k <= rest; ++k)
      if (rest % k == 0) small.push_back(k);
    t *= small[static_cast<std::size_t>(rng.uniform_int(0, static_cast<i64>(small.size()) - 1))];
    in.r = diff < 0 ? -static_cast<i64>(t) : static_cast<i64>(t);
    return in;
  }
}

bool admissible(const FactorizationInput& in) {
  try {
    kloosterman_fraction_factorization(in);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

}  // namespace

FactorizationSweep factorization_sweep(u64 trials, std::uint64_t seed) {
  SeededRng rng(seed);
  FactorizationSweep out;
  for (u64 t = 0; t < trials; ++t) {
    const FactorizationInput in = draw_tuple(rng);
    const FactorizationCheck check = kloosterman_fraction_factorization(in);
    ++out.trials;
    if (!check.exact_match) ++out.mismatches;

    const u64 D = in.d * in.d1;
    if (std::gcd(abs_u64(in.r), D) != 1) continue;
    // Partner congruent modulo D: shift a, h, nu1p by multiples of D and solve
    // for nu2 = nu2 (D), nu2 = d1 nu1p' (|r|) so that r still divides the difference.
    const u64 R = abs_u64(in.r);
    for (int attempt = 0; attempt < 50; ++attempt) {
      FactorizationInput p = in;
      p.a += static_cast<i64>(D) * rng.uniform_int(-50, 50);
      p.h += static_cast<i64>(D) * rng.uniform_int(-50, 50);
      p.nu1p += D * static_cast<u64>(rng.uniform_int(0, 50));
      const u64 target = mul_mod(p.d1 % R, p.nu1p % R, R);
      // x = nu2 (D), x = target (R), D and R coprime.
      const u64 DR = D * R;
      const u64 k = mul_mod(floor_mod(static_cast<i128>(target) - static_cast<i128>(in.nu2 % R), R),
                            R == 1 ? 0 : mod_inverse(static_cast<i128>(D % R), R), R);
      u64 x = (in.nu2 % D + D * k) % DR;
      x += DR * static_cast<u64>(rng.uniform_int(0, 20));
      if (x == 0) x = DR;
      p.nu2 = x;
      if (!admissible(p)) continue;
      ++out.xi_pairs;
      if (kloosterman_fraction_factorization(p).xi_residue != check.xi_residue ||
          xi_from_residues(p) != check.xi_residue)
        ++out.xi_pair_mismatches;
      break;
    }
  }
  return out;
}

// Trilinear forms

TrilinearResult trilinear_form(const TrilinearInstance& inst) {
  if (inst.theta == 0) throw InvalidArgument("theta must be nonzero");
  if (inst.A == 0 || inst.M == 0 || inst.N == 0) throw InvalidArgument("ranges must start at >= 1");
  if (inst.alpha.empty() || inst.beta.empty() || inst.nu.empty())
    throw InvalidArgument("coefficient vectors must be nonempty");

  const std::size_t lm = inst.alpha.size();
  const std::size_t ln = inst.beta.size();
  const u64 none = UINT64_MAX;
  // theta * m^-1 mod n per pair, or none when gcd(m, n) > 1.
  std::vector<u64> phase(lm * ln, none);
  TrilinearResult out;
  for (std::size_t i = 0; i < lm; ++i) {
    const u64 m = inst.M + i;
    for (std::size_t j = 0; j < ln; ++j) {
      const u64 n = inst.N + j;
      if (std::gcd(m, n) != 1) {
        ++out.skipped_pairs;
        continue;
      }
      phase[i * ln + j] =
          n == 1 ? 0 : mul_mod(floor_mod(inst.theta, n), mod_inverse(static_cast<i64>(m), n), n);
    }
  }

  const std::vector<std::complex<double>> per_a = parallel_map(inst.nu.size(), [&](std::size_t k) {
    const double v = inst.nu[k];
    if (v == 0.0) return std::complex<double>{};
    const u64 a = inst.A + k;
    ComplexCompensatedSum s;
    for (std::size_t i = 0; i < lm; ++i) {
      if (inst.alpha[i] == 0.0) continue;
      for (std::size_t j = 0; j < ln; ++j) {
        const u64 ph = phase[i * ln + j];
        if (ph == none || inst.beta[j] == 0.0) continue;
        const u64 n = inst.N + j;
        s += (inst.alpha[i] * inst.beta[j]) * unit_root(mul_mod(a % n, ph, n), n);
      }
    }
    return v * s.value();
  });
  ComplexCompensatedSum total;
  for (const auto& z : per_a) total += z;
  out.value = total.value();

  auto l2 = [](const std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s += x * x;
    return std::sqrt(s.value());
  };
  auto l1 = [](const std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s += std::fabs(x);
    return s.value();
  };
  const double A = static_cast<double>(inst.A);
  const double M = static_cast<double>(inst.M);
  const double N = static_cast<double>(inst.N);
  const double amn = A * M * N;
  const double shape =
      std::sqrt(1.0 + std::fabs(static_cast<double>(inst.theta)) * A / (M * N)) *
      (std::pow(amn, 7.0 / 20.0 + out.eps) * std::pow(M + N, 0.25) +
       std::pow(amn, 3.0 / 8.0 + out.eps) * std::pow(A * M + A * N, 0.125));
  const double norms = l2(inst.alpha) * l2(inst.beta) * l2(inst.nu);
  const double density = std::sqrt(static_cast<double>(lm) * static_cast<double>(ln) *
                                   static_cast<double>(inst.nu.size()));
  out.bc_bound = norms * shape;
  out.bc_bound_normalized = norms / density * shape;
  const double mag = std::abs(out.value);
  out.ratio = out.bc_bound > 0.0 ? mag / out.bc_bound : 0.0;
  out.ratio_normalized = out.bc_bound_normalized > 0.0 ? mag / out.bc_bound_normalized : 0.0;
  out.trivial_bound = l1(inst.alpha) * l1(inst.beta) * l1(inst.nu);
  return out;
}

TrilinearInstance random_sign_instance(u64 A, u64 M, u64 N, i64 theta, std::uint64_t seed) {
  if (A == 0 || M == 0 || N == 0) throw InvalidArgument("ranges must start at >= 1");
  SeededRng rng(seed);
  TrilinearInstance inst;
  inst.theta = theta;
  inst.A = A;
  inst.M = M;
  inst.N = N;
  auto fill = [&](std::vector<double>& v, u64 len) {
    v.resize(len);
    for (double& x : v) x = (rng.next() >> 63) ? 1.0 : -1.0;
  };
  fill(inst.alpha, M);
  fill(inst.beta, N);
  fill(inst.nu, A);
  return inst;
}

}  // namespace dlab
