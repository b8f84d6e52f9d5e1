#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dlab/numeric.hpp"

namespace dlab {

using BigInt = boost::multiprecision::cpp_int;

/// An exact rational reduced into [0, 1). Equality is equality mod 1.
class UnitFraction {
 public:
  UnitFraction() = default;
  /// num / den mod 1; den must be nonzero (sign is absorbed).
  UnitFraction(const BigInt& num, const BigInt& den);

  const BigInt& num() const noexcept { return num_; }
  const BigInt& den() const noexcept { return den_; }
  std::string to_string() const;  // "num/den"
  double to_double() const;

  UnitFraction operator+(const UnitFraction& o) const;
  UnitFraction operator-(const UnitFraction& o) const;
  UnitFraction operator-() const;
  bool operator==(const UnitFraction& o) const { return num_ == o.num_ && den_ == o.den_; }

 private:
  BigInt num_ = 0;
  BigInt den_ = 1;
};

/// S(a, b; c) = sum_{x mod c, (x, c) = 1} e((a x + b x^-1) / c). Phases are
/// reduced to exact residues before any trigonometry.
std::complex<double> kloosterman(i64 a, i64 b, u64 c);

/// |S(a, b; c)| / (tau_2(c) gcd(a, b, c)^{1/2} c^{1/2}).
double weil_ratio(i64 a, i64 b, u64 c);

/// Precomputed inverses and twiddles for one modulus, for sweeps over (a, b).
class KloostermanTable {
 public:
  explicit KloostermanTable(u64 c);
  u64 modulus() const noexcept { return c_; }
  std::complex<double> operator()(i64 a, i64 b) const;
  double weil_bound(i64 a, i64 b) const;  // tau_2(c) gcd(a, b, c)^{1/2} c^{1/2}

 private:
  u64 c_;
  u64 tau_;
  std::vector<u64> units_;
  std::vector<u64> inverses_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct WeilSweep {
  u64 c_max = 0;
  u64 checked = 0;
  u64 violations = 0;
  double max_ratio = 0.0;
  u64 worst_a = 0, worst_b = 0, worst_c = 0;
  std::vector<double> max_ratio_by_c;  // entry c - 1
};

/// Every (a, b) in [0, c)^2 for 1 <= c <= c_max. A pair violates the bound when
/// |S| > bound (1 + 1e-12) + 1e-12.
WeilSweep weil_sweep(u64 c_max);

struct ShortKloosterman {
  std::complex<double> value;
  double bound_ratio = 0.0;   // |value| / (gcd(ell, a)^{1/2} a^{1/2 + eps0})
  double eps0 = 0.1;
  u64 terms = 0;
};

/// sum_{n in [lo, hi], (n, ab) = 1} (n / phi(n)) e(ell n^-1 / a).
/// Throws InvalidArgument unless 1 <= lo <= hi <= a and b >= 1.
ShortKloosterman short_kloosterman_weighted(u64 lo, u64 hi, i64 ell, u64 a, u64 b);

struct ShortKloostermanSweep {
  u64 trials = 0;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
};

/// Random intervals, ell, a <= a_max, b <= b_max from the seeded generator.
ShortKloostermanSweep short_kloosterman_sweep(u64 trials, u64 a_max, u64 b_max, std::uint64_t seed);

struct BezoutCheck {
  UnitFraction lhs;   // a m^-1 / n, inverse mod n
  UnitFraction rhs1;  // -a n^-1 / m, inverse mod m
  UnitFraction rhs2;  // a / (mn)
  bool exact_match = false;
};

/// Throws NotInvertible when gcd(m, n) > 1; m, n >= 1.
BezoutCheck bezout_reciprocity(i64 a, u64 m, u64 n);

struct BezoutSweep {
  u64 trials = 0;
  u64 mismatches = 0;
};

/// Random coprime m, n in [1, bound] and a in [-bound, bound].
BezoutSweep bezout_sweep(u64 trials, u64 bound, std::uint64_t seed);

struct FactorizationInput {
  i64 a = 1;
  i64 h = 1;
  i64 r = 1;
  u64 d = 1;
  u64 d1 = 1;
  u64 nu1p = 1;
  u64 nu2 = 1;
};

struct FactorizationCheck {
  u64 q = 0;                 // (d1 nu1p - nu2) / r
  UnitFraction original;     // a h (d d1 nu1p)^-1 / q, inverse mod q
  // original = pieces[0] + pieces[1] + pieces[2] mod 1 with
  //   pieces[0] = xi = -a h nu1p^-1 q^-1 / (d d1)      (inverses mod d d1)
  //   pieces[1] = a h r (d d1 nu2)^-1 / nu1p           (inverse mod nu1p)
  //   pieces[2] = a h r / (d d1 nu1p (d1 nu1p - nu2))
  std::vector<UnitFraction> pieces;
  UnitFraction first_step;   // -a h q^-1 / (d d1 nu1p) + pieces[2]
  u64 xi_modulus = 1;        // d d1
  u64 xi_residue = 0;        // numerator of xi over d d1
  bool exact_match = false;
};

/// Throws PreconditionError naming the failing condition unless
/// (d1 nu1p, nu2) = 1, (nu1p, d) = 1, d1 | d^inf, r | d1 nu1p - nu2 with
/// quotient q >= 1, and (d d1 nu1p r, d1 nu1p - nu2) = |r|.
FactorizationCheck kloosterman_fraction_factorization(const FactorizationInput& in);

/// xi rebuilt from the residues of (a, h, r, nu1p, nu2) modulo d d1 alone.
/// This needs r invertible modulo d d1 (otherwise q mod d d1 is not determined
/// by those residues); throws NotInvertible when gcd(r, d d1) > 1.
u64 xi_from_residues(const FactorizationInput& in);

struct FactorizationSweep {
  u64 trials = 0;
  u64 mismatches = 0;
  u64 xi_pairs = 0;          // tuples compared against a congruent partner
  u64 xi_pair_mismatches = 0;
};

/// Random admissible tuples; for each tuple with gcd(r, d d1) = 1 a partner
/// congruent modulo d d1 is drawn and its xi compared.
FactorizationSweep factorization_sweep(u64 trials, std::uint64_t seed);

struct TrilinearInstance {
  i64 theta = 1;
  u64 A = 1, M = 1, N = 1;          // ranges [A, A + len) etc.
  std::vector<double> alpha;        // indexed by m - M
  std::vector<double> beta;         // indexed by n - N
  std::vector<double> nu;           // indexed by a - A
};

struct TrilinearResult {
  std::complex<double> value;
  double bc_bound = 0.0;             // plain l2 norms
  double ratio = 0.0;
  double bc_bound_normalized = 0.0;  // norms scaled by (range length)^{-1/2}
  double ratio_normalized = 0.0;
  double trivial_bound = 0.0;
  double eps = 0.05;
  u64 skipped_pairs = 0;             // (m, n) with gcd > 1
};

/// Throws InvalidArgument for theta = 0 or empty ranges.
TrilinearResult trilinear_form(const TrilinearInstance& inst);

/// Dyadic instance with independent uniform +-1 coefficients.
TrilinearInstance random_sign_instance(u64 A, u64 M, u64 N, i64 theta, std::uint64_t seed);

}  // namespace dlab
