#include "dlab/titchmarsh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/summation.hpp"

namespace dlab {

namespace {

// Sieve segment length for tau_2(mn - 1). Fixed so the summation order does
// not depend on the worker count.
constexpr u64 kSegment = u64{1} << 18;

bool is_empty(const CoefficientSequence& s) { return s.size() == 0; }

u64 max_product(const CoefficientSequence& alpha, const CoefficientSequence& beta) {
  const u128 p = static_cast<u128>(alpha.upper() - 1) * (beta.upper() - 1);
  if (p > static_cast<u128>(UINT64_MAX / 4)) throw InvalidArgument("supports too large for 64-bit products");
  return static_cast<u64>(p);
}

// 1 where gcd(n, q) = 1 for n in [lo, lo + len).
std::vector<char> coprime_mask(u64 q, u64 lo, std::size_t len, const std::vector<u64>& primes) {
  std::vector<char> mask(len, 1);
  if (q == 1) return mask;
  for (u64 p : primes) {
    u64 first = (lo + p - 1) / p * p;
    for (u64 n = first; n < lo + len; n += p) mask[n - lo] = 0;
  }
  return mask;
}

std::vector<u64> prime_factors(u64 q) {
  std::vector<u64> primes;
  for (u64 p = 2; p * p <= q; ++p) {
    if (q % p) continue;
    primes.push_back(p);
    while (q % p == 0) q /= p;
  }
  if (q > 1) primes.push_back(q);
  return primes;
}

u64 first_in_class(u64 lo, u64 residue, u64 q) {
  return lo + floor_mod(static_cast<i64>(residue) - static_cast<i64>(lo % q), q);
}

}  // namespace

double corollary_lhs(const CoefficientSequence& alpha, const CoefficientSequence& beta, u64 sieve_limit) {
  if (is_empty(alpha) || is_empty(beta)) return 0.0;
  if (alpha.lower() == 1 && beta.lower() == 1)
    throw PreconditionError("pair m = n = 1 gives tau_2(0)");
  const u64 w_min = alpha.lower() * beta.lower() - 1;
  const u64 w_max = max_product(alpha, beta) - 1;
  if (w_max > sieve_limit) throw TableLimitError(w_max, sieve_limit);

  const u64 segments = (w_max - w_min) / kSegment + 1;
  const std::vector<double> parts = parallel_map(segments, [&](std::size_t s) {
    const u64 lo = w_min + s * kSegment;
    const u64 hi = std::min(lo + kSegment, w_max + 1);
    const std::vector<std::uint32_t> tau = divisor_count_segment(lo, hi);
    CompensatedSum sum;
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m) {
      const double a = alpha[m];
      if (a == 0.0) continue;
      // lo <= mn - 1 < hi
      const u64 n_lo = std::max(beta.lower(), (lo + 1 + m - 1) / m);
      const u64 n_hi = std::min(beta.upper(), (hi + 1 + m - 1) / m);
      CompensatedSum inner;
      for (u64 n = n_lo; n < n_hi; ++n) {
        const double b = beta[n];
        if (b != 0.0) inner += b * static_cast<double>(tau[m * n - 1 - lo]);
      }
      sum += a * inner.value();
    }
    return sum.value();
  });
  CompensatedSum total;
  for (double v : parts) total += v;
  return total.value();
}

double corollary_rhs(const CoefficientSequence& alpha, const CoefficientSequence& beta, u64 extra_q) {
  if (is_empty(alpha) || is_empty(beta)) return 0.0;
  const u64 p_max = max_product(alpha, beta);
  u64 q_max = isqrt(p_max);
  if (q_max * q_max == p_max) --q_max;  // q^2 < max mn
  const u64 q_total = q_max + extra_q;
  const std::size_t len_a = alpha.size();
  const std::size_t len_b = beta.size();

  const std::vector<double> parts = parallel_map(q_total, [&](std::size_t i) {
    const u64 q = i + 1;
    const std::vector<u64> primes = prime_factors(q);
    u64 phi = q;
    for (u64 p : primes) phi -= phi / p;
    const std::vector<char> ok_b = coprime_mask(q, beta.lower(), len_b, primes);
    const std::vector<char> ok_a = coprime_mask(q, alpha.lower(), len_a, primes);
    // suffix[j] = sum_{n >= N + j, (n, q) = 1} beta_n
    std::vector<double> suffix(len_b + 1, 0.0);
    for (std::size_t j = len_b; j-- > 0;)
      suffix[j] = suffix[j + 1] + (ok_b[j] ? beta.values()[j] : 0.0);
    const u128 q2 = static_cast<u128>(q) * q;
    CompensatedSum sum;
    for (std::size_t k = 0; k < len_a; ++k) {
      const double a = alpha.values()[k];
      if (a == 0.0 || !ok_a[k]) continue;
      const u64 m = alpha.lower() + k;
      const u128 n_min = q2 / m + 1;  // mn > q^2
      if (n_min >= beta.upper()) continue;
      const std::size_t j = n_min <= beta.lower() ? 0 : static_cast<std::size_t>(n_min - beta.lower());
      sum += a * suffix[j];
    }
    return sum.value() / static_cast<double>(phi);
  });
  CompensatedSum total;
  for (double v : parts) total += v;
  return 2.0 * total.value();
}

HyperbolaSplit hyperbola_split(const CoefficientSequence& alpha, const CoefficientSequence& beta) {
  HyperbolaSplit out;
  if (is_empty(alpha) || is_empty(beta)) return out;
  if (alpha.lower() == 1 && beta.lower() == 1)
    throw PreconditionError("pair m = n = 1 gives tau_2(0)");
  const u64 X = alpha.lower() * beta.lower();
  const u64 s = isqrt(X);
  out.sqrt_X = s;
  const u64 w_max = max_product(alpha, beta) - 1;

  // S0: q <= sqrt(X). Every pair has mn >= X >= q^2, so among mn = 1 (q) only
  // mn = q^2 + 1 (w = q^2) fails q^2 < w.
  const std::vector<double> s0 = parallel_map(s, [&](std::size_t i) {
    const u64 q = i + 1;
    std::vector<CompensatedSum> A(q), B(q);
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m) A[m % q] += alpha[m];
    for (u64 n = beta.lower(); n < beta.upper(); ++n) B[n % q] += beta[n];
    CompensatedSum sum;
    for (u64 c = 0; c < q; ++c) {
      if (std::gcd(c, q) != 1) continue;
      const u64 partner = q == 1 ? 0 : mod_inverse(static_cast<i64>(c), q);
      sum += A[c].value() * B[partner].value();
    }
    const u64 edge = q * q + 1;
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m) {
      if (edge % m) continue;
      const u64 n = edge / m;
      if (n >= beta.lower() && n < beta.upper()) sum += -(alpha[m] * beta[n]);
    }
    return sum.value();
  });

  // S1: q^2 > X and q^2 < mn - 1, stepping n through the class of m^-1.
  u64 q_end = s + 1;
  while (static_cast<u128>(q_end) * q_end < w_max) ++q_end;
  const std::vector<double> s1 = parallel_map(q_end - (s + 1), [&](std::size_t i) {
    const u64 q = s + 1 + i;
    const u128 q2 = static_cast<u128>(q) * q;
    CompensatedSum sum;
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m) {
      const double a = alpha[m];
      if (a == 0.0 || std::gcd(m, q) != 1) continue;
      const u64 residue = mod_inverse(static_cast<i64>(m), q);
      const u128 n_min = (q2 + 1) / m + 1;  // mn > q^2 + 1
      if (n_min >= beta.upper()) continue;
      const u64 start = std::max<u64>(beta.lower(), static_cast<u64>(n_min));
      CompensatedSum inner;
      for (u64 n = first_in_class(start, residue, q); n < beta.upper(); n += q) inner += beta[n];
      sum += a * inner.value();
    }
    return sum.value();
  });

  const std::vector<double> squares = parallel_map(alpha.size(), [&](std::size_t k) {
    const u64 m = alpha.lower() + k;
    const double a = alpha[m];
    if (a == 0.0) return 0.0;
    CompensatedSum sum;
    for (u64 n = beta.lower(); n < beta.upper(); ++n) {
      const u64 w = m * n - 1;
      const u64 r = isqrt(w);
      if (r * r == w) sum += beta[n];
    }
    return a * sum.value();
  });

  CompensatedSum S0, S1, sq;
  for (double v : s0) S0 += v;
  for (double v : s1) S1 += v;
  for (double v : squares) sq += v;
  out.S0 = S0.value();
  out.S1 = S1.value();
  out.square_mass = sq.value();
  CompensatedSum total;
  total += 2.0 * out.S0;
  total += 2.0 * out.S1;
  total += out.square_mass;
  out.reassembled = total.value();
  return out;
}

DissectionGrid DissectionGrid::build(u64 M, u64 N, double B) {
  if (M == 0 || N == 0) throw InvalidArgument("M and N must be >= 1");
  if (!(B >= 1.0)) throw InvalidArgument("dissection exponent B must be >= 1");
  DissectionGrid g;
  g.B_ = B;
  g.X_ = static_cast<double>(M) * static_cast<double>(N);
  if (g.X_ < 2.0) throw InvalidArgument("X = MN must be >= 2");
  g.L_ = std::log(2.0 * g.X_);
  const double l0 = std::floor(std::pow(g.L_, B));
  if (l0 > 1e6) throw InvalidArgument("L0 = floor(log(2X)^B) too large");
  g.L0_ = static_cast<u64>(l0);
  g.delta_ = std::exp2(1.0 / static_cast<double>(g.L0_));
  auto ladder = [&](double base) {
    std::vector<double> r(g.L0_ + 1);
    for (u64 i = 0; i < g.L0_; ++i)
      r[i] = base * std::exp2(static_cast<double>(i) / static_cast<double>(g.L0_));
    r[g.L0_] = 2.0 * base;
    return r;
  };
  g.m_ = ladder(static_cast<double>(M));
  g.n_ = ladder(static_cast<double>(N));
  g.q_ = ladder(std::sqrt(g.X_));
  return g;
}

bool DissectionGrid::e0(std::size_t i, std::size_t j, std::size_t k) const {
  return m_[i] * n_[j] - 1.0 <= q_[k] * q_[k] * delta_ * delta_;
}

u64 DissectionGrid::count_e0() const {
  u64 count = 0;
  for (std::size_t i = 0; i < L0_; ++i) {
    for (std::size_t j = 0; j < L0_; ++j) {
      // e0 is monotone in k: find the first rung where it holds.
      std::size_t lo = 0, hi = L0_;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (e0(i, j, mid)) hi = mid;
        else lo = mid + 1;
      }
      count += L0_ - lo;
    }
  }
  return count;
}

long DissectionGrid::rung_of(const std::vector<double>& rungs, double y) {
  if (rungs.size() < 2 || y < rungs.front() || !(y < rungs.back())) return -1;
  return static_cast<long>(std::upper_bound(rungs.begin(), rungs.end(), y) - rungs.begin()) - 1;
}

DissectionSums dissect_s1(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                          const DissectionGrid& grid) {
  DissectionSums out;
  if (is_empty(alpha) || is_empty(beta)) return out;
  const u64 M = alpha.lower();
  const u64 N = beta.lower();
  if (alpha.upper() > 2 * M || beta.upper() > 2 * N)
    throw PreconditionError("dissection needs supports inside [M, 2M) and [N, 2N)");
  if (std::fabs(grid.m_rungs().front() - static_cast<double>(M)) > 0.0 ||
      std::fabs(grid.n_rungs().front() - static_cast<double>(N)) > 0.0)
    throw PreconditionError("grid was built for different M, N");

  const u64 X = M * N;
  const u64 s = isqrt(X);
  const u64 q_first = s * s == X ? s : s + 1;  // smallest q >= sqrt(X)
  const u64 w_max = max_product(alpha, beta) - 1;
  u64 q_end = q_first;
  while (static_cast<double>(q_end) < grid.q_rungs().back()) ++q_end;

  std::vector<long> m_rung(alpha.size()), n_rung(beta.size());
  for (std::size_t k = 0; k < alpha.size(); ++k)
    m_rung[k] = DissectionGrid::rung_of(grid.m_rungs(), static_cast<double>(M + k));
  for (std::size_t k = 0; k < beta.size(); ++k)
    n_rung[k] = DissectionGrid::rung_of(grid.n_rungs(), static_cast<double>(N + k));

  const std::vector<DissectionSums> parts = parallel_map(q_end - q_first, [&](std::size_t i) {
    const u64 q = q_first + i;
    DissectionSums part;
    const long qk = DissectionGrid::rung_of(grid.q_rungs(), static_cast<double>(q));
    if (qk < 0) return part;
    const u128 q2 = static_cast<u128>(q) * q;
    const bool in_s1 = q > s && q2 < w_max;
    CompensatedSum e0_sum, free_sum;
    for (u64 m = M; m < alpha.upper(); ++m) {
      if (std::gcd(m, q) != 1) continue;
      const u64 residue = mod_inverse(static_cast<i64>(m), q);
      const long mi = m_rung[m - M];
      const u128 split = (q2 + 1) / m + 1;  // n >= split <=> mn - 1 > q^2
      for (u64 n = first_in_class(N, residue, q); n < beta.upper(); n += q) {
        const long nj = n_rung[n - N];
        const bool flagged = grid.e0(static_cast<std::size_t>(mi), static_cast<std::size_t>(nj),
                                     static_cast<std::size_t>(qk));
        if (n < split) {
          if (!flagged && m * n > 1) ++part.dropped_condition_violations;
          continue;
        }
        if (!in_s1) continue;
        const double v = alpha[m] * beta[n];
        ++part.triples;
        if (flagged) {
          ++part.e0_triples;
          e0_sum += v;
        } else {
          free_sum += v;
        }
      }
    }
    part.s1_e0 = e0_sum.value();
    part.s1_free = free_sum.value();
    return part;
  });

  CompensatedSum e0_total, free_total;
  for (const DissectionSums& p : parts) {
    e0_total += p.s1_e0;
    free_total += p.s1_free;
    out.triples += p.triples;
    out.e0_triples += p.e0_triples;
    out.dropped_condition_violations += p.dropped_condition_violations;
  }
  out.s1_e0 = e0_total.value();
  out.s1_free = free_total.value();
  return out;
}

CorollaryDeviation corollary_deviation(const CoefficientSequence& alpha,
                                       const CoefficientSequence& beta, u64 sieve_limit) {
  CorollaryDeviation out;
  out.lhs = corollary_lhs(alpha, beta, sieve_limit);
  out.rhs = corollary_rhs(alpha, beta);
  out.abs_dev = std::fabs(out.lhs - out.rhs);
  out.rel_dev = out.lhs != 0.0 ? out.abs_dev / std::fabs(out.lhs) : (out.rhs == 0.0 ? 0.0 : INFINITY);
  return out;
}

CorollaryShape corollary_shape(double X, double delta) {
  if (!(X >= 2.0)) throw InvalidArgument("X must be >= 2");
  if (!(delta >= 0.0) || !(delta < 0.5)) throw InvalidArgument("delta must lie in [0, 1/2)");
  CorollaryShape s;
  s.M = std::max<u64>(1, static_cast<u64>(std::llround(std::pow(X, 0.5 - delta))));
  s.N = std::max<u64>(1, static_cast<u64>(std::llround(std::pow(X, 0.5 + delta))));
  return s;
}

}  // namespace dlab
