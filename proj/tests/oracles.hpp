#pragma once

// Naive reference implementations. Everything here loops over the original
// variables directly, with no residue bucketing, tables or shared helpers from
// the library beyond the cutoff psi itself.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "dlab/sequences.hpp"
#include "dlab/smooth_cutoff.hpp"

namespace oracle {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using ld = long double;

inline u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

inline u64 divisors(u64 n) {
  u64 c = 0;
  for (u64 d = 1; d <= n; ++d)
    if (n % d == 0) ++c;
  return c;
}

inline u64 divisors_fast(u64 n) {
  u64 c = 0;
  for (u64 d = 1; d * d <= n; ++d)
    if (n % d == 0) c += (d * d == n) ? 1 : 2;
  return c;
}

inline u64 tau_k(int k, u64 n) {
  if (k == 1) return 1;
  u64 s = 0;
  for (u64 d = 1; d <= n; ++d)
    if (n % d == 0) s += tau_k(k - 1, d);
  return s;
}

inline u64 phi(u64 n) {
  u64 c = 0;
  for (u64 k = 1; k <= n; ++k)
    if (gcd(k, n) == 1) ++c;
  return c;
}

inline int mu(u64 n) {
  int sign = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  return n > 1 ? -sign : sign;
}

inline u64 rad(u64 n) {
  u64 r = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    r *= p;
    while (n % p == 0) n /= p;
  }
  return n > 1 ? r * n : r;
}

inline u64 inverse(u64 x, u64 q) {
  if (q == 1) return 0;
  for (u64 y = 1; y < q; ++y)
    if ((x % q) * y % q == 1) return y;
  return q;
}

inline u64 mod(i64 a, u64 q) {
  const i64 r = a % static_cast<i64>(q);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(q) : r);
}

inline double E(const dlab::CoefficientSequence& alpha, const dlab::CoefficientSequence& beta,
                u64 q, i64 a) {
  const u64 target = mod(a, q);
  ld hit = 0, coprime = 0;
  for (u64 m = alpha.lower(); m < alpha.upper(); ++m)
    for (u64 n = beta.lower(); n < beta.upper(); ++n) {
      const ld c = static_cast<ld>(alpha[m]) * beta[n];
      if ((m % q) * (n % q) % q == target) hit += c;
      if (gcd(m * n, q) == 1) coprime += c;
    }
  return static_cast<double>(hit - coprime / phi(q));
}

struct Mean {
  std::vector<u64> q;
  std::vector<double> E;
  double delta = 0;
};

inline Mean mean_discrepancy(const dlab::CoefficientSequence& alpha,
                             const dlab::CoefficientSequence& beta, u64 Q, i64 a) {
  Mean out;
  ld delta = 0;
  for (u64 q = Q; q < 2 * Q; ++q) {
    if (gcd(static_cast<u64>(a < 0 ? -a : a), q) != 1) continue;
    const double e = E(alpha, beta, q, a);
    out.q.push_back(q);
    out.E.push_back(e);
    delta += std::fabs(e);
  }
  out.delta = static_cast<double>(delta);
  return out;
}

struct UVW {
  double U = 0, V = 0, W = 0, U_MT = 0, W_MT = 0, lhs = 0;
};

// Smoothed sums over Q/2 < q < 5Q/2 with (q, a) = 1 and M/2 < m < 5M/2 with
// (m, q) = 1; the inner n-sums run over the whole support of beta.
inline UVW dispersion(const dlab::CoefficientSequence& beta, u64 M, u64 Q, i64 a,
                      const dlab::SmoothCutoff& psi) {
  ld U = 0, V = 0, W = 0, UMT = 0, WMT = 0, lhs = 0;
  const ld hat0 = psi.hat_zero();
  for (u64 q = Q / 2 + 1; q <= 5 * Q / 2; ++q) {
    if (gcd(static_cast<u64>(a < 0 ? -a : a), q) != 1) continue;
    const ld wq = psi(static_cast<double>(q) / static_cast<double>(Q));
    if (wq == 0) continue;
    const ld ph = phi(q);
    ld S = 0;
    for (u64 n = beta.lower(); n < beta.upper(); ++n)
      if (gcd(n, q) == 1) S += beta[n];
    for (u64 m = M / 2 + 1; m <= 5 * M / 2; ++m) {
      if (gcd(m, q) != 1) continue;
      const ld wm = psi(static_cast<double>(m) / static_cast<double>(M));
      ld T = 0;
      for (u64 n = beta.lower(); n < beta.upper(); ++n)
        if ((m % q) * (n % q) % q == mod(a, q)) T += beta[n];
      U += wq * wm * (S / ph) * (S / ph);
      V += wq * wm * (S / ph) * T;
      W += wq * wm * T * T;
      lhs += wq * wm * (T - S / ph) * (T - S / ph);
    }
    ld pairs = 0;
    for (u64 n1 = beta.lower(); n1 < beta.upper(); ++n1)
      for (u64 n2 = beta.lower(); n2 < beta.upper(); ++n2)
        if (n1 % q == n2 % q && gcd(n1, q) == 1) pairs += static_cast<ld>(beta[n1]) * beta[n2];
    UMT += hat0 * M * wq * S * S / (q * ph);
    WMT += hat0 * M * wq / q * pairs;
  }
  return {static_cast<double>(U), static_cast<double>(V), static_cast<double>(W),
          static_cast<double>(UMT), static_cast<double>(WMT), static_cast<double>(lhs)};
}

inline double corollary_lhs(const dlab::CoefficientSequence& alpha,
                            const dlab::CoefficientSequence& beta) {
  ld s = 0;
  for (u64 m = alpha.lower(); m < alpha.upper(); ++m)
    for (u64 n = beta.lower(); n < beta.upper(); ++n)
      s += static_cast<ld>(alpha[m]) * beta[n] * divisors_fast(m * n - 1);
  return static_cast<double>(s);
}

inline double corollary_rhs(const dlab::CoefficientSequence& alpha,
                            const dlab::CoefficientSequence& beta) {
  const u64 top = (alpha.upper() - 1) * (beta.upper() - 1);
  ld s = 0;
  for (u64 q = 1; q * q < top; ++q) {
    ld inner = 0;
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m)
      for (u64 n = beta.lower(); n < beta.upper(); ++n)
        if (m * n > q * q && gcd(m * n, q) == 1) inner += static_cast<ld>(alpha[m]) * beta[n];
    s += inner / phi(q);
  }
  return static_cast<double>(2 * s);
}

struct Trilinear {
  std::complex<double> value;
  double mass = 0;
  u64 skipped = 0;
};

inline Trilinear trilinear(i64 theta, u64 A, u64 M, u64 N, const std::vector<double>& alpha,
                           const std::vector<double>& beta, const std::vector<double>& nu) {
  const ld two_pi = 6.283185307179586476925286766559L;
  ld re = 0, im = 0, mass = 0;
  u64 skipped = 0;
  for (u64 i = 0; i < nu.size(); ++i)
    for (u64 j = 0; j < alpha.size(); ++j)
      for (u64 k = 0; k < beta.size(); ++k) {
        const u64 a = A + i, m = M + j, n = N + k;
        if (gcd(m, n) != 1) {
          if (i == 0) ++skipped;
          continue;
        }
        const u64 mbar = inverse(m, n);
        const u64 num = mod(theta * static_cast<i64>(a % n) % static_cast<i64>(n) *
                                static_cast<i64>(mbar) % static_cast<i64>(n),
                            n);
        const ld c = static_cast<ld>(nu[i]) * alpha[j] * beta[k];
        const ld ang = two_pi * num / n;
        re += c * std::cos(ang);
        im += c * std::sin(ang);
        mass += std::fabs(c);
      }
  return {{static_cast<double>(re), static_cast<double>(im)}, static_cast<double>(mass), skipped};
}

inline std::complex<double> kloosterman(i64 a, i64 b, u64 c) {
  const ld two_pi = 6.283185307179586476925286766559L;
  ld re = 0, im = 0;
  for (u64 x = 0; x < c; ++x) {
    if (gcd(x, c) != 1) continue;
    const u64 xb = inverse(x, c);
    const u64 num = (mod(a, c) * x + mod(b, c) * xb) % c;
    re += std::cos(two_pi * num / c);
    im += std::sin(two_pi * num / c);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace oracle
