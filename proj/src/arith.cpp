#include "dlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dlab/error.hpp"

namespace dlab {

DivisorBoundViolation::DivisorBoundViolation(std::vector<std::uint64_t> offending)
    : Error(Status::divisor_bound, [&] {
        std::string msg = "divisor bound |c_n| <= tau_k(n) violated at n =";
        const std::size_t shown = std::min<std::size_t>(offending.size(), 16);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + std::to_string(offending[i]);
        if (offending.size() > shown) msg += " ...";
        return msg;
      }()),
      offending_(std::move(offending)) {}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

u64 divisor_count_direct(u64 n) {
  u64 count = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    u64 e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

u64 euler_phi_direct(u64 n) {
  u64 result = n;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

namespace {

u64 binomial(u64 n, u64 k) {
  u128 r = 1;
  for (u64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<u64>(r);
}

}  // namespace

ArithTables ArithTables::build(u64 limit, int k_max) {
  if (limit == 0) throw InvalidArgument("table limit must be >= 1");
  if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
  if (limit >= std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("table limit " + std::to_string(limit) + " exceeds 32-bit entries");

  ArithTables t;
  t.limit_ = limit;
  t.k_max_ = k_max;
  const std::size_t size = static_cast<std::size_t>(limit) + 1;
  t.spf_.assign(size, 0);
  t.phi_.assign(size, 0);
  t.rad_.assign(size, 0);
  t.mu_.assign(size, 0);
  t.tau_.assign(static_cast<std::size_t>(k_max - 1), std::vector<std::uint32_t>(size, 0));

  for (u64 p = 2; p <= limit; ++p) {
    if (t.spf_[p] != 0) continue;
    for (u64 m = p; m <= limit; m += p)
      if (t.spf_[m] == 0) t.spf_[m] = static_cast<std::uint32_t>(p);
  }

  t.phi_[1] = 1;
  t.rad_[1] = 1;
  t.mu_[1] = 1;
  for (auto& tk : t.tau_) tk[1] = 1;

  // Multiplicative fill: n = p^e * m with p = spf(n), gcd(m, p) = 1.
  for (u64 n = 2; n <= limit; ++n) {
    const u64 p = t.spf_[n];
    u64 m = n;
    u64 e = 0;
    u64 pe = 1;
    while (m % p == 0) {
      m /= p;
      ++e;
      pe *= p;
    }
    t.phi_[n] = static_cast<std::uint32_t>(t.phi_[m] * (pe - pe / p));
    t.rad_[n] = static_cast<std::uint32_t>(t.rad_[m] * p);
    t.mu_[n] = static_cast<std::int8_t>(e == 1 ? -t.mu_[m] : 0);
    for (int k = 2; k <= k_max; ++k) {
      const u64 local = binomial(e + static_cast<u64>(k) - 1, static_cast<u64>(k) - 1);
      const u64 value = static_cast<u64>(t.tau_[k - 2][m]) * local;
      if (value > std::numeric_limits<std::uint32_t>::max())
        throw InvalidArgument("tau_" + std::to_string(k) + "(" + std::to_string(n) +
                              ") overflows the table entry type; lower k_max");
      t.tau_[k - 2][n] = static_cast<std::uint32_t>(value);
    }
  }
  return t;
}

void ArithTables::check(u64 n) const {
  if (n == 0 || n > limit_) throw TableLimitError(n, limit_);
}

void ArithTables::require(u64 n) const {
  if (n > limit_) throw TableLimitError(n, limit_);
}

u64 ArithTables::tau(int k, u64 n) const {
  check(n);
  if (k < 1 || k > k_max_)
    throw InvalidArgument("tau_" + std::to_string(k) + " not tabulated (k_max = " +
                          std::to_string(k_max_) + ")");
  return k == 1 ? 1 : tau_[static_cast<std::size_t>(k - 2)][n];
}

u64 ArithTables::phi(u64 n) const {
  check(n);
  return phi_[n];
}

int ArithTables::mu(u64 n) const {
  check(n);
  return mu_[n];
}

u64 ArithTables::rad(u64 n) const {
  check(n);
  return rad_[n];
}

u64 ArithTables::spf(u64 n) const {
  check(n);
  return spf_[n];
}

std::vector<u64> ArithTables::prime_divisors(u64 n) const {
  check(n);
  std::vector<u64> primes;
  while (n > 1) {
    const u64 p = spf_[n];
    primes.push_back(p);
    while (n % p == 0) n /= p;
  }
  return primes;
}

u64 mod_inverse(i128 n, u64 q) {
  if (q == 0) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return 0;
  i128 r0 = static_cast<i128>(q);
  i128 r1 = static_cast<i128>(floor_mod(n, q));
  i128 s0 = 0;
  i128 s1 = 1;
  while (r1 != 0) {
    const i128 quot = r0 / r1;
    const i128 r2 = r0 - quot * r1;
    r0 = r1;
    r1 = r2;
    const i128 s2 = s0 - quot * s1;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1) {
    const auto n64 = static_cast<i64>(n % static_cast<i128>(std::numeric_limits<i64>::max()));
    throw NotInvertible(n64, q, static_cast<u64>(r0));
  }
  return floor_mod(s0, q);
}

u64 mod_inverse(i64 n, u64 q) {
  if (q == 0) throw InvalidArgument("modulus must be >= 1");
  if (q == 1) return 0;
  const u64 g = gcd_i(n, q);
  if (g != 1) throw NotInvertible(n, q, g);
  return mod_inverse(static_cast<i128>(n), q);
}

CoprimeDecomposition coprime_split(u64 n1, u64 n2) {
  if (n1 == 0 || n2 == 0) throw InvalidArgument("coprime_split needs positive arguments");
  CoprimeDecomposition c;
  c.d = std::gcd(n1, n2);
  c.nu1 = n1 / c.d;
  c.nu2 = n2 / c.d;
  // Peel the d-supported part off nu1 through repeated gcds; no factoring.
  c.nu1p = c.nu1;
  c.d1 = 1;
  for (u64 g = std::gcd(c.nu1p, c.d); g > 1; g = std::gcd(c.nu1p, g)) {
    while (c.nu1p % g == 0) {
      c.nu1p /= g;
      c.d1 *= g;
    }
  }
  return c;
}

namespace {

void accumulate_smooth(const std::vector<u64>& primes, std::size_t index, u64 value, u64 cutoff,
                       std::vector<u64>& out) {
  if (index == primes.size()) {
    out.push_back(value);
    return;
  }
  for (u64 v = value;; v *= primes[index]) {
    accumulate_smooth(primes, index + 1, v, cutoff, out);
    if (v > cutoff / primes[index]) break;
  }
}

}  // namespace

double n_over_phi_expansion(u64 n, u64 cutoff) {
  if (n == 0) throw InvalidArgument("n must be >= 1");
  if (cutoff == 0) return 0.0;
  std::vector<u64> primes;
  u64 m = n;
  for (u64 p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      primes.push_back(p);
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) primes.push_back(m);

  std::vector<u64> terms;
  accumulate_smooth(primes, 0, 1, cutoff, terms);
  // Largest terms last so small reciprocals are added first.
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double sum = 0.0;
  for (u64 nu : terms) sum += 1.0 / static_cast<double>(nu);
  return sum;
}

std::vector<std::uint32_t> divisor_count_segment(u64 lo, u64 hi) {
  if (lo == 0) throw InvalidArgument("divisor_count_segment needs lo >= 1");
  if (hi <= lo) return {};
  std::vector<std::uint32_t> counts(hi - lo, 0);
  const u64 root = isqrt(hi - 1);
  for (u64 d = 1; d <= root; ++d) {
    const u64 start_k = std::max(d, (lo + d - 1) / d);
    for (u64 k = start_k; d * k < hi; ++k) counts[d * k - lo] += (k == d) ? 1 : 2;
  }
  return counts;
}

}  // namespace dlab
