#include "dlab/discrepancy.hpp"

#include <cmath>
#include <numeric>

#include "dlab/arith.hpp"
#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/summation.hpp"

namespace dlab {

namespace {

std::vector<double> residue_buckets(const CoefficientSequence& seq, u64 q) {
  std::vector<CompensatedSum> sums(q);
  u64 r = seq.lower() % q;
  for (double c : seq.values()) {
    sums[r] += c;
    if (++r == q) r = 0;
  }
  std::vector<double> out(q);
  for (u64 i = 0; i < q; ++i) out[i] = sums[i].value();
  return out;
}

}  // namespace

double discrepancy_E(const CoefficientSequence& alpha, const CoefficientSequence& beta, u64 q, i64 a) {
  if (q == 0) throw InvalidArgument("q must be >= 1");
  if (gcd_i(a, q) != 1) throw InvalidArgument("discrepancy needs gcd(q, a) = 1");
  if (q == 1) return 0.0;
  const std::vector<double> A = residue_buckets(alpha, q);
  const std::vector<double> B = residue_buckets(beta, q);
  const u64 a_mod = floor_mod(a, q);
  CompensatedSum matched;
  CompensatedSum sum_a;
  CompensatedSum sum_b;
  u64 phi = 0;
  for (u64 r = 1; r < q; ++r) {
    if (std::gcd(r, q) != 1) continue;
    ++phi;
    sum_a += A[r];
    sum_b += B[r];
    if (A[r] == 0.0) continue;
    const u64 partner = mul_mod(a_mod, mod_inverse(static_cast<i64>(r), q), q);
    matched += A[r] * B[partner];
  }
  return matched.value() - sum_a.value() * sum_b.value() / static_cast<double>(phi);
}

DiscrepancyReport mean_discrepancy(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                                   const DiscrepancyParams& params) {
  DiscrepancyReport report;
  report.X = static_cast<double>(alpha.lower()) * static_cast<double>(beta.lower());
  if (params.Q == 0) throw PreconditionError("Q must be >= 1");
  if (params.a == 0 || static_cast<double>(abs_u64(params.a)) > report.X)
    throw PreconditionError("shift a must satisfy 1 <= |a| <= X");

  std::vector<u64> moduli;
  for (u64 q = params.Q; q < 2 * params.Q; ++q)
    if (gcd_i(params.a, q) == 1) moduli.push_back(q);
  const std::vector<double> values =
      parallel_map(moduli.size(), [&](std::size_t i) { return discrepancy_E(alpha, beta, moduli[i], params.a); });

  CompensatedSum delta;
  report.per_q.reserve(moduli.size());
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    report.per_q.push_back({moduli[i], values[i]});
    delta += std::fabs(values[i]);
  }
  report.delta = delta.value();
  report.normalized = report.delta / report.X;
  return report;
}

QWindow admissible_Q_window(double M, double N, double eps) {
  if (!(M >= 1.0) || !(N >= 1.0)) throw InvalidArgument("M and N must be >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const double log_x = std::log(M) + std::log(N);
  if (!(log_x > 0.0)) throw InvalidArgument("X = MN must exceed 1");
  QWindow w;
  w.n_exponent = std::log(N) / log_x;
  w.exponent_lo = 56.0 / 23.0 * w.n_exponent - 17.0 / 23.0 + eps;
  w.exponent_hi = w.n_exponent - eps;
  w.n_below_17_33 = w.n_exponent < 17.0 / 33.0;
  w.empty = !(w.exponent_lo <= w.exponent_hi) || !w.n_below_17_33;
  w.lo = std::exp(w.exponent_lo * log_x);
  w.hi = std::exp(w.exponent_hi * log_x);
  return w;
}

}  // namespace dlab
