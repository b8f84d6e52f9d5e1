#pragma once

#include <vector>

#include "dlab/numeric.hpp"
#include "dlab/sequences.hpp"

namespace dlab {

/// E(q, a) = sum_{mn = a (q)} alpha_m beta_n - (1/phi(q)) sum_{(mn, q) = 1} alpha_m beta_n.
/// Both sums are taken over the full supports of alpha and beta. Residues are
/// bucketed first, so the cost is O(M + N + q). E(1, a) = 0.
/// Throws InvalidArgument when gcd(q, a) > 1.
double discrepancy_E(const CoefficientSequence& alpha, const CoefficientSequence& beta, u64 q, i64 a);

struct DiscrepancyParams {
  i64 a = 1;
  u64 Q = 1;  // moduli q with Q <= q < 2Q
};

struct DiscrepancyEntry {
  u64 q = 0;
  double E = 0.0;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyEntry> per_q;  // increasing q, all coprime to a
  double delta = 0.0;                   // sum |E|
  double X = 0.0;                       // alpha.lower() * beta.lower()
  double normalized = 0.0;              // delta / X
};

/// Throws PreconditionError unless 1 <= |a| <= X and Q >= 1.
DiscrepancyReport mean_discrepancy(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                                   const DiscrepancyParams& params);

/// Admissible moduli N^{56/23} X^{-17/23 + eps} <= Q <= N X^{-eps}, X = MN.
/// Exponents are in units of log X.
struct QWindow {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
  double exponent_lo = 0.0;
  double exponent_hi = 0.0;
  double n_exponent = 0.0;       // log N / log X
  bool n_below_17_33 = false;    // N < X^{17/33}, necessary for a nonempty window
};

/// Throws InvalidArgument unless M, N >= 1, MN > 1 and eps > 0.
QWindow admissible_Q_window(double M, double N, double eps);

}  // namespace dlab
