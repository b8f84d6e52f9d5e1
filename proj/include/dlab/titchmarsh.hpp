#pragma once

#include <cstdint>
#include <vector>

#include "dlab/numeric.hpp"
#include "dlab/sequences.hpp"

namespace dlab {

/// sum_{m, n} alpha_m beta_n tau_2(mn - 1) over the full supports. tau_2 comes
/// from a segmented divisor sieve over [min mn - 1, max mn - 1]; sieve_limit
/// caps the largest argument (TableLimitError beyond it). The pair m = n = 1
/// is rejected with PreconditionError.
double corollary_lhs(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                     u64 sieve_limit = UINT64_MAX);

/// 2 sum_{q >= 1} (1/phi(q)) sum_{mn > q^2, (mn, q) = 1} alpha_m beta_n.
/// q stops once q^2 >= max mn; extra_q evaluates that many further moduli
/// (their terms are all empty).
double corollary_rhs(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                     u64 extra_q = 0);

/// tau_2(w) = 2 #{q | w : q^2 < w} + [w square], split at q^2 <= X (S0)
/// and q^2 > X (S1) with X = alpha.lower() * beta.lower().
struct HyperbolaSplit {
  double S0 = 0.0;
  double S1 = 0.0;
  double square_mass = 0.0;   // sum of alpha_m beta_n over mn - 1 a perfect square
  double reassembled = 0.0;   // 2 S0 + 2 S1 + square_mass
  u64 sqrt_X = 0;             // floor(sqrt(X)), largest q in S0
};

HyperbolaSplit hyperbola_split(const CoefficientSequence& alpha, const CoefficientSequence& beta);

/// Geometric ladders with ratio Delta = 2^{1/L0}, L0 = floor(log(2X)^B):
///   M Delta^i, N Delta^j, X^{1/2} Delta^k for 0 <= i, j, k < L0.
/// Rung i covers [start_i, start_{i+1}); the last end point is exactly 2M
/// (resp. 2N, 2 X^{1/2}). Cells are the L0^3 products of rungs.
class DissectionGrid {
 public:
  /// Throws InvalidArgument unless M, N >= 1, MN >= 2 and B >= 1.
  static DissectionGrid build(u64 M, u64 N, double B);

  double B() const noexcept { return B_; }
  double log_2X() const noexcept { return L_; }
  u64 L0() const noexcept { return L0_; }
  double delta() const noexcept { return delta_; }
  double X() const noexcept { return X_; }
  u64 cell_count() const noexcept { return L0_ * L0_ * L0_; }

  /// L0 + 1 end points per ladder.
  const std::vector<double>& m_rungs() const noexcept { return m_; }
  const std::vector<double>& n_rungs() const noexcept { return n_; }
  const std::vector<double>& q_rungs() const noexcept { return q_; }

  /// M0 N0 - 1 <= Q0^2 Delta^2 for cell (i, j, k).
  bool e0(std::size_t i, std::size_t j, std::size_t k) const;
  u64 count_e0() const;

  /// Rung holding y, or -1 when y is outside the ladder.
  static long rung_of(const std::vector<double>& rungs, double y);

 private:
  double B_ = 1.0;
  double L_ = 0.0;
  u64 L0_ = 1;
  double delta_ = 2.0;
  double X_ = 0.0;
  std::vector<double> m_, n_, q_;
};

/// S1 regrouped by dissection cell.
struct DissectionSums {
  double s1_e0 = 0.0;    // cells with M0 N0 - 1 <= Q0^2 Delta^2
  double s1_free = 0.0;  // the remaining cells, where mn - 1 > q^2 always holds
  u64 triples = 0;       // (q, m, n) with q^2 > X, q | mn - 1, q^2 < mn - 1
  u64 e0_triples = 0;
  /// Triples (q, m, n), q | mn - 1, q in the Q ladder, lying in a cell outside
  /// E0 but with mn - 1 <= q^2. Always 0; checked by enumeration.
  u64 dropped_condition_violations = 0;
};

DissectionSums dissect_s1(const CoefficientSequence& alpha, const CoefficientSequence& beta,
                          const DissectionGrid& grid);

struct CorollaryDeviation {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_dev = 0.0;
  double rel_dev = 0.0;  // abs_dev / |lhs|, 0 when both sides vanish
};

CorollaryDeviation corollary_deviation(const CoefficientSequence& alpha,
                                       const CoefficientSequence& beta,
                                       u64 sieve_limit = UINT64_MAX);

/// (M, N) = (round(X^{1/2 - delta}), round(X^{1/2 + delta})).
struct CorollaryShape {
  u64 M = 1;
  u64 N = 1;
};
CorollaryShape corollary_shape(double X, double delta);

}  // namespace dlab
