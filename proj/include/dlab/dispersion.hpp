#pragma once

#include <vector>

#include "dlab/numeric.hpp"
#include "dlab/sequences.hpp"
#include "dlab/smooth_cutoff.hpp"

namespace dlab {

/// Scales for one dispersion evaluation. q runs over Q/2 < q < 5Q/2 with
/// (q, a) = 1 weighted by psi(q/Q); m runs over M/2 < m < 5M/2 weighted by
/// psi(m/M).
struct DispersionParams {
  u64 M = 1;
  u64 Q = 1;
  i64 a = 1;
};

struct DispersionPerQ {
  u64 q = 0;
  double weight = 0.0;  // psi(q/Q)
  double U = 0.0;
  double V = 0.0;
  double W = 0.0;
};

struct DispersionTerms {
  double U = 0.0;
  double V = 0.0;
  double W = 0.0;
  double U_MT = 0.0;
  double V_MT = 0.0;  // same value as U_MT, produced by the same expression
  double W_MT = 0.0;
  double H = 0.0;     // Q X^eps / M
  double R = 0.0;     // 2N / Q
  std::vector<DispersionPerQ> per_q;

  double expansion() const { return W - 2.0 * V + U; }
};

/// U, V, W and their main terms. The inner m-sums are bucketed by residue
/// class, so each q costs O(N + M + q). eps only enters H.
DispersionTerms compute_UVW(const CoefficientSequence& beta, const DispersionParams& params,
                            const SmoothCutoff& psi, double eps = 0.01);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_gap = 0.0;
  bool holds = false;  // abs_gap <= 1e-9 max(1, |lhs|)
};

/// sum_q psi(q/Q) sum_{(m, q) = 1} psi(m/M) T(q, m)^2 against W - 2V + U, where
/// T(q, m) = sum_{n = a m^-1 (q)} beta_n - (1/phi(q)) sum_{(n, q) = 1} beta_n.
/// The left side is summed over m directly rather than through residue buckets.
IdentityCheck dispersion_expansion_identity(const CoefficientSequence& beta,
                                            const DispersionParams& params, const SmoothCutoff& psi);

/// W_MT - 2 V_MT + U_MT against
/// psi_hat(0) M sum_q (psi(q/Q)/q) sum_{(d, q) = 1} (sum_{n = d (q)} beta_n - S_q / phi(q))^2.
IdentityCheck main_term_variance_identity(const CoefficientSequence& beta,
                                          const DispersionParams& params, const SmoothCutoff& psi);

struct CauchySchwarzCheck {
  double delta = 0.0;      // sum_{Q <= q < 2Q, (q, a) = 1} |E(q, a)|
  double delta_sq = 0.0;
  double alpha_mass = 0.0; // sum_q sum_{m ~ M, (m, q) = 1} alpha_m^2
  double expansion = 0.0;  // W - 2V + U with M = alpha.lower()
  double bound = 0.0;      // alpha_mass * expansion
  double ratio = 0.0;      // delta_sq / bound, 0 when bound = 0
};

/// Delta^2 <= (sum_q sum_m alpha_m^2) (W - 2V + U). alpha must live on
/// [M, 2M) with M = alpha.lower(). Throws PreconditionError otherwise.
CauchySchwarzCheck cauchy_schwarz_bound(const CoefficientSequence& alpha,
                                        const CoefficientSequence& beta, u64 Q, i64 a,
                                        const SmoothCutoff& psi);

struct TruncationParameters {
  double H = 0.0;  // Q X^eps / M
  double R = 0.0;  // 2N / Q with N = X / M
  u64 H_ceil = 0;
  u64 R_ceil = 0;
};

TruncationParameters truncation_parameters(double M, double Q, double X, double eps);

}  // namespace dlab
