#pragma once

#include <complex>
#include <cstdint>

#include "dlab/numeric.hpp"

namespace dlab {

/// The concrete cutoff psi: 0 outside (1/2, 5/2), 1 on [1, 2], joined by
/// C^inf ramps built from exp(-1/x). The ramps are symmetric about 3/4 and
/// 9/4, so psi = 1_[3/4, 9/4] * rho for an even bump rho of mass 1 on
/// [-1/4, 1/4], which gives
///
///   psi_hat(xi) = e(-3 xi / 2) * sin(3 pi xi / 2) / (pi xi) * rho_hat(xi).
///
/// Only rho_hat needs quadrature; it is computed by panelled Gauss-Kronrod
/// to absolute accuracy quad_tol.
class SmoothCutoff {
 public:
  /// Throws InvalidArgument unless 0 < quad_tol <= 1e-6.
  static SmoothCutoff build(double quad_tol = 1e-10);

  double quad_tol() const noexcept { return quad_tol_; }

  double operator()(double t) const noexcept { return value(t); }
  double value(double t) const noexcept;

  struct Transform {
    std::complex<double> value;
    double error_estimate = 0.0;
  };

  /// psi_hat(xi) = int psi(t) e(-xi t) dt. Throws QuadratureError when the
  /// achieved error exceeds quad_tol.
  std::complex<double> hat(double xi) const { return hat_with_error(xi).value; }
  Transform hat_with_error(double xi) const;

  /// rho_hat(xi), real and even.
  double kernel_hat(double xi, double* error_estimate = nullptr) const;

  /// psi_hat(0), computed once by quadrature at build time (exact value 3/2).
  double hat_zero() const noexcept { return hat_zero_; }

 private:
  explicit SmoothCutoff(double tol) : quad_tol_(tol) {}
  double quad_tol_;
  double hat_zero_ = 0.0;
};

/// The smooth step s on [0, 1]: s(0) = 0, s(1) = 1, s(x) + s(1 - x) = 1.
double smooth_step(double x) noexcept;
/// s'(x), a C^inf bump on [0, 1] of mass 1, symmetric about 1/2.
double smooth_step_derivative(double x) noexcept;

/// Smallest H admitted by the truncated Poisson formula: (q / M) log^4(2M).
double poisson_threshold(u64 M, u64 q);

enum class Precision {
  working,   // double, psi_hat by quadrature at quad_tol
  extended,  // MPFR, digits chosen so the truncation tail is resolved
};

struct PoissonApCheck {
  double lhs = 0.0;       // sum_{m = a (q)} psi(m / M)
  double main = 0.0;      // psi_hat(0) M / q
  double dual_sum = 0.0;  // (M/q) sum_{0<|h|<=H} e(ah/q) psi_hat(hM/q)
  double residual = 0.0;  // lhs - main - dual_sum
  double H = 0.0;
  double threshold = 0.0;
  u64 dual_terms = 0;     // number of h > 0 in the truncated sum
  int digits = 0;         // decimal digits of the working precision
  double noise_floor = 0.0;  // estimated rounding level of residual
};

/// Truncated Poisson summation in the progression m = a (mod q).
/// Throws PreconditionError when H < poisson_threshold(M, q).
PoissonApCheck truncated_poisson_ap(const SmoothCutoff& psi, u64 M, u64 q, i64 a, double H,
                                    Precision precision = Precision::extended);

struct CoprimeSumCheck {
  double lhs = 0.0;       // sum_{(m, q) = 1} psi(m / M)
  double main = 0.0;      // (phi(q) / q) psi_hat(0) M
  double residual = 0.0;
  double constant = 0.0;  // |residual| / (tau_2(q) log^4(2M))
};

CoprimeSumCheck coprime_psi_sum(const SmoothCutoff& psi, u64 M, u64 q);

namespace detail {
// Extended-precision kernel used by truncated_poisson_ap; exposed for tests.
PoissonApCheck truncated_poisson_ap_mp(u64 M, u64 q, i64 a, double H, int digits, int nodes_extra);
// rho_hat at several multiples of a base frequency, in MPFR, rounded to double.
double kernel_hat_mp(double xi, int digits, int nodes_extra);
}  // namespace detail

}  // namespace dlab
