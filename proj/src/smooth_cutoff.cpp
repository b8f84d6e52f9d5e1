#include "dlab/smooth_cutoff.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dlab/error.hpp"
#include "dlab/summation.hpp"

namespace dlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Exponent 1/x - 1/(1-x) above which the step is 0 or 1 to double precision.
constexpr double kSaturation = 700.0;

}  // namespace

double smooth_step(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double g = 1.0 / x - 1.0 / (1.0 - x);
  if (g > kSaturation) return 0.0;
  if (g < -kSaturation) return 1.0;
  return 1.0 / (1.0 + std::exp(g));
}

double smooth_step_derivative(double x) noexcept {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double g = 1.0 / x - 1.0 / (1.0 - x);
  if (std::fabs(g) > kSaturation) return 0.0;
  // s(1 - s) = 1 / (2 + 2 cosh g)
  return (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (2.0 + 2.0 * std::cosh(g));
}

SmoothCutoff SmoothCutoff::build(double quad_tol) {
  if (!(quad_tol > 0.0) || quad_tol > 1e-6)
    throw InvalidArgument("quad_tol must lie in (0, 1e-6]");
  SmoothCutoff psi(quad_tol);
  psi.hat_zero_ = psi.hat(0.0).real();
  return psi;
}

double SmoothCutoff::value(double t) const noexcept {
  if (t <= 0.5 || t >= 2.5) return 0.0;
  if (t >= 1.0 && t <= 2.0) return 1.0;
  if (t < 1.0) return smooth_step(2.0 * t - 1.0);
  return smooth_step(5.0 - 2.0 * t);
}

double SmoothCutoff::kernel_hat(double xi, double* error_estimate) const {
  // rho_hat(xi) = int_0^1 s'(x) cos(pi xi (x - 1/2)) dx
  //             = 2 int_0^{1/2} s'(x) cos(pi xi (1/2 - x)) dx.
  // Fixed Gauss-Kronrod panels, graded toward x = 0 and at most 2/|xi| wide;
  // below x = 1/60 the integrand is under 1e-20. Panel error estimates add up.
  const double w = std::fabs(xi);
  auto integrand = [w](double x) {
    return 2.0 * smooth_step_derivative(x) * std::cos(kPi * w * (0.5 - x));
  };
  const double osc = w > 0.0 ? 2.0 / w : 1.0;
  CompensatedSum value;
  double err = 0.0;
  for (double x = 1.0 / 60.0; x < 0.5;) {
    const double next = std::min(x + std::min({0.5 * x, osc, 0.05}), 0.5);
    double panel_err = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, x, next, 0, 0.0,
                                                                           &panel_err);
    err += panel_err;
    x = next;
  }
  err += 1e-20;
  if (error_estimate) *error_estimate = err;
  if (!(err <= quad_tol_)) throw QuadratureError(err, quad_tol_);
  return value.value();
}

SmoothCutoff::Transform SmoothCutoff::hat_with_error(double xi) const {
  double err = 0.0;
  const double rho = kernel_hat(xi, &err);
  // sin(3 pi xi / 2) / (pi xi), with exact argument reduction so the zeros at
  // xi in (2/3)Z are exact.
  const double envelope =
      xi == 0.0 ? 1.5 : boost::math::sin_pi(1.5 * xi) / (kPi * xi);
  const double phase = -1.5 * xi;
  const std::complex<double> rotation(boost::math::cos_pi(2.0 * std::fmod(phase, 1.0)),
                                      boost::math::sin_pi(2.0 * std::fmod(phase, 1.0)));
  return {rotation * (envelope * rho), std::fabs(envelope) * err};
}

double poisson_threshold(u64 M, u64 q) {
  if (M == 0 || q == 0) throw InvalidArgument("M and q must be >= 1");
  const double l = std::log(2.0 * static_cast<double>(M));
  return static_cast<double>(q) / static_cast<double>(M) * l * l * l * l;
}

namespace {

PoissonApCheck truncated_poisson_ap_working(const SmoothCutoff& psi, u64 M, u64 q, i64 a, double H) {
  PoissonApCheck out;
  out.H = H;
  out.threshold = poisson_threshold(M, q);
  out.digits = 15;

  // m ranges over (M/2, 5M/2) in the class a mod q.
  const u64 m_lo = M / 2 + 1;
  const u64 m_hi = 5 * M / 2;
  const u64 first = m_lo + (floor_mod(a - static_cast<i64>(m_lo % q), q));
  CompensatedSum lhs;
  for (u64 m = first; m <= m_hi; m += q)
    lhs += psi.value(static_cast<double>(m) / static_cast<double>(M));
  out.lhs = lhs.value();

  const double scale = static_cast<double>(M) / static_cast<double>(q);
  out.main = psi.hat_zero() * scale;

  const auto hmax = static_cast<u64>(std::floor(H));
  out.dual_terms = hmax;
  const u64 two_q = 2 * q;
  const u64 four_q = 4 * q;
  const u64 three_m = floor_mod(static_cast<i64>(3 * (M % four_q)), four_q);
  const u64 phase_step = floor_mod(2 * a - static_cast<i64>(3 * (M % two_q)), two_q);
  CompensatedSum dual;
  for (u64 h = 1; h <= hmax; ++h) {
    // psi_hat(-xi) = conj psi_hat(xi): the pair (h, -h) contributes
    // 2 Re(e(ah/q) psi_hat(hM/q)) = 2 rho_hat * sin(3 pi xi/2)/(pi xi) * cos(pi h(2a - 3M)/q).
    const u64 sin_num = mul_mod(h % four_q, three_m, four_q);  // sin(pi * sin_num / (2q))
    if (sin_num % two_q == 0) continue;
    const double xi = static_cast<double>(h) * scale;
    const double envelope =
        boost::math::sin_pi(static_cast<double>(sin_num) / static_cast<double>(two_q)) / (kPi * xi);
    const u64 cos_num = mul_mod(h % two_q, phase_step, two_q);  // cos(pi * cos_num / q)
    const double rotation =
        boost::math::cos_pi(static_cast<double>(cos_num) / static_cast<double>(q));
    dual += 2.0 * psi.kernel_hat(xi) * envelope * rotation;
  }
  out.dual_sum = scale * dual.value();
  out.residual = out.lhs - out.main - out.dual_sum;
  out.noise_floor = std::numeric_limits<double>::epsilon() * (out.lhs + 1.0) * 8.0 +
                    scale * 2.0 * static_cast<double>(hmax) * psi.quad_tol();
  return out;
}

}  // namespace

PoissonApCheck truncated_poisson_ap(const SmoothCutoff& psi, u64 M, u64 q, i64 a, double H,
                                    Precision precision) {
  if (M == 0) throw PreconditionError("M must be >= 1");
  if (q == 0) throw PreconditionError("q must be >= 1");
  const double threshold = poisson_threshold(M, q);
  if (!(H >= threshold))
    throw PreconditionError("H = " + std::to_string(H) + " below (q/M) log^4(2M) = " +
                            std::to_string(threshold));
  if (precision == Precision::working) return truncated_poisson_ap_working(psi, M, q, a, H);

  // The truncation tail is of size exp(-sqrt(2 pi xi_c)) with xi_c the first
  // omitted frequency; carry enough digits to see it above rounding.
  const double xi_c = (std::floor(H) + 1.0) * static_cast<double>(M) / static_cast<double>(q);
  int digits = static_cast<int>(std::ceil(std::sqrt(2.0 * kPi * xi_c) / std::log(10.0))) + 30;
  digits = std::clamp(digits, 40, 400);
  return detail::truncated_poisson_ap_mp(M, q, a, H, digits, 0);
}

CoprimeSumCheck coprime_psi_sum(const SmoothCutoff& psi, u64 M, u64 q) {
  if (M == 0 || q == 0) throw PreconditionError("M and q must be >= 1");
  CoprimeSumCheck out;
  CompensatedSum lhs;
  const u64 m_hi = 5 * M / 2;
  for (u64 m = M / 2 + 1; m <= m_hi; ++m) {
    if (std::gcd(m, q) != 1) continue;
    lhs += psi.value(static_cast<double>(m) / static_cast<double>(M));
  }
  out.lhs = lhs.value();
  out.main = static_cast<double>(euler_phi_direct(q)) / static_cast<double>(q) * psi.hat_zero() *
             static_cast<double>(M);
  out.residual = out.lhs - out.main;
  const double l = std::log(2.0 * static_cast<double>(M));
  out.constant =
      std::fabs(out.residual) / (static_cast<double>(divisor_count_direct(q)) * l * l * l * l);
  return out;
}

}  // namespace dlab
