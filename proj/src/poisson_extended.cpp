// Extended-precision evaluation of the truncated Poisson formula.
//
// In double precision the truncation tail (M/q) sum_{|h|>H} psi_hat(hM/q) is
// far below rounding once M >= 10^3: rho_hat decays like exp(-sqrt(2 pi xi))
// and the first omitted frequency is about log^4(2M). Everything here runs in
// MPFR at a precision chosen by the caller so the residual is resolved.
//
// rho_hat(xi) = 2 int_0^{1/2} s'(x) cos(pi xi (1/2 - x)) dx is integrated on a
// composite Gauss-Legendre mesh: panels graded geometrically toward the flat
// endpoint x = 0 (where s' has its essential singularity) and no wider than
// 2 / xi_max in the oscillatory part. The integrand is cut at the point x0
// where s' drops below 10^-(digits + 5).

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <vector>

#include "dlab/error.hpp"
#include "dlab/smooth_cutoff.hpp"

namespace dlab::detail {

namespace {

using Real = boost::multiprecision::mpfr_float;

class PrecisionScope {
 public:
  explicit PrecisionScope(int digits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

struct GaussRule {
  std::vector<Real> nodes;    // on [-1, 1]
  std::vector<Real> weights;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  const std::vector<Real> positive = boost::math::legendre_p_zeros<Real>(n);
  for (const Real& x : positive) {
    const Real dp = boost::math::legendre_p_prime<Real>(n, x);
    const Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

Real step(const Real& x) {
  if (x <= 0) return Real(0);
  if (x >= 1) return Real(1);
  const Real g = 1 / x - 1 / (1 - x);
  return 1 / (1 + exp(g));
}

Real step_derivative(const Real& x) {
  const Real g = 1 / x - 1 / (1 - x);
  const Real y = 1 - x;
  return (1 / (x * x) + 1 / (y * y)) / (2 + 2 * cosh(g));
}

// Weighted samples W_i = w_i * 2 s'(x_i) and offsets u_i = 1/2 - x_i such that
// rho_hat(xi) ~= sum_i W_i cos(pi xi u_i) for all |xi| <= xi_max.
struct KernelMesh {
  std::vector<Real> weight;
  std::vector<Real> offset;
};

KernelMesh kernel_mesh(double xi_max, int digits, int nodes_extra) {
  const int n = static_cast<int>(std::ceil(0.6 * digits)) + 12 + nodes_extra;
  const GaussRule rule = gauss_legendre(n);

  // s'(x) ~ exp(-1/x) / x^2 near 0; solve 1/x - 2 log(1/x) = (digits + 5) log 10.
  const double target = (digits + 5) * std::log(10.0);
  double inv = target;
  for (int i = 0; i < 8; ++i) inv = target + 2.0 * std::log(inv);
  const double x0 = 1.0 / inv;

  const double osc = xi_max > 0.0 ? 2.0 / xi_max : 1.0;
  std::vector<double> cuts{x0};
  while (cuts.back() < 0.5) {
    const double x = cuts.back();
    const double w = std::min({0.5 * x, osc, 0.05});
    cuts.push_back(std::min(x + w, 0.5));
  }

  KernelMesh mesh;
  mesh.weight.reserve(cuts.size() * rule.nodes.size());
  mesh.offset.reserve(cuts.size() * rule.nodes.size());
  const Real half(0.5);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const Real a(cuts[p]);
    const Real b = (p + 2 == cuts.size()) ? half : Real(cuts[p + 1]);
    const Real mid = (a + b) / 2;
    const Real rad = (b - a) / 2;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Real x = mid + rad * rule.nodes[i];
      mesh.weight.push_back(2 * rad * rule.weights[i] * step_derivative(x));
      mesh.offset.push_back(half - x);
    }
  }
  return mesh;
}

// rho_hat(h * xi1) for h = 1..count, using e^{i h theta} = e^{i (h-1) theta} e^{i theta}.
std::vector<Real> kernel_hat_multiples(const KernelMesh& mesh, const Real& xi1, u64 count) {
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<Real> out(count, Real(0));
  for (std::size_t i = 0; i < mesh.weight.size(); ++i) {
    const Real theta = pi * xi1 * mesh.offset[i];
    const Real c1 = cos(theta);
    const Real s1 = sin(theta);
    Real c = c1;
    Real s = s1;
    for (u64 h = 0; h < count; ++h) {
      out[h] += mesh.weight[i] * c;
      const Real cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
    }
  }
  return out;
}

}  // namespace

double kernel_hat_mp(double xi, int digits, int nodes_extra) {
  PrecisionScope scope(digits + 10);
  const KernelMesh mesh = kernel_mesh(std::fabs(xi), digits, nodes_extra);
  if (xi == 0.0) {
    Real total(0);
    for (const Real& w : mesh.weight) total += w;
    return total.convert_to<double>();
  }
  return kernel_hat_multiples(mesh, Real(std::fabs(xi)), 1)[0].convert_to<double>();
}

PoissonApCheck truncated_poisson_ap_mp(u64 M, u64 q, i64 a, double H, int digits, int nodes_extra) {
  PrecisionScope scope(digits + 10);
  const Real pi = boost::math::constants::pi<Real>();

  PoissonApCheck out;
  out.H = H;
  out.threshold = poisson_threshold(M, q);
  out.digits = digits;

  const Real Mr(M);
  // lhs: plateau terms contribute exactly 1 each, ramp terms s((2m - M)/M)
  // on (M/2, M) and s((5M - 2m)/M) on (2M, 5M/2).
  const u64 m_lo = M / 2 + 1;
  const u64 m_hi = 5 * M / 2;
  const u64 first = m_lo + floor_mod(a - static_cast<i64>(m_lo % q), q);
  Real ramps(0);
  u64 plateau = 0;
  for (u64 m = first; m <= m_hi; m += q) {
    if (m >= M && m <= 2 * M) {
      ++plateau;
    } else if (m < M) {
      ramps += step(Real(2 * m - M) / Mr);
    } else {
      ramps += step(Real(5 * M - 2 * m) / Mr);
    }
  }
  const Real lhs = Real(plateau) + ramps;

  const Real scale = Mr / Real(q);
  const Real main = 3 * Mr / (2 * Real(q));

  const auto hmax = static_cast<u64>(std::floor(H));
  out.dual_terms = hmax;
  Real dual(0);
  if (hmax > 0) {
    const double xi1 = static_cast<double>(M) / static_cast<double>(q);
    const KernelMesh mesh = kernel_mesh(xi1 * static_cast<double>(hmax), digits, nodes_extra);
    const std::vector<Real> rho = kernel_hat_multiples(mesh, scale, hmax);
    const u64 two_q = 2 * q;
    const u64 four_q = 4 * q;
    const u64 three_m = (3 * (M % four_q)) % four_q;
    const u64 phase_step = floor_mod(2 * a - static_cast<i64>(3 * (M % two_q)), two_q);
    for (u64 h = 1; h <= hmax; ++h) {
      const u64 sin_num = mul_mod(h % four_q, three_m, four_q);
      if (sin_num % two_q == 0) continue;
      const u64 cos_num = mul_mod(h % two_q, phase_step, two_q);
      const Real xi = Real(h) * scale;
      const Real envelope = sin(pi * Real(sin_num) / Real(two_q)) / (pi * xi);
      const Real rotation = cos(pi * Real(cos_num) / Real(q));
      dual += 2 * rho[h - 1] * envelope * rotation;
    }
    dual *= scale;
  }

  const Real residual = lhs - main - dual;
  out.lhs = lhs.convert_to<double>();
  out.main = main.convert_to<double>();
  out.dual_sum = dual.convert_to<double>();
  out.residual = residual.convert_to<double>();
  out.noise_floor = std::pow(10.0, -digits) * (out.lhs + 1.0) * (static_cast<double>(hmax) + 1.0);
  return out;
}

}  // namespace dlab::detail
