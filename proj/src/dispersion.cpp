#include "dlab/dispersion.hpp"

#include <cmath>
#include <numeric>

#include "dlab/arith.hpp"
#include "dlab/discrepancy.hpp"
#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/summation.hpp"

namespace dlab {

namespace {

// Data shared by every q: the moduli with their weights and psi(m/M) on
// M/2 < m <= 5M/2.
struct Frame {
  std::vector<u64> moduli;
  std::vector<double> weights;
  u64 m_lo = 0;
  std::vector<double> psi_m;
};

Frame make_frame(const DispersionParams& p, const SmoothCutoff& psi) {
  if (p.M == 0 || p.Q == 0) throw PreconditionError("M and Q must be >= 1");
  if (p.a == 0) throw PreconditionError("shift a must be nonzero");
  Frame f;
  for (u64 q = p.Q / 2 + 1; q <= 5 * p.Q / 2; ++q) {
    if (gcd_i(p.a, q) != 1) continue;
    const double w = psi(static_cast<double>(q) / static_cast<double>(p.Q));
    if (w == 0.0) continue;
    f.moduli.push_back(q);
    f.weights.push_back(w);
  }
  f.m_lo = p.M / 2 + 1;
  for (u64 m = f.m_lo; m <= 5 * p.M / 2; ++m)
    f.psi_m.push_back(psi(static_cast<double>(m) / static_cast<double>(p.M)));
  return f;
}

// Per-modulus residue data.
struct Residues {
  u64 q = 0;
  u64 phi = 0;
  std::vector<double> B;        // sum_{n = d (q)} beta_n
  std::vector<double> Psi;      // sum_{m = c (q)} psi(m/M)
  std::vector<u64> partner;     // a * c^-1 mod q for c coprime to q, else q
  double S = 0.0;               // sum over coprime d of B[d]
};

Residues residues(const CoefficientSequence& beta, const Frame& f, u64 q, i64 a) {
  Residues r;
  r.q = q;
  std::vector<CompensatedSum> b(q);
  u64 idx = beta.lower() % q;
  for (double c : beta.values()) {
    b[idx] += c;
    if (++idx == q) idx = 0;
  }
  std::vector<CompensatedSum> ps(q);
  idx = f.m_lo % q;
  for (double w : f.psi_m) {
    ps[idx] += w;
    if (++idx == q) idx = 0;
  }
  r.B.resize(q);
  r.Psi.resize(q);
  r.partner.assign(q, q);
  const u64 a_mod = floor_mod(a, q);
  CompensatedSum s;
  for (u64 d = 0; d < q; ++d) {
    r.B[d] = b[d].value();
    r.Psi[d] = ps[d].value();
    if (std::gcd(d, q) != 1) continue;
    ++r.phi;
    s += r.B[d];
    r.partner[d] = q == 1 ? 0 : mul_mod(a_mod, mod_inverse(static_cast<i64>(d), q), q);
  }
  r.S = s.value();
  return r;
}

}  // namespace

DispersionTerms compute_UVW(const CoefficientSequence& beta, const DispersionParams& params,
                            const SmoothCutoff& psi, double eps) {
  const Frame f = make_frame(params, psi);
  const double hat0 = psi.hat_zero();
  const double M = static_cast<double>(params.M);

  struct PerQ {
    DispersionPerQ terms;
    double U_MT = 0.0;
    double W_MT = 0.0;
  };
  const std::vector<PerQ> rows = parallel_map(f.moduli.size(), [&](std::size_t i) {
    const u64 q = f.moduli[i];
    const double w = f.weights[i];
    const Residues r = residues(beta, f, q, params.a);
    const double phi = static_cast<double>(r.phi);
    CompensatedSum P;
    CompensatedSum cross;
    CompensatedSum square;
    CompensatedSum b_sq;
    for (u64 c = 0; c < q; ++c) {
      if (r.partner[c] == q) continue;
      const double b = r.B[r.partner[c]];
      P += r.Psi[c];
      cross += r.Psi[c] * b;
      square += r.Psi[c] * b * b;
      b_sq += r.B[c] * r.B[c];
    }
    PerQ row;
    row.terms.q = q;
    row.terms.weight = w;
    row.terms.U = w * r.S * r.S * P.value() / (phi * phi);
    row.terms.V = w / phi * r.S * cross.value();
    row.terms.W = w * square.value();
    row.U_MT = hat0 * M * w * r.S * r.S / (static_cast<double>(q) * phi);
    row.W_MT = hat0 * M * w / static_cast<double>(q) * b_sq.value();
    return row;
  });

  DispersionTerms out;
  CompensatedSum U, V, W, U_MT, W_MT;
  out.per_q.reserve(rows.size());
  for (const PerQ& row : rows) {
    U += row.terms.U;
    V += row.terms.V;
    W += row.terms.W;
    U_MT += row.U_MT;
    W_MT += row.W_MT;
    out.per_q.push_back(row.terms);
  }
  out.U = U.value();
  out.V = V.value();
  out.W = W.value();
  out.U_MT = U_MT.value();
  out.V_MT = out.U_MT;
  out.W_MT = W_MT.value();
  const TruncationParameters t = truncation_parameters(
      M, static_cast<double>(params.Q), M * static_cast<double>(beta.lower()), eps);
  out.H = t.H;
  out.R = t.R;
  return out;
}

IdentityCheck dispersion_expansion_identity(const CoefficientSequence& beta,
                                            const DispersionParams& params, const SmoothCutoff& psi) {
  const Frame f = make_frame(params, psi);
  const std::vector<double> per_q = parallel_map(f.moduli.size(), [&](std::size_t i) {
    const u64 q = f.moduli[i];
    const Residues r = residues(beta, f, q, params.a);
    const double mean = r.S / static_cast<double>(r.phi);
    CompensatedSum sum;
    for (std::size_t j = 0; j < f.psi_m.size(); ++j) {
      const u64 m = f.m_lo + j;
      if (std::gcd(m, q) != 1) continue;
      const double t = r.B[r.partner[m % q]] - mean;
      sum += f.psi_m[j] * t * t;
    }
    return f.weights[i] * sum.value();
  });
  CompensatedSum lhs;
  for (double v : per_q) lhs += v;

  IdentityCheck out;
  out.lhs = lhs.value();
  out.rhs = compute_UVW(beta, params, psi).expansion();
  out.abs_gap = std::fabs(out.lhs - out.rhs);
  out.holds = out.abs_gap <= 1e-9 * std::max(1.0, std::fabs(out.lhs));
  return out;
}

IdentityCheck main_term_variance_identity(const CoefficientSequence& beta,
                                          const DispersionParams& params, const SmoothCutoff& psi) {
  const Frame f = make_frame(params, psi);
  const std::vector<double> per_q = parallel_map(f.moduli.size(), [&](std::size_t i) {
    const u64 q = f.moduli[i];
    const Residues r = residues(beta, f, q, params.a);
    const double mean = r.S / static_cast<double>(r.phi);
    CompensatedSum sum;
    for (u64 d = 0; d < q; ++d) {
      if (r.partner[d] == q) continue;
      const double t = r.B[d] - mean;
      sum += t * t;
    }
    return f.weights[i] / static_cast<double>(q) * sum.value();
  });
  CompensatedSum total;
  for (double v : per_q) total += v;

  const DispersionTerms terms = compute_UVW(beta, params, psi);
  IdentityCheck out;
  out.lhs = terms.W_MT - 2.0 * terms.V_MT + terms.U_MT;
  out.rhs = psi.hat_zero() * static_cast<double>(params.M) * total.value();
  out.abs_gap = std::fabs(out.lhs - out.rhs);
  out.holds = out.abs_gap <= 1e-9 * std::max(1.0, std::fabs(out.lhs));
  return out;
}

CauchySchwarzCheck cauchy_schwarz_bound(const CoefficientSequence& alpha,
                                        const CoefficientSequence& beta, u64 Q, i64 a,
                                        const SmoothCutoff& psi) {
  const u64 M = alpha.lower();
  if (alpha.upper() > 2 * M)
    throw PreconditionError("alpha must be supported on [M, 2M) with M = alpha.lower()");
  const DiscrepancyReport report = mean_discrepancy(alpha, beta, {a, Q});

  std::vector<u64> moduli;
  for (const auto& e : report.per_q) moduli.push_back(e.q);
  const std::vector<double> mass = parallel_map(moduli.size(), [&](std::size_t i) {
    CompensatedSum s;
    for (u64 m = alpha.lower(); m < alpha.upper(); ++m)
      if (std::gcd(m, moduli[i]) == 1) s += alpha[m] * alpha[m];
    return s.value();
  });
  CompensatedSum alpha_mass;
  for (double v : mass) alpha_mass += v;

  CauchySchwarzCheck out;
  out.delta = report.delta;
  out.delta_sq = report.delta * report.delta;
  out.alpha_mass = alpha_mass.value();
  out.expansion = compute_UVW(beta, {M, Q, a}, psi).expansion();
  out.bound = out.alpha_mass * out.expansion;
  out.ratio = out.bound > 0.0 ? out.delta_sq / out.bound : 0.0;
  return out;
}

TruncationParameters truncation_parameters(double M, double Q, double X, double eps) {
  if (!(M > 0.0) || !(Q > 0.0) || !(X > 0.0) || !(eps >= 0.0))
    throw InvalidArgument("truncation parameters need positive M, Q, X and eps >= 0");
  TruncationParameters t;
  t.H = Q * std::pow(X, eps) / M;
  t.R = 2.0 * (X / M) / Q;
  t.H_ceil = static_cast<u64>(std::ceil(t.H));
  t.R_ceil = static_cast<u64>(std::ceil(t.R));
  return t;
}

}  // namespace dlab
