#include "dlab/dlab.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "dlab/arith.hpp"
#include "dlab/discrepancy.hpp"
#include "dlab/dispersion.hpp"
#include "dlab/error.hpp"
#include "dlab/exp_sums.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rng.hpp"
#include "dlab/sequences.hpp"
#include "dlab/smooth_cutoff.hpp"
#include "dlab/titchmarsh.hpp"

struct dlab_tables {
  dlab::ArithTables impl;
};
struct dlab_sequence {
  dlab::CoefficientSequence impl;
};
struct dlab_psi {
  dlab::SmoothCutoff impl;
};
struct dlab_discrepancy_report {
  dlab::DiscrepancyReport impl;
};
struct dlab_dispersion_report {
  dlab::DispersionTerms impl;
};
struct dlab_grid {
  dlab::DissectionGrid impl;
};

namespace {

thread_local std::string g_last_error;
thread_local std::vector<std::uint64_t> g_offending;
thread_local std::string g_rng_name;

dlab_status fail(dlab_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
dlab_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return DLAB_OK;
  } catch (const dlab::DivisorBoundViolation& e) {
    g_offending = e.offending();
    return fail(DLAB_ERR_DIVISOR_BOUND, e.what());
  } catch (const dlab::Error& e) {
    return fail(static_cast<dlab_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DLAB_ERR_INTERNAL, "unknown error");
  }
}

#define DLAB_REQUIRE(cond)                                              \
  do {                                                                  \
    if (!(cond)) return fail(DLAB_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

void copy_fraction(const dlab::UnitFraction& f, char* out) {
  const std::string s = f.to_string();
  if (s.size() >= DLAB_FRACTION_CHARS)
    throw dlab::Error(dlab::Status::internal, "fraction does not fit output buffer");
  std::memcpy(out, s.c_str(), s.size() + 1);
}

dlab::FactorizationInput to_cpp(const dlab_factorization_input& in) {
  dlab::FactorizationInput f;
  f.a = in.a;
  f.h = in.h;
  f.r = in.r;
  f.d = in.d;
  f.d1 = in.d1;
  f.nu1p = in.nu1p;
  f.nu2 = in.nu2;
  return f;
}

dlab_trilinear to_c(const dlab::TrilinearResult& r) {
  dlab_trilinear t{};
  t.re = r.value.real();
  t.im = r.value.imag();
  t.bc_bound = r.bc_bound;
  t.ratio = r.ratio;
  t.bc_bound_normalized = r.bc_bound_normalized;
  t.ratio_normalized = r.ratio_normalized;
  t.trivial_bound = r.trivial_bound;
  t.eps = r.eps;
  t.skipped_pairs = r.skipped_pairs;
  return t;
}

dlab_identity to_c(const dlab::IdentityCheck& c) {
  return dlab_identity{c.lhs, c.rhs, c.abs_gap, c.holds ? 1 : 0};
}

}  // namespace

extern "C" {

const char* dlab_version(void) { return "1.0.0"; }

const char* dlab_last_error_message(void) { return g_last_error.c_str(); }

const char* dlab_status_name(dlab_status status) {
  switch (status) {
    case DLAB_OK: return "ok";
    case DLAB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DLAB_ERR_NOT_INVERTIBLE: return "not_invertible";
    case DLAB_ERR_PRECONDITION: return "precondition";
    case DLAB_ERR_DIVISOR_BOUND: return "divisor_bound";
    case DLAB_ERR_PARSE: return "parse";
    case DLAB_ERR_TABLE_LIMIT: return "table_limit";
    case DLAB_ERR_QUADRATURE: return "quadrature";
    case DLAB_ERR_IO: return "io";
    case DLAB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void dlab_set_worker_count(unsigned workers) { dlab::set_worker_count(workers); }
unsigned dlab_worker_count(void) { return dlab::worker_count(); }

const char* dlab_rng_name(void) {
  if (g_rng_name.empty()) g_rng_name = std::string(dlab::SeededRng::kName);
  return g_rng_name.c_str();
}

// ---- arithmetic

dlab_status dlab_tables_build(uint64_t limit, int k_max, dlab_tables** out) {
  DLAB_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new dlab_tables{dlab::ArithTables::build(limit, k_max)}; });
}

void dlab_tables_free(dlab_tables* tables) { delete tables; }

uint64_t dlab_tables_limit(const dlab_tables* tables) { return tables ? tables->impl.limit() : 0; }

dlab_status dlab_tables_tau(const dlab_tables* tables, int k, uint64_t n, uint64_t* out) {
  DLAB_REQUIRE(tables && out);
  return guard([&] { *out = tables->impl.tau(k, n); });
}

dlab_status dlab_tables_phi(const dlab_tables* tables, uint64_t n, uint64_t* out) {
  DLAB_REQUIRE(tables && out);
  return guard([&] { *out = tables->impl.phi(n); });
}

dlab_status dlab_tables_mu(const dlab_tables* tables, uint64_t n, int* out) {
  DLAB_REQUIRE(tables && out);
  return guard([&] { *out = tables->impl.mu(n); });
}

dlab_status dlab_tables_rad(const dlab_tables* tables, uint64_t n, uint64_t* out) {
  DLAB_REQUIRE(tables && out);
  return guard([&] { *out = tables->impl.rad(n); });
}

dlab_status dlab_mod_inverse(int64_t n, uint64_t q, uint64_t* out, uint64_t* gcd_out) {
  DLAB_REQUIRE(out);
  if (q == 0) return fail(DLAB_ERR_INVALID_ARGUMENT, "modulus must be >= 1");
  try {
    *out = dlab::mod_inverse(static_cast<dlab::i64>(n), q);
    if (gcd_out) *gcd_out = 1;
    g_last_error.clear();
    return DLAB_OK;
  } catch (const dlab::NotInvertible& e) {
    if (gcd_out) *gcd_out = e.gcd();
    return fail(DLAB_ERR_NOT_INVERTIBLE, e.what());
  } catch (...) {
    return guard([] { throw; });
  }
}

dlab_status dlab_coprime_split_compute(uint64_t n1, uint64_t n2, dlab_coprime_split* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    if (n1 == 0 || n2 == 0) throw dlab::InvalidArgument("coprime split needs n1, n2 >= 1");
    const auto s = dlab::coprime_split(n1, n2);
    *out = dlab_coprime_split{s.d, s.nu1, s.nu2, s.d1, s.nu1p};
  });
}

dlab_status dlab_n_over_phi_expansion(uint64_t n, uint64_t cutoff, double* out) {
  DLAB_REQUIRE(out);
  return guard([&] { *out = dlab::n_over_phi_expansion(n, cutoff); });
}

// ---- sequences

dlab_status dlab_sequence_make(const dlab_tables* tables, const char* kind, uint64_t lower,
                               uint64_t seed, dlab_sequence** out) {
  DLAB_REQUIRE(tables && kind && out);
  *out = nullptr;
  return guard([&] {
    *out = new dlab_sequence{
        dlab::make_sequence(dlab::parse_sequence_kind(kind), lower, tables->impl, seed)};
  });
}

dlab_status dlab_sequence_make_range(const dlab_tables* tables, const char* kind, uint64_t lower,
                                     uint64_t upper, uint64_t seed, dlab_sequence** out) {
  DLAB_REQUIRE(tables && kind && out);
  *out = nullptr;
  return guard([&] {
    *out = new dlab_sequence{dlab::make_sequence_range(dlab::parse_sequence_kind(kind), lower,
                                                       upper, tables->impl, seed)};
  });
}

dlab_status dlab_sequence_from_values(const dlab_tables* tables, uint64_t lower,
                                      const double* values, size_t count, int order_k,
                                      dlab_sequence** out) {
  DLAB_REQUIRE(tables && out && (values || count == 0));
  *out = nullptr;
  return guard([&] {
    std::vector<double> v(values, values + count);
    *out = new dlab_sequence{dlab::CoefficientSequence(lower, std::move(v), order_k, tables->impl)};
  });
}

dlab_status dlab_sequence_load(const dlab_tables* tables, const char* path, int order_k,
                               dlab_sequence** out) {
  DLAB_REQUIRE(tables && path && out);
  *out = nullptr;
  return guard(
      [&] { *out = new dlab_sequence{dlab::load_sequence(path, order_k, tables->impl)}; });
}

dlab_status dlab_sequence_without_divisors_of(const dlab_tables* tables, const dlab_sequence* seq,
                                              int64_t a, dlab_sequence** out) {
  DLAB_REQUIRE(tables && seq && out);
  *out = nullptr;
  return guard(
      [&] { *out = new dlab_sequence{seq->impl.without_divisors_of(a, tables->impl)}; });
}

void dlab_sequence_free(dlab_sequence* seq) { delete seq; }
uint64_t dlab_sequence_lower(const dlab_sequence* seq) { return seq ? seq->impl.lower() : 0; }
uint64_t dlab_sequence_upper(const dlab_sequence* seq) { return seq ? seq->impl.upper() : 0; }
int dlab_sequence_order(const dlab_sequence* seq) { return seq ? seq->impl.order_k() : 0; }
double dlab_sequence_value(const dlab_sequence* seq, uint64_t n) { return seq ? seq->impl[n] : 0.0; }

size_t dlab_last_offending_count(void) { return g_offending.size(); }
uint64_t dlab_last_offending(size_t i) { return i < g_offending.size() ? g_offending[i] : 0; }

dlab_status dlab_sw_defect(const dlab_sequence* seq, uint64_t q, int64_t a, uint64_t r,
                           double* out) {
  DLAB_REQUIRE(seq && out);
  return guard([&] { *out = dlab::sw_defect(seq->impl, q, a, r); });
}

dlab_status dlab_bdh_variance(const dlab_sequence* seq, uint64_t Q_max, double* out) {
  DLAB_REQUIRE(seq && out);
  return guard([&] { *out = dlab::bdh_variance(seq->impl, Q_max); });
}

dlab_status dlab_tau_ap_ratio(const dlab_tables* tables, uint64_t x, uint64_t y, uint64_t q,
                              int64_t a, int k, dlab_tau_ap* out) {
  DLAB_REQUIRE(tables && out);
  return guard([&] {
    const auto r = dlab::tau_ap_ratio(x, y, q, a, k, tables->impl);
    *out = dlab_tau_ap{r.sum, r.bound_ratio, r.terms};
  });
}

// ---- smooth cutoff

dlab_status dlab_psi_build(double quad_tol, dlab_psi** out) {
  DLAB_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new dlab_psi{dlab::SmoothCutoff::build(quad_tol)}; });
}

void dlab_psi_free(dlab_psi* psi) { delete psi; }
double dlab_psi_value(const dlab_psi* psi, double t) { return psi ? psi->impl.value(t) : 0.0; }
double dlab_psi_hat_zero(const dlab_psi* psi) { return psi ? psi->impl.hat_zero() : 0.0; }

dlab_status dlab_psi_hat(const dlab_psi* psi, double xi, double* re, double* im,
                         double* error_estimate) {
  DLAB_REQUIRE(psi && re && im);
  return guard([&] {
    const auto t = psi->impl.hat_with_error(xi);
    *re = t.value.real();
    *im = t.value.imag();
    if (error_estimate) *error_estimate = t.error_estimate;
  });
}

dlab_status dlab_poisson_threshold(uint64_t M, uint64_t q, double* out) {
  DLAB_REQUIRE(out);
  return guard([&] { *out = dlab::poisson_threshold(M, q); });
}

dlab_status dlab_truncated_poisson_ap(const dlab_psi* psi, uint64_t M, uint64_t q, int64_t a,
                                      double H, dlab_precision precision,
                                      dlab_poisson_check* out) {
  DLAB_REQUIRE(psi && out);
  return guard([&] {
    const auto p = precision == DLAB_PRECISION_WORKING ? dlab::Precision::working
                                                       : dlab::Precision::extended;
    const auto r = dlab::truncated_poisson_ap(psi->impl, M, q, a, H, p);
    *out = dlab_poisson_check{r.lhs,       r.main,       r.dual_sum, r.residual,   r.H,
                              r.threshold, r.dual_terms, r.digits,   r.noise_floor};
  });
}

dlab_status dlab_coprime_psi_sum(const dlab_psi* psi, uint64_t M, uint64_t q,
                                 dlab_coprime_sum* out) {
  DLAB_REQUIRE(psi && out);
  return guard([&] {
    const auto r = dlab::coprime_psi_sum(psi->impl, M, q);
    *out = dlab_coprime_sum{r.lhs, r.main, r.residual, r.constant};
  });
}

// ---- discrepancy

dlab_status dlab_discrepancy_E(const dlab_sequence* alpha, const dlab_sequence* beta, uint64_t q,
                               int64_t a, double* out) {
  DLAB_REQUIRE(alpha && beta && out);
  return guard([&] { *out = dlab::discrepancy_E(alpha->impl, beta->impl, q, a); });
}

dlab_status dlab_mean_discrepancy(const dlab_sequence* alpha, const dlab_sequence* beta,
                                  uint64_t Q, int64_t a, dlab_discrepancy_report** out) {
  DLAB_REQUIRE(alpha && beta && out);
  *out = nullptr;
  return guard([&] {
    dlab::DiscrepancyParams p;
    p.a = a;
    p.Q = Q;
    *out = new dlab_discrepancy_report{dlab::mean_discrepancy(alpha->impl, beta->impl, p)};
  });
}

void dlab_discrepancy_report_free(dlab_discrepancy_report* report) { delete report; }

size_t dlab_discrepancy_report_count(const dlab_discrepancy_report* report) {
  return report ? report->impl.per_q.size() : 0;
}

dlab_status dlab_discrepancy_report_entry(const dlab_discrepancy_report* report, size_t i,
                                          uint64_t* q, double* E) {
  DLAB_REQUIRE(report && q && E);
  if (i >= report->impl.per_q.size()) return fail(DLAB_ERR_INVALID_ARGUMENT, "index out of range");
  *q = report->impl.per_q[i].q;
  *E = report->impl.per_q[i].E;
  return DLAB_OK;
}

double dlab_discrepancy_report_delta(const dlab_discrepancy_report* report) {
  return report ? report->impl.delta : 0.0;
}
double dlab_discrepancy_report_X(const dlab_discrepancy_report* report) {
  return report ? report->impl.X : 0.0;
}
double dlab_discrepancy_report_normalized(const dlab_discrepancy_report* report) {
  return report ? report->impl.normalized : 0.0;
}

dlab_status dlab_admissible_Q_window(double M, double N, double eps, dlab_q_window* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto w = dlab::admissible_Q_window(M, N, eps);
    *out = dlab_q_window{w.empty ? 1 : 0,  w.lo,         w.hi, w.exponent_lo,
                         w.exponent_hi,    w.n_exponent, w.n_below_17_33 ? 1 : 0};
  });
}

// ---- dispersion

dlab_status dlab_compute_UVW(const dlab_sequence* beta, const dlab_psi* psi, uint64_t M,
                             uint64_t Q, int64_t a, double eps, dlab_dispersion_report** out) {
  DLAB_REQUIRE(beta && psi && out);
  *out = nullptr;
  return guard([&] {
    *out = new dlab_dispersion_report{
        dlab::compute_UVW(beta->impl, dlab::DispersionParams{M, Q, a}, psi->impl, eps)};
  });
}

void dlab_dispersion_report_free(dlab_dispersion_report* report) { delete report; }

void dlab_dispersion_report_terms(const dlab_dispersion_report* report,
                                  dlab_dispersion_terms* out) {
  if (!report || !out) return;
  const auto& t = report->impl;
  *out = dlab_dispersion_terms{t.U, t.V, t.W, t.U_MT, t.V_MT, t.W_MT, t.H, t.R};
}

size_t dlab_dispersion_report_count(const dlab_dispersion_report* report) {
  return report ? report->impl.per_q.size() : 0;
}

dlab_status dlab_dispersion_report_entry(const dlab_dispersion_report* report, size_t i,
                                         uint64_t* q, double* weight, double* U, double* V,
                                         double* W) {
  DLAB_REQUIRE(report && q && weight && U && V && W);
  if (i >= report->impl.per_q.size()) return fail(DLAB_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& e = report->impl.per_q[i];
  *q = e.q;
  *weight = e.weight;
  *U = e.U;
  *V = e.V;
  *W = e.W;
  return DLAB_OK;
}

dlab_status dlab_dispersion_expansion_identity(const dlab_sequence* beta, const dlab_psi* psi,
                                               uint64_t M, uint64_t Q, int64_t a,
                                               dlab_identity* out) {
  DLAB_REQUIRE(beta && psi && out);
  return guard([&] {
    *out = to_c(dlab::dispersion_expansion_identity(beta->impl, dlab::DispersionParams{M, Q, a},
                                                    psi->impl));
  });
}

dlab_status dlab_main_term_variance_identity(const dlab_sequence* beta, const dlab_psi* psi,
                                             uint64_t M, uint64_t Q, int64_t a,
                                             dlab_identity* out) {
  DLAB_REQUIRE(beta && psi && out);
  return guard([&] {
    *out = to_c(dlab::main_term_variance_identity(beta->impl, dlab::DispersionParams{M, Q, a},
                                                  psi->impl));
  });
}

dlab_status dlab_cauchy_schwarz_bound(const dlab_sequence* alpha, const dlab_sequence* beta,
                                      const dlab_psi* psi, uint64_t Q, int64_t a,
                                      dlab_cs_check* out) {
  DLAB_REQUIRE(alpha && beta && psi && out);
  return guard([&] {
    const auto c = dlab::cauchy_schwarz_bound(alpha->impl, beta->impl, Q, a, psi->impl);
    *out = dlab_cs_check{c.delta, c.delta_sq, c.alpha_mass, c.expansion, c.bound, c.ratio};
  });
}

dlab_status dlab_truncation_parameters(double M, double Q, double X, double eps,
                                       dlab_truncation* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto t = dlab::truncation_parameters(M, Q, X, eps);
    *out = dlab_truncation{t.H, t.R, t.H_ceil, t.R_ceil};
  });
}

// ---- exponential sums

dlab_status dlab_kloosterman(int64_t a, int64_t b, uint64_t c, double* re, double* im) {
  DLAB_REQUIRE(re && im);
  return guard([&] {
    const auto s = dlab::kloosterman(a, b, c);
    *re = s.real();
    *im = s.imag();
  });
}

dlab_status dlab_weil_ratio(int64_t a, int64_t b, uint64_t c, double* out) {
  DLAB_REQUIRE(out);
  return guard([&] { *out = dlab::weil_ratio(a, b, c); });
}

dlab_status dlab_weil_sweep_run(uint64_t c_max, dlab_weil_sweep* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto w = dlab::weil_sweep(c_max);
    *out = dlab_weil_sweep{w.c_max,   w.checked, w.violations, w.max_ratio,
                           w.worst_a, w.worst_b, w.worst_c};
  });
}

dlab_status dlab_weil_sweep_profile(uint64_t c_max, dlab_weil_sweep* out, double* ratios) {
  DLAB_REQUIRE(out && (ratios || c_max == 0));
  return guard([&] {
    const auto w = dlab::weil_sweep(c_max);
    *out = dlab_weil_sweep{w.c_max,   w.checked, w.violations, w.max_ratio,
                           w.worst_a, w.worst_b, w.worst_c};
    std::copy(w.max_ratio_by_c.begin(), w.max_ratio_by_c.end(), ratios);
  });
}

dlab_status dlab_short_kloosterman_weighted(uint64_t lo, uint64_t hi, int64_t ell, uint64_t a,
                                            uint64_t b, dlab_short_kloosterman* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto s = dlab::short_kloosterman_weighted(lo, hi, ell, a, b);
    *out = dlab_short_kloosterman{s.value.real(), s.value.imag(), s.bound_ratio, s.eps0, s.terms};
  });
}

dlab_status dlab_short_kloosterman_sweep_run(uint64_t trials, uint64_t a_max, uint64_t b_max,
                                             uint64_t seed, dlab_short_kloosterman_sweep* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto s = dlab::short_kloosterman_sweep(trials, a_max, b_max, seed);
    *out = dlab_short_kloosterman_sweep{s.trials, s.max_ratio, s.median_ratio};
  });
}

dlab_status dlab_bezout_reciprocity(int64_t a, uint64_t m, uint64_t n, dlab_bezout* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto b = dlab::bezout_reciprocity(a, m, n);
    dlab_bezout r{};
    copy_fraction(b.lhs, r.lhs);
    copy_fraction(b.rhs1, r.rhs1);
    copy_fraction(b.rhs2, r.rhs2);
    r.exact_match = b.exact_match ? 1 : 0;
    *out = r;
  });
}

dlab_status dlab_bezout_sweep(uint64_t trials, uint64_t bound, uint64_t seed,
                              dlab_trial_sweep* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto s = dlab::bezout_sweep(trials, bound, seed);
    *out = dlab_trial_sweep{s.trials, s.mismatches, 0, 0};
  });
}

dlab_status dlab_kloosterman_fraction_factorization(const dlab_factorization_input* in,
                                                    dlab_factorization* out) {
  DLAB_REQUIRE(in && out);
  return guard([&] {
    const auto f = dlab::kloosterman_fraction_factorization(to_cpp(*in));
    dlab_factorization r{};
    r.q = f.q;
    copy_fraction(f.original, r.original);
    copy_fraction(f.pieces.at(0), r.xi);
    copy_fraction(f.pieces.at(1), r.middle);
    copy_fraction(f.pieces.at(2), r.tail);
    r.xi_modulus = f.xi_modulus;
    r.xi_residue = f.xi_residue;
    r.exact_match = f.exact_match ? 1 : 0;
    *out = r;
  });
}

dlab_status dlab_xi_from_residues(const dlab_factorization_input* in, uint64_t* out) {
  DLAB_REQUIRE(in && out);
  return guard([&] { *out = dlab::xi_from_residues(to_cpp(*in)); });
}

dlab_status dlab_factorization_sweep(uint64_t trials, uint64_t seed, dlab_trial_sweep* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto s = dlab::factorization_sweep(trials, seed);
    *out = dlab_trial_sweep{s.trials, s.mismatches, s.xi_pairs, s.xi_pair_mismatches};
  });
}

dlab_status dlab_trilinear_form(int64_t theta, uint64_t A, uint64_t M, uint64_t N,
                                const double* alpha, size_t alpha_len, const double* beta,
                                size_t beta_len, const double* nu, size_t nu_len,
                                dlab_trilinear* out) {
  DLAB_REQUIRE(out && (alpha || alpha_len == 0) && (beta || beta_len == 0) && (nu || nu_len == 0));
  return guard([&] {
    dlab::TrilinearInstance inst;
    inst.theta = theta;
    inst.A = A;
    inst.M = M;
    inst.N = N;
    inst.alpha.assign(alpha, alpha + alpha_len);
    inst.beta.assign(beta, beta + beta_len);
    inst.nu.assign(nu, nu + nu_len);
    *out = to_c(dlab::trilinear_form(inst));
  });
}

dlab_status dlab_trilinear_random_sign(int64_t theta, uint64_t A, uint64_t M, uint64_t N,
                                       uint64_t seed, dlab_trilinear* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    *out = to_c(dlab::trilinear_form(dlab::random_sign_instance(A, M, N, theta, seed)));
  });
}

// ---- Titchmarsh

dlab_status dlab_corollary_lhs(const dlab_sequence* alpha, const dlab_sequence* beta,
                               uint64_t sieve_limit, double* out) {
  DLAB_REQUIRE(alpha && beta && out);
  return guard([&] { *out = dlab::corollary_lhs(alpha->impl, beta->impl, sieve_limit); });
}

dlab_status dlab_corollary_rhs(const dlab_sequence* alpha, const dlab_sequence* beta,
                               uint64_t extra_q, double* out) {
  DLAB_REQUIRE(alpha && beta && out);
  return guard([&] { *out = dlab::corollary_rhs(alpha->impl, beta->impl, extra_q); });
}

dlab_status dlab_hyperbola_split(const dlab_sequence* alpha, const dlab_sequence* beta,
                                 dlab_hyperbola* out) {
  DLAB_REQUIRE(alpha && beta && out);
  return guard([&] {
    const auto h = dlab::hyperbola_split(alpha->impl, beta->impl);
    *out = dlab_hyperbola{h.S0, h.S1, h.square_mass, h.reassembled, h.sqrt_X};
  });
}

dlab_status dlab_corollary_deviation(const dlab_sequence* alpha, const dlab_sequence* beta,
                                     uint64_t sieve_limit, dlab_deviation* out) {
  DLAB_REQUIRE(alpha && beta && out);
  return guard([&] {
    const auto d = dlab::corollary_deviation(alpha->impl, beta->impl, sieve_limit);
    *out = dlab_deviation{d.lhs, d.rhs, d.abs_dev, d.rel_dev};
  });
}

dlab_status dlab_grid_build(uint64_t M, uint64_t N, double B, dlab_grid** out) {
  DLAB_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new dlab_grid{dlab::DissectionGrid::build(M, N, B)}; });
}

void dlab_grid_free(dlab_grid* grid) { delete grid; }

void dlab_grid_stats_get(const dlab_grid* grid, dlab_grid_stats* out) {
  if (!grid || !out) return;
  const auto& g = grid->impl;
  out->B = g.B();
  out->log_2X = g.log_2X();
  out->delta = g.delta();
  out->X = g.X();
  out->L0 = g.L0();
  out->cells = g.cell_count();
  out->e0_cells = g.count_e0();
  out->delta_pow_L0 = std::pow(g.delta(), static_cast<double>(g.L0()));
}

dlab_status dlab_dissect_s1(const dlab_sequence* alpha, const dlab_sequence* beta,
                            const dlab_grid* grid, dlab_dissection* out) {
  DLAB_REQUIRE(alpha && beta && grid && out);
  return guard([&] {
    const auto s = dlab::dissect_s1(alpha->impl, beta->impl, grid->impl);
    *out = dlab_dissection{s.s1_e0, s.s1_free, s.triples, s.e0_triples,
                           s.dropped_condition_violations};
  });
}

dlab_status dlab_corollary_shape(double X, double delta, dlab_shape* out) {
  DLAB_REQUIRE(out);
  return guard([&] {
    const auto s = dlab::corollary_shape(X, delta);
    *out = dlab_shape{s.M, s.N};
  });
}

}  // extern "C"
