// dlab: command-line front end over the C interface.
//
// Every command prints one JSON object on stdout and may write a CSV file
// (--csv) and a run manifest (--manifest). Exit codes: 0 success, 1 usage or
// runtime error, 2 precondition failure, 3 tolerance failure.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_config.hpp"
#include "dlab/dlab.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using u64 = std::uint64_t;
using i64 = std::int64_t;

constexpr int kExitError = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitTolerance = 3;

struct Failure {
  dlab_status status;
  std::string message;
};

void check(dlab_status s) {
  if (s != DLAB_OK) throw Failure{s, dlab_last_error_message()};
}

[[noreturn]] void fail(dlab_status s, const std::string& message) { throw Failure{s, message}; }

// ---- handles

struct TablesDel { void operator()(dlab_tables* p) const { dlab_tables_free(p); } };
struct SeqDel { void operator()(dlab_sequence* p) const { dlab_sequence_free(p); } };
struct PsiDel { void operator()(dlab_psi* p) const { dlab_psi_free(p); } };
struct DiscDel { void operator()(dlab_discrepancy_report* p) const { dlab_discrepancy_report_free(p); } };
struct DispDel { void operator()(dlab_dispersion_report* p) const { dlab_dispersion_report_free(p); } };
struct GridDel { void operator()(dlab_grid* p) const { dlab_grid_free(p); } };

using Tables = std::unique_ptr<dlab_tables, TablesDel>;
using Seq = std::unique_ptr<dlab_sequence, SeqDel>;
using Psi = std::unique_ptr<dlab_psi, PsiDel>;

std::optional<u64> env_table_limit() {
  const char* v = std::getenv("DISPERSION_LAB_TABLE_LIMIT");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v, &end, 10);
  if (*end != '\0' || x == 0)
    fail(DLAB_ERR_INVALID_ARGUMENT, "DISPERSION_LAB_TABLE_LIMIT must be a positive integer");
  return x;
}

Tables make_tables(u64 needed, int k_max) {
  needed = std::max<u64>(needed, 2);
  if (const auto cap = env_table_limit(); cap && needed > *cap)
    fail(DLAB_ERR_TABLE_LIMIT, "tables up to " + std::to_string(needed) +
                                   " exceed DISPERSION_LAB_TABLE_LIMIT=" + std::to_string(*cap));
  dlab_tables* t = nullptr;
  check(dlab_tables_build(needed, k_max, &t));
  return Tables(t);
}

Psi make_psi() {
  dlab_psi* p = nullptr;
  check(dlab_psi_build(1e-10, &p));
  return Psi(p);
}

// Largest index named in a sequence file, so tables can be sized before parsing.
u64 file_max_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(DLAB_ERR_IO, "cannot open sequence file '" + path + "'");
  u64 best = 1;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string tok;
    if (!(f >> tok) || tok[0] == '#') continue;
    best = std::max<u64>(best, std::strtoull(tok.c_str(), nullptr, 10));
  }
  return best;
}

Seq make_seq(const dlab_tables* t, const std::string& kind, const std::string& file, u64 lower,
             u64 seed, int order) {
  dlab_sequence* s = nullptr;
  if (!file.empty())
    check(dlab_sequence_load(t, file.c_str(), order, &s));
  else
    check(dlab_sequence_make(t, kind.c_str(), lower, seed, &s));
  return Seq(s);
}

u64 seq_table_need(const std::string& file, u64 lower) {
  return file.empty() ? 2 * lower : file_max_index(file);
}

u64 to_u64(double v, const char* name) {
  if (!std::isfinite(v) || v < 0 || v != std::floor(v) || v > 9007199254740992.0)
    fail(DLAB_ERR_INVALID_ARGUMENT, std::string(name) + " must be a non-negative integer");
  return static_cast<u64>(v);
}

i64 to_i64(double v, const char* name) {
  if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 9007199254740992.0)
    fail(DLAB_ERR_INVALID_ARGUMENT, std::string(name) + " must be an integer");
  return static_cast<i64>(v);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Csv {
  std::ostringstream out;
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out << (first ? "" : ",") << cell(cells), first = false), ...);
    out << "\r\n";
  }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return num(v); }
  static std::string cell(u64 v) { return std::to_string(v); }
  static std::string cell(i64 v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
};

double rel_gap(const dlab_identity& c) { return c.abs_gap / std::max(1.0, std::fabs(c.lhs)); }

// ---- one run

struct Outcome {
  json result = json::object();
  std::string csv;
  json tolerances = json::object();
  bool tolerance_failed = false;
};

struct RunResult {
  int exit_code = 0;
  std::string command;
  std::string stdout_bytes;
  std::string csv_bytes;
  std::string csv_path;
  std::string manifest_path;
  unsigned workers = 1;
  json params = json::object();
  json tolerances = json::object();
  std::vector<std::string> args;  // without --csv, --manifest, --workers
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(DLAB_ERR_INTERNAL, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::vector<std::string> strip_run_options(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    bool matched = false;
    for (const char* name : {"--csv", "--manifest", "--workers"}) {
      const std::string n(name);
      if (a == n) {
        ++i;
        matched = true;
      } else if (a.rfind(n + "=", 0) == 0) {
        matched = true;
      }
      if (matched) break;
    }
    if (!matched) out.push_back(a);
  }
  return out;
}

struct Command {
  CLI::App* app = nullptr;
  std::function<Outcome()> run;
};

RunResult run_cli(const std::vector<std::string>& raw_args);

// ---- commands

void add_window(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("window", "Admissible modulus window for given M, N");
  auto M = std::make_shared<double>(0);
  auto N = std::make_shared<double>(0);
  auto eps = std::make_shared<double>(0.01);
  sub->add_option("--M", *M, "Size of the m variable")->required();
  sub->add_option("--N", *N, "Size of the n variable")->required();
  sub->add_option("--eps", *eps, "Exponent slack")->capture_default_str();
  cmds.push_back({sub, [=] {
    dlab_q_window w{};
    check(dlab_admissible_Q_window(*M, *N, *eps, &w));
    Outcome o;
    o.result = {{"command", "window"}, {"M", *M}, {"N", *N}, {"eps", *eps},
                {"X", *M * *N}, {"empty", w.empty != 0}, {"Q_lo", w.lo}, {"Q_hi", w.hi},
                {"exponent_lo", w.exponent_lo}, {"exponent_hi", w.exponent_hi},
                {"n_exponent", w.n_exponent}, {"n_below_17_33", w.n_below_17_33 != 0}};
    return o;
  }});
}

struct SeqOpts {
  std::string kind;
  std::string file;
};

void add_seq_options(CLI::App* sub, const std::string& name, SeqOpts& s, const std::string& def) {
  s.kind = def;
  sub->add_option("--" + name, s.kind,
                  "Built-in kind: constant_one, moebius, tau2, random, sign, zero")
      ->capture_default_str();
  sub->add_option("--" + name + "-file", s.file, "Sequence file of 'index value' lines");
}

void add_discrepancy(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("discrepancy", "E(q, a) over Q <= q < 2Q and the mean discrepancy");
  struct O {
    double M = 0, N = 0, Q = 0, a = 1;
    SeqOpts alpha, beta;
    int order = 2;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--M", o->M, "alpha lives on [M, 2M)")->required();
  sub->add_option("--N", o->N, "beta lives on [N, 2N)")->required();
  sub->add_option("--Q", o->Q, "Moduli Q <= q < 2Q")->required();
  sub->add_option("--a", o->a, "Residue")->capture_default_str();
  add_seq_options(sub, "alpha", o->alpha, "constant_one");
  add_seq_options(sub, "beta", o->beta, "moebius");
  sub->add_option("--order", o->order, "Divisor-bound order for file sequences")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for random kinds")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 M = to_u64(o->M, "M"), N = to_u64(o->N, "N"), Q = to_u64(o->Q, "Q");
    const i64 a = to_i64(o->a, "a");
    const u64 need = std::max(seq_table_need(o->alpha.file, M), seq_table_need(o->beta.file, N));
    Tables t = make_tables(need, std::max(2, o->order));
    Seq alpha = make_seq(t.get(), o->alpha.kind, o->alpha.file, M, o->seed, o->order);
    Seq beta = make_seq(t.get(), o->beta.kind, o->beta.file, N, o->seed + 1, o->order);
    dlab_discrepancy_report* raw = nullptr;
    check(dlab_mean_discrepancy(alpha.get(), beta.get(), Q, a, &raw));
    std::unique_ptr<dlab_discrepancy_report, DiscDel> rep(raw);
    Outcome out;
    Csv csv;
    csv.row("q", "E", "abs_E");
    const size_t count = dlab_discrepancy_report_count(rep.get());
    for (size_t i = 0; i < count; ++i) {
      u64 q = 0;
      double E = 0;
      check(dlab_discrepancy_report_entry(rep.get(), i, &q, &E));
      csv.row(q, E, std::fabs(E));
    }
    const double delta = dlab_discrepancy_report_delta(rep.get());
    const double normalized = dlab_discrepancy_report_normalized(rep.get());
    csv.row("Delta", "", delta);
    csv.row("Delta/X", "", normalized);
    out.csv = csv.out.str();
    out.result = {{"command", "discrepancy"}, {"M", M}, {"N", N}, {"Q", Q}, {"a", a},
                  {"alpha", o->alpha.file.empty() ? o->alpha.kind : "file"},
                  {"beta", o->beta.file.empty() ? o->beta.kind : "file"},
                  {"X", dlab_discrepancy_report_X(rep.get())}, {"moduli", count},
                  {"delta", delta}, {"delta_over_X", normalized}};
    return out;
  }});
}

void add_dispersion(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("dispersion", "U, V, W, main terms, identities and the Cauchy-Schwarz bound");
  struct O {
    double N = 0, M = 0, Q = 0, a = 1, eps = 0.01, tol = 1e-9;
    SeqOpts alpha, beta;
    int order = 2;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--N", o->N, "beta lives on [N, 2N)")->required();
  sub->add_option("--M", o->M, "Scale of the smoothed m variable")->required();
  sub->add_option("--Q", o->Q, "Scale of the smoothed modulus")->required();
  sub->add_option("--a", o->a, "Residue")->capture_default_str();
  sub->add_option("--eps", o->eps, "Exponent in H = Q X^eps / M")->capture_default_str();
  sub->add_option("--tol", o->tol, "Relative tolerance for the identities")->capture_default_str();
  add_seq_options(sub, "beta", o->beta, "moebius");
  add_seq_options(sub, "alpha", o->alpha, "constant_one");
  sub->add_option("--order", o->order, "Divisor-bound order for file sequences")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for random kinds")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 M = to_u64(o->M, "M"), N = to_u64(o->N, "N"), Q = to_u64(o->Q, "Q");
    const i64 a = to_i64(o->a, "a");
    const u64 need = std::max(seq_table_need(o->alpha.file, M), seq_table_need(o->beta.file, N));
    Tables t = make_tables(need, std::max(2, o->order));
    Seq beta = make_seq(t.get(), o->beta.kind, o->beta.file, N, o->seed + 1, o->order);
    Seq alpha = make_seq(t.get(), o->alpha.kind, o->alpha.file, M, o->seed, o->order);
    Psi psi = make_psi();

    dlab_dispersion_report* raw = nullptr;
    check(dlab_compute_UVW(beta.get(), psi.get(), M, Q, a, o->eps, &raw));
    std::unique_ptr<dlab_dispersion_report, DispDel> rep(raw);
    dlab_dispersion_terms terms{};
    dlab_dispersion_report_terms(rep.get(), &terms);
    dlab_identity expansion{}, main_term{};
    check(dlab_dispersion_expansion_identity(beta.get(), psi.get(), M, Q, a, &expansion));
    check(dlab_main_term_variance_identity(beta.get(), psi.get(), M, Q, a, &main_term));
    dlab_cs_check cs{};
    check(dlab_cauchy_schwarz_bound(alpha.get(), beta.get(), psi.get(), Q, a, &cs));

    Outcome out;
    Csv csv;
    csv.row("q", "weight", "U", "V", "W");
    const size_t count = dlab_dispersion_report_count(rep.get());
    for (size_t i = 0; i < count; ++i) {
      u64 q = 0;
      double w = 0, U = 0, V = 0, W = 0;
      check(dlab_dispersion_report_entry(rep.get(), i, &q, &w, &U, &V, &W));
      csv.row(q, w, U, V, W);
    }
    out.csv = csv.out.str();
    const double gap_e = rel_gap(expansion), gap_m = rel_gap(main_term);
    out.tolerances = {{"identity_rel_gap", o->tol}, {"cs_ratio_max", 1.0}};
    out.tolerance_failed = !(gap_e <= o->tol) || !(gap_m <= o->tol) || !(cs.ratio <= 1.0);
    out.result = {
        {"command", "dispersion"}, {"N", N}, {"M", M}, {"Q", Q}, {"a", a},
        {"beta", o->beta.file.empty() ? o->beta.kind : "file"},
        {"alpha", o->alpha.file.empty() ? o->alpha.kind : "file"},
        {"U", terms.U}, {"V", terms.V}, {"W", terms.W},
        {"U_MT", terms.U_MT}, {"V_MT", terms.V_MT}, {"W_MT", terms.W_MT},
        {"H", terms.H}, {"R", terms.R}, {"moduli", count},
        {"expansion", terms.W - 2 * terms.V + terms.U},
        {"identity_gaps",
         {{"expansion", {{"lhs", expansion.lhs}, {"rhs", expansion.rhs}, {"rel_gap", gap_e}}},
          {"main_term", {{"lhs", main_term.lhs}, {"rhs", main_term.rhs}, {"rel_gap", gap_m}}}}},
        {"cs_ratio", cs.ratio},
        {"cs", {{"delta", cs.delta}, {"delta_sq", cs.delta_sq}, {"alpha_mass", cs.alpha_mass},
                {"expansion", cs.expansion}, {"bound", cs.bound}}}};
    return out;
  }});
}

void add_kloosterman(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("kloosterman", "Complete Kloosterman sums, Weil-bound sweep, short weighted sums");
  struct O {
    double a = 1, b = 1, c = 0, c_max = 60;
    double short_trials = 0, short_a_max = 1e4, short_b_max = 100;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--a", o->a, "First argument (single evaluation)")->capture_default_str();
  sub->add_option("--b", o->b, "Second argument (single evaluation)")->capture_default_str();
  sub->add_option("--c", o->c, "Modulus; when given only S(a, b; c) is evaluated");
  sub->add_option("--c-max", o->c_max, "Sweep all (a, b) for c <= c-max")->capture_default_str();
  sub->add_option("--short-trials", o->short_trials, "Random weighted short sums to evaluate")
      ->capture_default_str();
  sub->add_option("--short-a-max", o->short_a_max, "Largest modulus for short sums")->capture_default_str();
  sub->add_option("--short-b-max", o->short_b_max, "Largest coprimality filter for short sums")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for the short-sum trials")->capture_default_str();
  cmds.push_back({sub, [o, sub] {
    Outcome out;
    if (sub->count("--c")) {
      const i64 a = to_i64(o->a, "a"), b = to_i64(o->b, "b");
      const u64 c = to_u64(o->c, "c");
      double re = 0, im = 0, ratio = 0;
      check(dlab_kloosterman(a, b, c, &re, &im));
      check(dlab_weil_ratio(a, b, c, &ratio));
      out.tolerances = {{"weil_ratio_max", 1.0}};
      out.tolerance_failed = ratio > 1.0 + 1e-12;
      out.result = {{"command", "kloosterman"}, {"a", a}, {"b", b}, {"c", c}, {"re", re},
                    {"im", im}, {"abs", std::hypot(re, im)}, {"weil_ratio", ratio}};
      return out;
    }
    const u64 c_max = to_u64(o->c_max, "c-max");
    std::vector<double> ratios(c_max);
    dlab_weil_sweep w{};
    check(dlab_weil_sweep_profile(c_max, &w, ratios.data()));
    Csv csv;
    csv.row("c", "max_weil_ratio");
    for (u64 c = 1; c <= c_max; ++c) csv.row(c, ratios[c - 1]);
    out.csv = csv.out.str();
    out.tolerances = {{"weil_ratio_max", 1.0}, {"slack", 1e-12}};
    out.tolerance_failed = w.violations > 0;
    out.result = {{"command", "kloosterman"}, {"c_max", w.c_max}, {"checked", w.checked},
                  {"violations", w.violations}, {"max_ratio", w.max_ratio},
                  {"worst", {{"a", w.worst_a}, {"b", w.worst_b}, {"c", w.worst_c}}}};
    const u64 trials = to_u64(o->short_trials, "short-trials");
    if (trials > 0) {
      dlab_short_kloosterman_sweep s{};
      check(dlab_short_kloosterman_sweep_run(trials, to_u64(o->short_a_max, "short-a-max"),
                                             to_u64(o->short_b_max, "short-b-max"), o->seed, &s));
      out.result["short_sums"] = {{"trials", s.trials}, {"eps0", 0.1}, {"seed", o->seed},
                                  {"max_ratio", s.max_ratio}, {"median_ratio", s.median_ratio}};
    }
    return out;
  }});
}

void add_trilinear(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("trilinear", "Trilinear forms in Kloosterman fractions with random signs");
  struct O {
    double A = 16, M = 16, N = 16, theta = 1, trials = 1;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--A", o->A, "a ranges over [A, 2A)")->capture_default_str();
  sub->add_option("--M", o->M, "m ranges over [M, 2M)")->capture_default_str();
  sub->add_option("--N", o->N, "n ranges over [N, 2N)")->capture_default_str();
  sub->add_option("--theta", o->theta, "Nonzero integer multiplier")->capture_default_str();
  sub->add_option("--trials", o->trials, "Seeds seed .. seed + trials - 1")->capture_default_str();
  sub->add_option("--seed", o->seed, "First seed")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 A = to_u64(o->A, "A"), M = to_u64(o->M, "M"), N = to_u64(o->N, "N");
    const i64 theta = to_i64(o->theta, "theta");
    const u64 trials = std::max<u64>(1, to_u64(o->trials, "trials"));
    Outcome out;
    Csv csv;
    csv.row("seed", "abs_value", "trivial_bound", "trivial_ratio", "bc_ratio", "bc_ratio_normalized",
            "skipped_pairs");
    std::vector<double> trivial_ratios;
    double max_bc = 0, max_bc_norm = 0;
    bool exceeded = false;
    json first;
    for (u64 i = 0; i < trials; ++i) {
      dlab_trilinear r{};
      check(dlab_trilinear_random_sign(theta, A, M, N, o->seed + i, &r));
      const double absv = std::hypot(r.re, r.im);
      const double tr = r.trivial_bound > 0 ? absv / r.trivial_bound : 0.0;
      trivial_ratios.push_back(tr);
      max_bc = std::max(max_bc, r.ratio);
      max_bc_norm = std::max(max_bc_norm, r.ratio_normalized);
      exceeded = exceeded || absv > r.trivial_bound * (1 + 1e-12) + 1e-12;
      csv.row(o->seed + i, absv, r.trivial_bound, tr, r.ratio, r.ratio_normalized, r.skipped_pairs);
      if (i == 0)
        first = {{"re", r.re}, {"im", r.im}, {"abs", absv}, {"trivial_bound", r.trivial_bound},
                 {"bc_bound", r.bc_bound}, {"ratio", r.ratio},
                 {"bc_bound_normalized", r.bc_bound_normalized},
                 {"ratio_normalized", r.ratio_normalized}, {"eps", r.eps},
                 {"skipped_pairs", r.skipped_pairs}};
    }
    std::vector<double> sorted = trivial_ratios;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    out.csv = csv.out.str();
    out.tolerances = {{"trivial_ratio_max", 1.0}};
    out.tolerance_failed = exceeded;
    out.result = {{"command", "trilinear"}, {"A", A}, {"M", M}, {"N", N}, {"theta", theta},
                  {"seed", o->seed}, {"trials", trials}, {"first", first},
                  {"median_trivial_ratio", median}, {"max_bc_ratio", max_bc},
                  {"max_bc_ratio_normalized", max_bc_norm}};
    return out;
  }});
}

void add_bezout(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("bezout-check", "Exact Bezout reciprocity and Kloosterman-fraction factorization");
  struct O {
    double trials = 1e5, bound = 1e9, factorization_trials = 1e4;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--trials", o->trials, "Random reciprocity triples")->capture_default_str();
  sub->add_option("--bound", o->bound, "m, n drawn from [1, bound]")->capture_default_str();
  sub->add_option("--factorization-trials", o->factorization_trials, "Random admissible tuples")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed")->capture_default_str();
  cmds.push_back({sub, [o] {
    dlab_trial_sweep b{}, f{};
    check(dlab_bezout_sweep(to_u64(o->trials, "trials"), to_u64(o->bound, "bound"), o->seed, &b));
    check(dlab_factorization_sweep(to_u64(o->factorization_trials, "factorization-trials"),
                                   o->seed, &f));
    Outcome out;
    out.tolerances = {{"mismatches", 0}};
    out.tolerance_failed = b.mismatches || f.mismatches || f.xi_pair_mismatches;
    out.result = {{"command", "bezout-check"}, {"seed", o->seed},
                  {"bezout", {{"trials", b.trials}, {"bound", to_u64(o->bound, "bound")},
                              {"mismatches", b.mismatches}}},
                  {"factorization", {{"trials", f.trials}, {"mismatches", f.mismatches},
                                     {"xi_pairs", f.xi_pairs},
                                     {"xi_pair_mismatches", f.xi_pair_mismatches}}},
                  {"all_exact", !out.tolerance_failed}};
    return out;
  }});
}

void add_poisson(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("poisson-check", "Truncated Poisson summation in a progression and the coprime sum");
  struct O {
    double M = 0, q = 1, a = 1, H = 0, tol = 0, coprime_tol = 10;
    std::string precision = "extended";
  };
  auto o = std::make_shared<O>();
  sub->add_option("--M", o->M, "Scale")->required();
  sub->add_option("--q", o->q, "Modulus")->capture_default_str();
  sub->add_option("--a", o->a, "Residue")->capture_default_str();
  sub->add_option("--H", o->H, "Truncation (default: the threshold (q/M) log^4(2M))");
  sub->add_option("--precision", o->precision, "extended or working")
      ->check(CLI::IsMember({"extended", "working"}))
      ->capture_default_str();
  sub->add_option("--tol", o->tol, "Bound on |residual| (default 10/M)");
  sub->add_option("--coprime-tol", o->coprime_tol, "Bound on the coprime-sum constant")
      ->capture_default_str();
  cmds.push_back({sub, [o, sub] {
    const u64 M = to_u64(o->M, "M"), q = to_u64(o->q, "q");
    const i64 a = to_i64(o->a, "a");
    double threshold = 0;
    check(dlab_poisson_threshold(M, q, &threshold));
    const double H = sub->count("--H") ? o->H : threshold;
    const double tol = sub->count("--tol") ? o->tol : 10.0 / static_cast<double>(M);
    Psi psi = make_psi();
    dlab_poisson_check p{};
    check(dlab_truncated_poisson_ap(psi.get(), M, q, a, H,
                                    o->precision == "working" ? DLAB_PRECISION_WORKING
                                                              : DLAB_PRECISION_EXTENDED,
                                    &p));
    dlab_coprime_sum c{};
    check(dlab_coprime_psi_sum(psi.get(), M, q, &c));
    Outcome out;
    out.tolerances = {{"abs_residual_max", tol}, {"coprime_constant_max", o->coprime_tol}};
    out.tolerance_failed = !(std::fabs(p.residual) <= tol) || !(c.constant <= o->coprime_tol);
    out.result = {{"command", "poisson-check"}, {"M", M}, {"q", q}, {"a", a}, {"H", p.H},
                  {"threshold", p.threshold}, {"precision", o->precision}, {"digits", p.digits},
                  {"lhs", p.lhs}, {"main", p.main}, {"dual_sum", p.dual_sum},
                  {"residual", p.residual}, {"abs_residual", std::fabs(p.residual)},
                  {"noise_floor", p.noise_floor}, {"dual_terms", p.dual_terms},
                  {"coprime", {{"lhs", c.lhs}, {"main", c.main}, {"residual", c.residual},
                               {"constant", c.constant}}}};
    return out;
  }});
}

void add_sw(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("sw-check", "Siegel-Walfisz defects over all coprime residues");
  struct O {
    double N = 0, q_max = 10, r = 1, tol = -1;
    SeqOpts seq;
    int order = 2;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--N", o->N, "Sequence lives on [N, 2N)")->required();
  add_seq_options(sub, "kind", o->seq, "moebius");
  sub->add_option("--q-max", o->q_max, "Moduli 1 <= q <= q-max")->capture_default_str();
  sub->add_option("--r", o->r, "Coprimality filter")->capture_default_str();
  sub->add_option("--tol", o->tol, "Fail when max |defect| exceeds this (negative: never)")
      ->capture_default_str();
  sub->add_option("--order", o->order, "Divisor-bound order for file sequences")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for random kinds")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 N = to_u64(o->N, "N"), q_max = to_u64(o->q_max, "q-max"), r = to_u64(o->r, "r");
    Tables t = make_tables(seq_table_need(o->seq.file, N), std::max(2, o->order));
    Seq s = make_seq(t.get(), o->seq.kind, o->seq.file, N, o->seed, o->order);
    Csv csv;
    csv.row("q", "a", "defect");
    double worst = 0, mass = 0;
    u64 worst_q = 1, worst_a = 1, pairs = 0;
    for (u64 n = dlab_sequence_lower(s.get()); n < dlab_sequence_upper(s.get()); ++n)
      mass += std::fabs(dlab_sequence_value(s.get(), n));
    for (u64 q = 1; q <= q_max; ++q) {
      for (u64 a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        double d = 0;
        check(dlab_sw_defect(s.get(), q, static_cast<i64>(a), r, &d));
        csv.row(q, a, d);
        ++pairs;
        if (std::fabs(d) > worst) {
          worst = std::fabs(d);
          worst_q = q;
          worst_a = a;
        }
      }
    }
    Outcome out;
    out.csv = csv.out.str();
    if (o->tol >= 0) {
      out.tolerances = {{"max_abs_defect", o->tol}};
      out.tolerance_failed = worst > o->tol;
    }
    out.result = {{"command", "sw-check"}, {"N", N},
                  {"kind", o->seq.file.empty() ? o->seq.kind : "file"}, {"q_max", q_max},
                  {"r", r}, {"pairs", pairs}, {"residue_range", "1 <= a <= q, gcd(a, q) = 1"},
                  {"nominal_range", "q > |a| >= 1"}, {"max_abs_defect", worst},
                  {"argmax", {{"q", worst_q}, {"a", worst_a}}}, {"total_mass", mass},
                  {"max_over_mass", mass > 0 ? worst / mass : 0.0}};
    return out;
  }});
}

void add_bdh(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("bdh", "Barban-Davenport-Halberstam variance");
  struct O {
    double N = 0, Q_max = 0;
    SeqOpts seq;
    int order = 2;
    u64 seed = 0;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--N", o->N, "Sequence lives on [N, 2N)")->required();
  sub->add_option("--Q-max", o->Q_max, "Largest modulus (<= N)")->required();
  add_seq_options(sub, "kind", o->seq, "constant_one");
  sub->add_option("--order", o->order, "Divisor-bound order for file sequences")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for random kinds")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 N = to_u64(o->N, "N"), Q_max = to_u64(o->Q_max, "Q-max");
    if (Q_max > N) fail(DLAB_ERR_PRECONDITION, "bdh needs Q-max <= N");
    Tables t = make_tables(seq_table_need(o->seq.file, N), std::max(2, o->order));
    Seq s = make_seq(t.get(), o->seq.kind, o->seq.file, N, o->seed, o->order);
    const double Nd = static_cast<double>(N);
    Csv csv;
    csv.row("Q", "variance", "variance_over_N2", "variance_over_N_logN");
    double total = 0;
    std::vector<u64> steps;
    for (u64 Q = 1; Q < Q_max; Q *= 2) steps.push_back(Q);
    steps.push_back(Q_max);
    for (u64 Q : steps) {
      double v = 0;
      check(dlab_bdh_variance(s.get(), Q, &v));
      csv.row(Q, v, v / (Nd * Nd), v / (Nd * std::log(Nd)));
      total = v;
    }
    Outcome out;
    out.csv = csv.out.str();
    out.result = {{"command", "bdh"}, {"N", N}, {"Q_max", Q_max},
                  {"kind", o->seq.file.empty() ? o->seq.kind : "file"}, {"variance", total},
                  {"variance_over_N2", total / (Nd * Nd)},
                  {"variance_over_N_logN", total / (Nd * std::log(Nd))}};
    return out;
  }});
}

void add_tau_ap(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("tau-ap", "tau_k summed over a short progression");
  struct O {
    double x = 0, y = 0, q = 1, a = 1;
    int k = 2;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--x", o->x, "Right end point")->required();
  sub->add_option("--y", o->y, "Interval length")->required();
  sub->add_option("--q", o->q, "Modulus")->capture_default_str();
  sub->add_option("--a", o->a, "Residue")->capture_default_str();
  sub->add_option("--k", o->k, "Divisor-function order")->capture_default_str();
  cmds.push_back({sub, [o] {
    const u64 x = to_u64(o->x, "x"), y = to_u64(o->y, "y"), q = to_u64(o->q, "q");
    const i64 a = to_i64(o->a, "a");
    if (o->k < 1) fail(DLAB_ERR_INVALID_ARGUMENT, "k must be >= 1");
    Tables t = make_tables(x, std::max(2, o->k));
    dlab_tau_ap r{};
    check(dlab_tau_ap_ratio(t.get(), x, y, q, a, o->k, &r));
    Outcome out;
    out.result = {{"command", "tau-ap"}, {"x", x}, {"y", y}, {"q", q}, {"a", a}, {"k", o->k},
                  {"sum", r.sum}, {"terms", r.terms}, {"bound_ratio", r.bound_ratio}};
    return out;
  }});
}

void add_titchmarsh(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("titchmarsh", "Divisor sum over mn - 1 against its predicted main term");
  struct O {
    double X = 0, delta = 0.005, B = 1;
    std::string alpha_kind = "constant_one", beta_kind = "constant_one";
    u64 seed = 0;
    double tol = 1e-9;
  };
  auto o = std::make_shared<O>();
  sub->add_option("--X", o->X, "Size of mn")->required();
  sub->add_option("--delta", o->delta, "Shape: M = X^(1/2 - delta), N = X^(1/2 + delta)")
      ->capture_default_str();
  sub->add_option("--alpha-kind", o->alpha_kind, "Built-in kind for alpha")->capture_default_str();
  sub->add_option("--beta-kind", o->beta_kind, "Built-in kind for beta")->capture_default_str();
  sub->add_option("--B", o->B, "Dissection exponent, L0 = floor(log(2X)^B)")->capture_default_str();
  sub->add_option("--seed", o->seed, "Seed for random kinds")->capture_default_str();
  sub->add_option("--tol", o->tol, "Relative tolerance for the hyperbola reassembly")
      ->capture_default_str();
  cmds.push_back({sub, [o] {
    if (!(o->delta > 0 && o->delta < 1.0 / 112))
      std::cerr << "warning: delta = " << num(o->delta) << " is outside (0, 1/112)\n";
    dlab_shape shape{};
    check(dlab_corollary_shape(o->X, o->delta, &shape));
    Tables t = make_tables(2 * std::max(shape.M, shape.N), 2);
    Seq alpha = make_seq(t.get(), o->alpha_kind, "", shape.M, o->seed, 2);
    Seq beta = make_seq(t.get(), o->beta_kind, "", shape.N, o->seed + 1, 2);
    const u64 sieve_limit = env_table_limit().value_or(UINT64_MAX);
    dlab_deviation dev{};
    check(dlab_corollary_deviation(alpha.get(), beta.get(), sieve_limit, &dev));
    dlab_hyperbola h{};
    check(dlab_hyperbola_split(alpha.get(), beta.get(), &h));
    dlab_grid* g = nullptr;
    check(dlab_grid_build(shape.M, shape.N, o->B, &g));
    std::unique_ptr<dlab_grid, GridDel> grid(g);
    dlab_grid_stats gs{};
    dlab_grid_stats_get(grid.get(), &gs);
    dlab_dissection ds{};
    check(dlab_dissect_s1(alpha.get(), beta.get(), grid.get(), &ds));

    const double reassembly_gap = std::fabs(h.reassembled - dev.lhs) / std::max(1.0, std::fabs(dev.lhs));
    const double dissection_gap =
        std::fabs(ds.s1_e0 + ds.s1_free - h.S1) / std::max(1.0, std::fabs(h.S1));
    Outcome out;
    out.tolerances = {{"reassembly_rel_gap", o->tol}, {"dropped_condition_violations", 0}};
    out.tolerance_failed = !(reassembly_gap <= o->tol) || !(dissection_gap <= o->tol) ||
                           ds.dropped_condition_violations > 0;
    out.result = {
        {"command", "titchmarsh"}, {"X", o->X}, {"delta", o->delta}, {"M", shape.M},
        {"N", shape.N}, {"alpha_kind", o->alpha_kind}, {"beta_kind", o->beta_kind},
        {"lhs", dev.lhs}, {"rhs", dev.rhs}, {"S0", h.S0}, {"S1", h.S1},
        {"square_mass", h.square_mass}, {"reassembled", h.reassembled},
        {"reassembly_rel_gap", reassembly_gap}, {"abs_dev", dev.abs_dev}, {"rel_dev", dev.rel_dev},
        {"grid_stats", {{"B", gs.B}, {"log_2X", gs.log_2X}, {"L0", gs.L0}, {"delta", gs.delta},
                        {"cells", gs.cells}, {"e0_cells", gs.e0_cells}}},
        {"dissection", {{"s1_e0", ds.s1_e0}, {"s1_free", ds.s1_free}, {"triples", ds.triples},
                        {"e0_triples", ds.e0_triples},
                        {"dropped_condition_violations", ds.dropped_condition_violations}}}};
    return out;
  }});
}

void add_replay(CLI::App& root, std::vector<Command>& cmds) {
  auto* sub = root.add_subcommand("replay", "Re-run a manifest and compare output digests");
  auto path = std::make_shared<std::string>();
  sub->add_option("manifest_file", *path, "Manifest written by --manifest")->required();
  cmds.push_back({sub, [path] {
    std::ifstream in(*path);
    if (!in) fail(DLAB_ERR_IO, "cannot open manifest '" + *path + "'");
    json m;
    try {
      m = json::parse(in);
    } catch (const std::exception& e) {
      fail(DLAB_ERR_PARSE, std::string("malformed manifest: ") + e.what());
    }
    if (!m.contains("args") || !m["args"].is_array())
      fail(DLAB_ERR_PARSE, "manifest has no args array");
    std::vector<std::string> args = m["args"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "replay") fail(DLAB_ERR_INVALID_ARGUMENT, "cannot replay a replay");
    args.push_back("--workers=" + std::to_string(dlab_worker_count()));
    const RunResult r = run_cli(args);
    const std::string out_sha = sha256_hex(r.stdout_bytes);
    const std::string csv_sha = r.csv_bytes.empty() ? "" : sha256_hex(r.csv_bytes);
    const std::string want_out = m.value("stdout_sha256", "");
    const std::string want_csv = m.contains("csv_sha256") && m["csv_sha256"].is_string()
                                     ? m["csv_sha256"].get<std::string>()
                                     : "";
    Outcome o;
    const bool match = out_sha == want_out && (want_csv.empty() || csv_sha == want_csv);
    o.tolerance_failed = !match || r.exit_code != m.value("exit_code", 0);
    o.result = {{"command", "replay"}, {"replayed", m.value("command", "")},
                {"stdout_sha256", out_sha}, {"expected_stdout_sha256", want_out},
                {"csv_sha256", csv_sha}, {"expected_csv_sha256", want_csv},
                {"exit_code", r.exit_code}, {"match", match}};
    return o;
  }});
}

int status_exit(dlab_status s) {
  return s == DLAB_ERR_PRECONDITION ? kExitPrecondition : kExitError;
}

json collect_params(const CLI::App* sub) {
  json p = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    std::string name = opt->get_name();
    if (name == "--help" || name == "-h" || name == "--csv" || name == "--manifest" ||
        name == "--workers")
      continue;
    if (name.rfind("--", 0) == 0) name.erase(0, 2);
    const auto& res = opt->results();
    if (!res.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
      p[name] = joined;
    } else if (!opt->get_default_str().empty()) {
      p[name] = opt->get_default_str();
    }
  }
  return p;
}

RunResult run_cli(const std::vector<std::string>& raw_args) {
  RunResult rr;
  std::vector<std::string> args;
  try {
    args = dlab_cli::expand_config(raw_args);
  } catch (const dlab_cli::ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    rr.exit_code = kExitError;
    return rr;
  }

  CLI::App app{"dlab: dispersion-method numerical laboratory"};
  app.set_version_flag("--version", dlab_version());
  std::string config_unused;
  app.add_option("--config", config_unused, "Flat key = value file; flags override it");
  app.require_subcommand(1);
  std::vector<Command> cmds;
  add_window(app, cmds);
  add_discrepancy(app, cmds);
  add_dispersion(app, cmds);
  add_kloosterman(app, cmds);
  add_trilinear(app, cmds);
  add_bezout(app, cmds);
  add_poisson(app, cmds);
  add_sw(app, cmds);
  add_bdh(app, cmds);
  add_tau_ap(app, cmds);
  add_titchmarsh(app, cmds);
  add_replay(app, cmds);
  unsigned workers = 1;
  for (auto& c : cmds) {
    c.app->add_option("--workers", workers, "Worker threads; output does not depend on it")
        ->capture_default_str();
    c.app->add_option("--csv", rr.csv_path, "Write the CSV table to this file");
    c.app->add_option("--manifest", rr.manifest_path, "Write a run manifest to this file");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    rr.exit_code = app.exit(e) == 0 ? 0 : kExitError;
    return rr;
  }

  const Command* chosen = nullptr;
  for (const auto& c : cmds)
    if (c.app->parsed()) chosen = &c;
  rr.command = chosen->app->get_name();
  rr.workers = std::max(1u, workers);
  rr.args = strip_run_options(args);
  rr.params = collect_params(chosen->app);
  dlab_set_worker_count(rr.workers);

  try {
    Outcome o = chosen->run();
    rr.stdout_bytes = o.result.dump(2) + "\n";
    rr.csv_bytes = std::move(o.csv);
    rr.tolerances = std::move(o.tolerances);
    rr.exit_code = o.tolerance_failed ? kExitTolerance : 0;
  } catch (const Failure& f) {
    std::cerr << "error (" << dlab_status_name(f.status) << "): " << f.message << "\n";
    rr.exit_code = status_exit(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rr.exit_code = kExitError;
  }
  return rr;
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> args(argv + 1, argv + argc);
  const RunResult r = run_cli(args);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::fwrite(r.stdout_bytes.data(), 1, r.stdout_bytes.size(), stdout);
  std::fflush(stdout);
  if (!r.csv_path.empty() && !r.csv_bytes.empty()) {
    std::ofstream f(r.csv_path, std::ios::binary);
    f << r.csv_bytes;
    if (!f) {
      std::cerr << "error (io): cannot write " << r.csv_path << "\n";
      return kExitError;
    }
  }
  if (!r.manifest_path.empty() && !r.command.empty()) {
    json m = {{"tool", "dlab"},
              {"version", dlab_version()},
              {"command", r.command},
              {"args", r.args},
              {"params", r.params},
              {"rng", dlab_rng_name()},
              {"workers", r.workers},
              {"table_limit", nullptr},
              {"tolerances", r.tolerances},
              {"wall_time_s", wall},
              {"exit_code", r.exit_code},
              {"stdout_sha256", sha256_hex(r.stdout_bytes)},
              {"csv_sha256", nullptr}};
    try {
      if (const auto cap = env_table_limit()) m["table_limit"] = *cap;
    } catch (const Failure&) {
    }
    if (!r.csv_bytes.empty()) m["csv_sha256"] = sha256_hex(r.csv_bytes);
    std::ofstream f(r.manifest_path, std::ios::binary);
    f << m.dump(2) << "\n";
    if (!f) {
      std::cerr << "error (io): cannot write " << r.manifest_path << "\n";
      return kExitError;
    }
  }
  return r.exit_code;
}
