#include "dlab/sequences.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rng.hpp"
#include "dlab/summation.hpp"

namespace dlab {

SequenceKind parse_sequence_kind(const std::string& name) {
  if (name == "constant_one" || name == "one") return SequenceKind::constant_one;
  if (name == "moebius" || name == "mu") return SequenceKind::moebius;
  if (name == "tau2") return SequenceKind::tau2;
  if (name == "random") return SequenceKind::random;
  if (name == "sign") return SequenceKind::sign;
  if (name == "zero") return SequenceKind::zero;
  if (name == "file" || name == "from_file") return SequenceKind::from_file;
  throw InvalidArgument("unknown sequence kind '" + name + "'");
}

const char* sequence_kind_name(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::constant_one: return "constant_one";
    case SequenceKind::moebius: return "moebius";
    case SequenceKind::tau2: return "tau2";
    case SequenceKind::random: return "random";
    case SequenceKind::sign: return "sign";
    case SequenceKind::zero: return "zero";
    case SequenceKind::from_file: return "from_file";
  }
  return "unknown";
}

CoefficientSequence::CoefficientSequence(u64 lower, std::vector<double> values, int order_k,
                                         const ArithTables& tables)
    : lower_(lower), values_(std::move(values)), order_k_(order_k) {
  if (lower_ == 0) throw InvalidArgument("sequence support must start at n >= 1");
  if (order_k_ < 1) throw InvalidArgument("divisor-bound order k must be >= 1");
  if (!values_.empty()) tables.require(upper() - 1);
  std::vector<u64> offending;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const u64 n = lower_ + i;
    const double v = values_[i];
    if (!std::isfinite(v)) {
      offending.push_back(n);
      continue;
    }
    if (v == 0.0) continue;
    const double bound = order_k_ == 1 ? 1.0 : static_cast<double>(tables.tau(order_k_, n));
    if (std::fabs(v) > bound) offending.push_back(n);
  }
  if (!offending.empty()) throw DivisorBoundViolation(std::move(offending));
}

CoefficientSequence CoefficientSequence::without_divisors_of(i64 a, const ArithTables& tables) const {
  std::vector<double> v = values_;
  const u64 abs_a = abs_u64(a);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (abs_a % (lower_ + i) == 0) v[i] = 0.0;
  return CoefficientSequence(lower_, std::move(v), order_k_, tables);
}

CoefficientSequence CoefficientSequence::scaled(double factor, const ArithTables& tables) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  // The bound is checked against a possibly larger order.
  int k = order_k_;
  while (k < tables.k_max()) {
    bool ok = true;
    for (std::size_t i = 0; i < v.size() && ok; ++i)
      ok = std::fabs(v[i]) <= static_cast<double>(tables.tau(k, lower_ + i));
    if (ok) break;
    ++k;
  }
  return CoefficientSequence(lower_, std::move(v), k, tables);
}

CoefficientSequence make_sequence(SequenceKind kind, u64 lower, const ArithTables& tables,
                                  std::uint64_t seed) {
  return make_sequence_range(kind, lower, 2 * lower, tables, seed);
}

CoefficientSequence make_sequence_range(SequenceKind kind, u64 lower, u64 upper,
                                        const ArithTables& tables, std::uint64_t seed) {
  if (lower == 0) throw InvalidArgument("sequence support must start at n >= 1");
  if (upper < lower) throw InvalidArgument("sequence range is reversed");
  if (upper > lower) tables.require(upper - 1);
  std::vector<double> v(upper - lower, 0.0);
  SeededRng rng(seed);
  int k = 1;
  for (u64 n = lower; n < upper; ++n) {
    double& x = v[n - lower];
    switch (kind) {
      case SequenceKind::constant_one: x = 1.0; break;
      case SequenceKind::moebius: x = tables.mu(n); break;
      case SequenceKind::tau2:
        x = static_cast<double>(tables.tau(2, n));
        k = 2;
        break;
      case SequenceKind::random:
        x = static_cast<double>(tables.tau(2, n)) * (2.0 * rng.uniform01() - 1.0);
        k = 2;
        break;
      case SequenceKind::sign: x = (rng.next() >> 63) ? 1.0 : -1.0; break;
      case SequenceKind::zero: x = 0.0; break;
      case SequenceKind::from_file:
        throw InvalidArgument("from_file sequences are read with load_sequence");
    }
  }
  if (kind == SequenceKind::tau2 || kind == SequenceKind::random) k = 2;
  return CoefficientSequence(lower, std::move(v), k, tables);
}

CoefficientSequence parse_sequence(const std::string& text, int order_k, const ArithTables& tables) {
  std::map<u64, double> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string idx_text;
    std::string val_text;
    if (!(fields >> idx_text)) continue;
    std::string extra;
    if (!(fields >> val_text) || (fields >> extra))
      throw ParseError("line " + std::to_string(line_no) + ": expected 'index value'");
    u64 idx = 0;
    const auto [p, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
    if (ec != std::errc() || p != idx_text.data() + idx_text.size() || idx == 0)
      throw ParseError("line " + std::to_string(line_no) + ": bad index '" + idx_text + "'");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(val_text, &used);
      if (used != val_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad value '" + val_text + "'");
    }
    if (!entries.emplace(idx, value).second)
      throw ParseError("line " + std::to_string(line_no) + ": repeated index " + idx_text);
  }
  if (entries.empty()) throw ParseError("sequence file has no entries");
  const u64 lower = entries.begin()->first;
  const u64 upper = entries.rbegin()->first + 1;
  std::vector<double> v(upper - lower, 0.0);
  for (const auto& [n, x] : entries) v[n - lower] = x;
  return CoefficientSequence(lower, std::move(v), order_k, tables);
}

CoefficientSequence load_sequence(const std::string& path, int order_k, const ArithTables& tables) {
  std::ifstream in(path);
  if (!in) throw Error(Status::io, "cannot open sequence file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sequence(buf.str(), order_k, tables);
}

double sw_defect(const CoefficientSequence& seq, u64 q, i64 a, u64 r) {
  if (q == 0) throw InvalidArgument("q must be >= 1");
  if (r == 0) throw InvalidArgument("r must be >= 1");
  if (gcd_i(a, q) != 1) throw InvalidArgument("sw_defect needs gcd(a, q) = 1");
  const u64 target = floor_mod(a, q);
  CompensatedSum progression;
  CompensatedSum coprime;
  for (u64 n = seq.lower(); n < seq.upper(); ++n) {
    const double c = seq[n];
    if (c == 0.0 || std::gcd(n, r) != 1) continue;
    if (n % q == target) progression += c;
    if (std::gcd(n, q) == 1) coprime += c;
  }
  return progression.value() - coprime.value() / static_cast<double>(euler_phi_direct(q));
}

double bdh_variance(const CoefficientSequence& seq, u64 Q_max) {
  if (Q_max == 0) return 0.0;
  const std::vector<double> per_q = parallel_map(Q_max, [&](std::size_t i) {
    const u64 q = i + 1;
    if (q == 1) return 0.0;
    std::vector<CompensatedSum> bucket(q);
    for (u64 n = seq.lower(); n < seq.upper(); ++n) bucket[n % q] += seq[n];
    CompensatedSum total;
    u64 phi = 0;
    for (u64 d = 0; d < q; ++d)
      if (std::gcd(d, q) == 1) {
        total += bucket[d].value();
        ++phi;
      }
    const double mean = total.value() / static_cast<double>(phi);
    CompensatedSum var;
    for (u64 d = 0; d < q; ++d)
      if (std::gcd(d, q) == 1) {
        const double e = bucket[d].value() - mean;
        var += e * e;
      }
    return var.value();
  });
  CompensatedSum total;
  for (double v : per_q) total += v;
  return total.value();
}

TauApResult tau_ap_ratio(u64 x, u64 y, u64 q, i64 a, int k, const ArithTables& tables) {
  if (q == 0) throw InvalidArgument("q must be >= 1");
  if (y == 0 || y > x) throw InvalidArgument("tau_ap_ratio needs 1 <= y <= x");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (gcd_i(a, q) != 1) throw InvalidArgument("tau_ap_ratio needs gcd(a, q) = 1");
  tables.require(x);
  const u64 lo = x - y + 1;
  const u64 first = lo + floor_mod(a - static_cast<i64>(lo % q), q);
  TauApResult out;
  u64 sum = 0;
  for (u64 n = first; n <= x; n += q) {
    sum += tables.tau(k, n);
    ++out.terms;
  }
  out.sum = static_cast<double>(sum);
  const double phi = static_cast<double>(q <= tables.limit() ? tables.phi(q) : euler_phi_direct(q));
  const double denom =
      static_cast<double>(y) / phi * std::pow(std::log(2.0 * static_cast<double>(x)), k - 1);
  out.bound_ratio = out.sum / denom;
  return out;
}

}  // namespace dlab
