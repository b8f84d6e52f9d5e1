#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlab/arith.hpp"
#include "dlab/numeric.hpp"

namespace dlab {

enum class SequenceKind {
  constant_one,  // 1, order 1
  moebius,       // mu(n), order 1
  tau2,          // tau_2(n), order 2
  random,        // tau_2(n) * u with u uniform in [-1, 1], order 2
  sign,          // uniform +-1, order 1
  zero,          // 0, order 1
  from_file,
};

/// Parse "constant_one", "moebius", "tau2", "random", "sign", "zero", "file".
SequenceKind parse_sequence_kind(const std::string& name);
const char* sequence_kind_name(SequenceKind kind);

/// Real coefficients on [lower, upper). The usual dyadic support is
/// upper = 2 * lower. Every value satisfies |c_n| <= tau_k(n).
class CoefficientSequence {
 public:
  /// Validates the divisor bound against tables and throws
  /// DivisorBoundViolation listing each offending n.
  CoefficientSequence(u64 lower, std::vector<double> values, int order_k, const ArithTables& tables);

  u64 lower() const noexcept { return lower_; }
  u64 upper() const noexcept { return lower_ + values_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  int order_k() const noexcept { return order_k_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// c_n for lower <= n < upper, 0 elsewhere.
  double operator[](u64 n) const noexcept {
    return (n >= lower_ && n < upper()) ? values_[n - lower_] : 0.0;
  }

  /// Copy with c_n = 0 whenever n divides a.
  CoefficientSequence without_divisors_of(i64 a, const ArithTables& tables) const;

  CoefficientSequence scaled(double factor, const ArithTables& tables) const;

 private:
  u64 lower_;
  std::vector<double> values_;
  int order_k_;
};

/// Built-in sequences on the dyadic range [lower, 2 * lower). The seed is used
/// by the random and sign kinds only.
CoefficientSequence make_sequence(SequenceKind kind, u64 lower, const ArithTables& tables,
                                  std::uint64_t seed = 0);

/// Same on an arbitrary range [lower, upper).
CoefficientSequence make_sequence_range(SequenceKind kind, u64 lower, u64 upper,
                                        const ArithTables& tables, std::uint64_t seed = 0);

/// Text format: one "index value" pair per line, '#' starts a comment. The
/// support runs from the smallest to the largest index; missing indices are 0.
/// Throws ParseError on malformed lines or repeated indices.
CoefficientSequence parse_sequence(const std::string& text, int order_k, const ArithTables& tables);
CoefficientSequence load_sequence(const std::string& path, int order_k, const ArithTables& tables);

/// sum_{n = a (q), (n, r) = 1} c_n - (1 / phi(q)) sum_{(n, qr) = 1} c_n.
/// Throws InvalidArgument when gcd(a, q) > 1 or r == 0.
double sw_defect(const CoefficientSequence& seq, u64 q, i64 a, u64 r);

/// sum_{q <= Q_max} sum_{(a, q) = 1} |sum_{n = a (q)} c_n - (1/phi(q)) sum_{(n, q) = 1} c_n|^2.
double bdh_variance(const CoefficientSequence& seq, u64 Q_max);

struct TauApResult {
  double sum = 0.0;          // sum_{x - y < n <= x, n = a (q)} tau_k(n)
  double bound_ratio = 0.0;  // sum / ((y / phi(q)) log^{k-1}(2x))
  u64 terms = 0;
};

/// Throws InvalidArgument when gcd(a, q) > 1 or y == 0 or y > x; the range
/// must be covered by tables.
TauApResult tau_ap_ratio(u64 x, u64 y, u64 q, i64 a, int k, const ArithTables& tables);

}  // namespace dlab
