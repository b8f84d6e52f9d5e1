#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlab {

// Mirrors dlab_status in dlab.h; the C layer maps exceptions through code().
enum class Status : int {
  ok = 0,
  invalid_argument = 1,
  not_invertible = 2,
  precondition = 3,
  divisor_bound = 4,
  parse = 5,
  table_limit = 6,
  quadrature = 7,
  io = 8,
  internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(Status code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Status code() const noexcept { return code_; }

 private:
  Status code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(Status::invalid_argument, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(Status::precondition, what) {}
};

class NotInvertible : public Error {
 public:
  NotInvertible(std::int64_t n, std::uint64_t modulus, std::uint64_t gcd)
      : Error(Status::not_invertible, "not invertible: gcd(" + std::to_string(n) + ", " +
                                          std::to_string(modulus) + ") = " + std::to_string(gcd)),
        gcd_(gcd) {}
  std::uint64_t gcd() const noexcept { return gcd_; }

 private:
  std::uint64_t gcd_;
};

class DivisorBoundViolation : public Error {
 public:
  explicit DivisorBoundViolation(std::vector<std::uint64_t> offending);
  const std::vector<std::uint64_t>& offending() const noexcept { return offending_; }

 private:
  std::vector<std::uint64_t> offending_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(Status::parse, what) {}
};

class TableLimitError : public Error {
 public:
  TableLimitError(std::uint64_t needed, std::uint64_t available)
      : Error(Status::table_limit, "arithmetic tables too small: need " + std::to_string(needed) +
                                       ", have " + std::to_string(available)),
        needed_(needed) {}
  std::uint64_t needed() const noexcept { return needed_; }

 private:
  std::uint64_t needed_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(double achieved, double requested)
      : Error(Status::quadrature, format(achieved, requested)), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format(double achieved, double requested) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "quadrature did not converge: achieved error %.3e > %.3e",
                  achieved, requested);
    return buf;
  }
  double achieved_;
};

}  // namespace dlab
