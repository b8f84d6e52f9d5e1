#pragma once

#include <cmath>
#include <complex>

namespace dlab {

// Neumaier's variant of Kahan summation. Results depend only on the order of
// add() calls, which every caller keeps fixed.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  ComplexCompensatedSum& operator+=(std::complex<double> z) {
    re_ += z.real();
    im_ += z.imag();
    return *this;
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace dlab
