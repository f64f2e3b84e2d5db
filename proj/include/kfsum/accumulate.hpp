#pragma once

#include <complex>
#include <cstdint>

namespace kfsum {

/// Neumaier (improved Kahan) summation of doubles.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated complex accumulation with a term counter. The real and
/// imaginary parts are summed independently.
class ComplexAccumulator {
 public:
  void add(std::complex<double> v) {
    re_.add(v.real());
    im_.add(v.imag());
    ++terms_;
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }
  std::uint64_t terms() const { return terms_; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
  std::uint64_t terms_ = 0;
};

}  // namespace kfsum
