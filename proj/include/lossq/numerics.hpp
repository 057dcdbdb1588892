#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace lossq {

/// Neumaier's variant of Kahan summation.
///
/// The running compensation captures the low-order bits lost by each
/// addition, including the case where the addend is larger than the sum.
template <typename Real>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Real init) : sum_(init) {}

  void add(Real value) {
    const Real t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Real value) {
    add(value);
    return *this;
  }

  [[nodiscard]] Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

/// Compensated sum of a span.
template <typename Real>
[[nodiscard]] Real stable_sum(std::span<const Real> values) {
  CompensatedSum<Real> acc;
  for (Real v : values) acc.add(v);
  return acc.value();
}

struct RootOptions {
  /// Bisection runs until the bracket is narrower than this.
  double bisection_width = 1e-8;
  /// Secant polishing stops once a step is below this.
  double tolerance = 1e-14;
  int max_iterations = 500;
};

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs.
///
/// Bisection narrows the bracket to `bisection_width`, then safeguarded secant
/// steps polish the root; any secant step leaving the bracket is replaced by a
/// bisection step. Throws BracketError when the endpoint signs agree.
[[nodiscard]] double bracketed_root(const std::function<double(double)>& f, double lo,
                                    double hi, const RootOptions& options = {});

/// n choose k as a double (exact for the small arguments used here).
[[nodiscard]] double binomial(int n, int k);

/// log(exp(a) + exp(b)) without overflow.
[[nodiscard]] double log_add_exp(double a, double b);

}  // namespace lossq
