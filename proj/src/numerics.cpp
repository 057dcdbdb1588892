#include "lossq/numerics.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "lossq/error.hpp"

namespace lossq {

double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      const RootOptions& options) {
  if (lo > hi) std::swap(lo, hi);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (!(std::signbit(f_lo) != std::signbit(f_hi)) || std::isnan(f_lo) || std::isnan(f_hi)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "]: f(lo)=" + std::to_string(f_lo) + ", f(hi)=" + std::to_string(f_hi));
  }

  int iter = 0;
  while (hi - lo > options.bisection_width && iter < options.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    ++iter;
  }

  // Secant polish from the two bracket ends, keeping the bracket valid.
  double x0 = lo, f0 = f_lo;
  double x1 = hi, f1 = f_hi;
  double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  while (iter < options.max_iterations) {
    ++iter;
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 > lo && x2 < hi) || !std::isfinite(x2)) x2 = 0.5 * (lo + hi);
    const double f2 = f(x2);
    best = x2;
    if (f2 == 0.0) return x2;
    if (std::signbit(f2) == std::signbit(f_lo)) {
      lo = x2;
      f_lo = f2;
    } else {
      hi = x2;
      f_hi = f2;
    }
    const double step = std::abs(x2 - x1);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    if (step < options.tolerance || hi - lo < options.tolerance) break;
  }
  return best;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace lossq
