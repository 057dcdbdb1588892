#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lossq/rng.hpp"

namespace lossq {

// Interarrival families. All parameters are in time units (or 1/time for rates).

struct Deterministic {
  double a;
};

struct Exponential {
  double rate;
};

struct Erlang {
  int k;
  double rate;
};

struct Hyperexponential {
  std::vector<double> weights;
  std::vector<double> rates;
};

struct Gamma {
  double shape;
  double rate;
};

using Family = std::variant<Deterministic, Exponential, Erlang, Hyperexponential, Gamma>;

/// Dimensionless second and third moments of the interarrival time measured
/// in units of 1/scale: rho2 = scale^2 E[X^2], rho3 = scale^3 E[X^3].
struct MomentSet {
  double rho2;
  double rho3;
  double scale;
};

/// Interarrival time distribution A(x) of a renewal arrival stream.
///
/// Immutable after construction. The arrival rate is always 1/mean, so a
/// model's load is derived rather than stored.
class InterarrivalDistribution {
 public:
  /// Validates parameters; throws DomainError on invalid input.
  explicit InterarrivalDistribution(Family family);

  static InterarrivalDistribution deterministic(double a);
  static InterarrivalDistribution exponential(double rate);
  static InterarrivalDistribution erlang(int k, double rate);
  static InterarrivalDistribution hyperexponential(std::vector<double> weights,
                                                   std::vector<double> rates);
  static InterarrivalDistribution gamma(double shape, double rate);

  [[nodiscard]] const Family& family() const { return family_; }
  [[nodiscard]] std::string_view family_name() const;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double arrival_rate() const { return 1.0 / mean(); }

  /// E[X^k] for k >= 0.
  [[nodiscard]] double raw_moment(int k) const;

  /// Laplace-Stieltjes transform: integral of exp(-s x) dA(x), s >= 0.
  [[nodiscard]] double lst(double s) const;

  /// 1 - lst(s), evaluated without cancellation near s = 0.
  [[nodiscard]] double lst_complement(double s) const;

  /// d/ds lst(s) = -integral of x exp(-s x) dA(x).
  [[nodiscard]] double lst_derivative(double s) const;

  /// Probability that a Poisson process of the given rate has exactly j
  /// events during one interarrival time.
  [[nodiscard]] double mixed_poisson_kernel(double rate, int j) const;

  /// Rigorous upper bound on the sum of mixed_poisson_kernel(rate, l) over
  /// l > j. Returns 1 when no bound is available yet (j before the mode).
  [[nodiscard]] double mixed_poisson_tail_bound(double rate, int j) const;

  [[nodiscard]] MomentSet moments(double scale) const;

  /// Same shape, every interarrival time multiplied by c.
  [[nodiscard]] InterarrivalDistribution time_scaled(double c) const;

  /// Same shape, rescaled to the requested mean.
  [[nodiscard]] InterarrivalDistribution with_mean(double mean) const;

  /// Integral of g(x) dA(x) by adaptive Gauss-Kronrod quadrature (a point
  /// evaluation for the deterministic family). Independent of the closed forms
  /// above, which is what the tests use it for.
  [[nodiscard]] double integrate(const std::function<double(double)>& g) const;

  /// One exact draw from A(x).
  [[nodiscard]] double sample(Xoshiro256& rng) const;

  /// Canonical spec string, e.g. "erlang:k=2,rate=2".
  [[nodiscard]] std::string spec() const;

 private:
  Family family_;
};

/// Parses `det:a=1.0`, `exp:rate=1.0`, `erlang:k=2,rate=2.0`,
/// `hyper:w=0.3|0.7,rate=1.0|4.0`, `gamma:shape=1.5,rate=2.0`.
///
/// Scale parameters may be omitted (`det`, `exp`, `erlang:k=3`,
/// `gamma:shape=0.5`); the distribution then gets mean 1, which is what the
/// CLI's --rho flag rescales anyway.
[[nodiscard]] InterarrivalDistribution parse_distribution(std::string_view spec);

/// Quadrature route for mixed_poisson_kernel, used to cross-check closed forms.
[[nodiscard]] double mixed_poisson_kernel_quadrature(const InterarrivalDistribution& d,
                                                     double rate, int j);

}  // namespace lossq
