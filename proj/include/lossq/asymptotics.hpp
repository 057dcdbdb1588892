#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "lossq/dist.hpp"
#include "lossq/model.hpp"
#include "lossq/result.hpp"

namespace lossq {

/// |rho - 1| below this counts as critical load.
inline constexpr double kCriticalBand = 1e-12;

/// C = epsilon * n above which the heavy-traffic estimate switches from the
/// linear term rho2 / (2n) to the exponential one. Table values at
/// rho = 0.999 use the linear term up to C = 0.05 and the exponential term at
/// C = 0.1; any cut in between reproduces both.
inline constexpr double kHeavyTrafficThreshold = 0.075;

/// Least root in (0, 1] of z = lst(m mu (1 - z)); 1 when rho >= 1.
/// Solved for w = 1 - z so that roots near 1 keep full relative precision.
[[nodiscard]] double sigma_root(const InterarrivalDistribution& d, double mu, int m);
[[nodiscard]] double sigma_root(const QueueModel& model);

/// Probability that an arrival to the GI/M/m queue (unlimited waiting room)
/// finds all m servers busy. Needs sigma in (0, 1). Throws SingularityError
/// when m (1 - sigma) is within 1e-12 of an integer j <= m.
[[nodiscard]] double k_m_constant(const InterarrivalDistribution& d, double mu, int m,
                                  double sigma);

struct RegimeRequest {
  /// Use the heavy-traffic estimate instead of classifying by rho.
  bool heavy = false;
  /// C for the heavy-traffic estimate; epsilon * n when absent.
  std::optional<double> C;
  double heavy_threshold = kHeavyTrafficThreshold;
};

/// Regime of the model and the constants its estimate needs. Moments use
/// the scale m mu.
[[nodiscard]] AsymptoticRegime classify(const QueueModel& model, const RegimeRequest& request = {});

/// Large-n estimate of the loss probability for a fixed model:
///   overloaded:  (rho - 1) / rho
///   critical:    rho2 / (2n)
///   underloaded: K_m [1 + m mu lst'(m mu - m mu sigma)] sigma^n
[[nodiscard]] LossResult theorem1_estimate(const QueueModel& model, const AsymptoticRegime& regime);

/// epsilon / (exp(2C / rho2) - 1), written with expm1.
[[nodiscard]] double heavy_traffic_main_term(double rho2, double epsilon, double C);
/// rho2 / (2n).
[[nodiscard]] double critical_main_term(double rho2, int n);

/// Heavy-traffic estimate with C = epsilon * n.
[[nodiscard]] double theorem2_estimate(double rho2, double epsilon, int n,
                                       double threshold = kHeavyTrafficThreshold);
/// Same with C given explicitly.
[[nodiscard]] double theorem2_estimate(double rho2, double epsilon, int n, double C,
                                       double threshold);

/// Dispatches on the request: theorem1_estimate for classified regimes,
/// theorem2_estimate for heavy traffic. n comes from the model.
[[nodiscard]] LossResult asymptotic_estimate(const QueueModel& model,
                                             const RegimeRequest& request = {});

enum class TakacsCase { bounded, linear, geometric };

struct TakacsLimits {
  /// Factorial moments sum_j j(j-1)...(j-i+1) f_j, i = 1..3.
  std::array<double, 3> gamma{};
  /// Whether the truncated moment settled (last half of f changes it by
  /// less than 1e-10 relative).
  std::array<bool, 3> converged{};
  TakacsCase limit_case = TakacsCase::bounded;
  /// Least root of z = f(z) in (0, 1) and f' there, when gamma_1 > 1.
  std::optional<double> delta;
  std::optional<double> f_prime_delta;
  std::string limit_description;

  /// Predicted limit of Q_n (bounded), Q_n / n (linear) or
  /// Q_n delta^n (geometric) for the given Q_0.
  [[nodiscard]] double predicted_limit(double q0) const;
};

/// Moments, root and limiting behavior of Q_n for the recurrence driven by f.
[[nodiscard]] TakacsLimits takacs_limits(std::span<const double> f);

struct FactorialMoments {
  std::array<double, 3> gamma{};
  std::array<bool, 3> converged{};
  int terms = 0;
};

/// Factorial moments of the mixed-Poisson kernel at `rate`, from truncated
/// sums doubled until they change by less than `tolerance` relative.
[[nodiscard]] FactorialMoments kernel_factorial_moments(const InterarrivalDistribution& d,
                                                        double rate, double tolerance = 1e-10);

}  // namespace lossq
