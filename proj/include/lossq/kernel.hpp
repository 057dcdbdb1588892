#pragma once

#include <span>
#include <vector>

#include "lossq/dist.hpp"
#include "lossq/model.hpp"

namespace lossq {

/// phi_j: probability that j busy servers all stay busy through one
/// interarrival time, lst(mu * j). Requires j >= 1.
[[nodiscard]] double phi(const InterarrivalDistribution& d, double mu, int j);

/// C_0..C_m from phi_1..phi_m, where C_j = prod_{i<=j} (1 - phi_i) / phi_i.
[[nodiscard]] std::vector<double> c_products(std::span<const double> phi);

/// log C_0..log C_m. Takes 1 - phi_i separately so that phi_i close to 1
/// does not cost precision; the log form cannot overflow.
[[nodiscard]] std::vector<double> log_c_products(std::span<const double> phi,
                                                 std::span<const double> phi_complement);

/// Probability that k of m busy servers finish during one interarrival time
/// (no queue): C(m,k) * integral of (1 - e^{-mu x})^k e^{-(m-k) mu x} dA(x),
/// as the finite alternating sum of LST values.
[[nodiscard]] double boundary_kernel_n0(const InterarrivalDistribution& d, double mu, int m, int k);

/// Probability that a system holding m + j customers (m busy, j waiting,
/// j >= 1) drops to m - k during one interarrival time, 1 <= k <= m.
///
/// Evaluated as sum_{q >= k} P(k distinct of m servers hit by q uniformized
/// events) * r_{0,m,j+q}. Every term is nonnegative; the series is truncated
/// with a certified tail below 1e-11 or ToleranceError is thrown.
[[nodiscard]] double boundary_kernel(const InterarrivalDistribution& d, double mu, int m, int k,
                                     int j);

/// Transition kernels of the GI/M/m/n queue between arrival epochs.
///
/// Post-arrival state i (customers just after an arrival) moves to pre-arrival
/// state i' (customers just before the next arrival) with probability:
///   * i > m, i' >= m:      interior[i - i']                     (all m busy)
///   * i = m + j, i' = m-k: crossing(k, j), k = 1..m             (queue empties)
///   * i <= m:              death[i][i']                         (pure death)
struct KernelSet {
  int m = 1;
  int n = 0;
  double mu = 1.0;
  /// r_{0,m,j}, j = 0..n.
  std::vector<double> interior;
  /// boundary[k-1][j] = r_{k,m-k,j}, k = 1..m-1, j = 0..n. Empty when m = 1.
  std::vector<std::vector<double>> boundary;
  /// r_{m,0,j}: m + j customers, all gone by the next arrival. j = 0..n.
  std::vector<double> to_empty;
  /// phi[j-1] = phi_j, j = 1..m.
  std::vector<double> phi;
  std::vector<double> phi_complement;
  /// C_0..C_m.
  std::vector<double> cprod;
  /// death[i][i'] for post-arrival states i = 0..m.
  std::vector<std::vector<double>> death;
  /// Certified bound on sum_{l > n} r_{0,m,l}.
  double interior_tail = 0.0;

  /// r_{k,m-k,j}, k = 1..m, j = 0..n.
  [[nodiscard]] double crossing(int k, int j) const;

  /// Distribution over pre-arrival states 0..m+n given the post-arrival
  /// state (1..m+n).
  [[nodiscard]] std::vector<double> transition_row(int post_state) const;

  /// sum_{l<=j} r_{0,m,l} + sum_{k=1}^{m-1} r_{k,m-k,j}: the row of the
  /// kernel without transitions into the empty state.
  [[nodiscard]] double defective_row_sum(int j) const;
};

[[nodiscard]] KernelSet build_kernel_set(const QueueModel& model);

}  // namespace lossq
