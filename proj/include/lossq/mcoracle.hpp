#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lossq/kernel.hpp"
#include "lossq/model.hpp"
#include "lossq/result.hpp"

namespace lossq {

/// Largest chain accepted by the dense oracle.
inline constexpr int kMaxOracleStates = 10'000;

/// Queue length just before arrivals, states 0..m+n.
struct EmbeddedChain {
  int m = 1;
  int n = 0;
  /// P(i, i'): row-stochastic.
  Eigen::MatrixXd P;

  [[nodiscard]] int states() const { return static_cast<int>(P.rows()); }
  /// Largest |row sum - 1|.
  [[nodiscard]] double row_sum_error() const;
};

/// Throws NumericError when a row misses 1 by more than 1e-8.
[[nodiscard]] EmbeddedChain build_chain(const QueueModel& model);
[[nodiscard]] EmbeddedChain build_chain(const QueueModel& model, const KernelSet& kernels);

/// Solves x P = x, sum x = 1 by dense LU on the transposed system with the
/// last balance equation replaced by the normalization.
[[nodiscard]] std::vector<double> stationary_vector(const EmbeddedChain& chain);

/// p = stationary mass of the full state.
[[nodiscard]] LossResult loss_oracle(const QueueModel& model);

}  // namespace lossq
