#pragma once

#include <span>
#include <vector>

#include "lossq/kernel.hpp"
#include "lossq/model.hpp"
#include "lossq/result.hpp"

namespace lossq {

/// Q_0..Q_H of a convolution recurrence, stored as values[j] * exp(log_scale[j]).
struct PiSequence {
  std::vector<double> values;
  std::vector<double> log_scale;
  /// Horizon H of the solve.
  int series_n = 0;
  bool extended_precision = false;

  [[nodiscard]] double log_value(int j) const;
  /// exp(log_value(j)); may overflow to infinity.
  [[nodiscard]] double value(int j) const;
};

struct SolveOptions {
  /// Repeat the solve in long double and keep that pass when the two disagree
  /// by more than 1e-9 relative.
  bool extended_check = true;
};

/// Forward solve of Q_j = sum_{i=0}^{j} f_i Q_{j-i+1} with Q_0 = q0:
/// Q_{j+1} = (Q_j - sum_{i=1}^{j} f_i Q_{j-i+1}) / f_0, for j = 0..horizon-1.
/// Entries of f past its end are zero.
///
/// Requires f_0 > 0, f_i >= 0, sum f <= 1 + 1e-10. Throws InstabilityError
/// if some Q_j comes out nonpositive.
[[nodiscard]] PiSequence solve_generic(std::span<const double> f, double q0, int horizon,
                                       const SolveOptions& options = {});

/// GI/M/1/n: p = 1/Q_{n+1} with Q built from the interior kernel at rate mu.
[[nodiscard]] LossResult loss_gim1n(const QueueModel& model);

/// GI/M/m/0: p = 1 / sum_i C(m,i) C_i.
[[nodiscard]] LossResult loss_gimm0(const QueueModel& model);

/// GI/M/m/n for any m, n. Uses the m = 1 and n = 0 paths where they apply,
/// otherwise the stationary cut chain below.
[[nodiscard]] LossResult loss_gimmn(const QueueModel& model);
[[nodiscard]] LossResult loss_gimmn(const QueueModel& model, const KernelSet& kernels);

/// Loss probability from the cut chain alone, for any m and n.
[[nodiscard]] LossResult loss_cut_chain(const QueueModel& model, const KernelSet& kernels);

/// Arrival-stationary queue length for GI/M/1/n, states 0..n+1, from
/// differences of the Q sequence.
[[nodiscard]] std::vector<double> stationary_gim1n(const QueueModel& model);

/// Arrival-stationary queue length for GI/M/m/n, states 0..m+n.
[[nodiscard]] std::vector<double> stationary_gimmn(const QueueModel& model);
[[nodiscard]] std::vector<double> stationary_gimmn(const QueueModel& model,
                                                   const KernelSet& kernels);

}  // namespace lossq
