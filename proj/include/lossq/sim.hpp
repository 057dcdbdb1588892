#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lossq/model.hpp"

namespace lossq {

struct SimConfig {
  QueueModel model;
  /// Arrivals per replication, warmup included.
  std::int64_t arrivals_total = 10'000'000;
  std::int64_t warmup_arrivals = 100'000;
  int replications = 20;
  std::uint64_t seed = 20240101;
  /// Worker threads; 0 picks the hardware concurrency. Results do not
  /// depend on it.
  int threads = 0;

  /// Throws DomainError on an invalid combination.
  void validate() const;
};

struct SimEstimate {
  double p_hat = 0.0;
  /// Standard error of p_hat across replications.
  double stderr_p = 0.0;
  double ci95_halfwidth = 0.0;
  std::int64_t losses = 0;
  std::int64_t arrivals_counted = 0;
  std::vector<double> replication_p;
};

/// Loss fraction over independent replications, each starting empty and
/// discarding its warmup arrivals.
///
/// Replication r draws from the stream `seed` advanced by r xoshiro jumps.
/// Service completions come from one unit-rate exponential hazard budget
/// spent at the current total service rate, so each departure costs one
/// draw and no event calendar is needed.
[[nodiscard]] SimEstimate simulate(const SimConfig& config);

[[nodiscard]] std::string sim_csv_header();
[[nodiscard]] std::string sim_csv_row(const SimConfig& config, const SimEstimate& estimate);

}  // namespace lossq
