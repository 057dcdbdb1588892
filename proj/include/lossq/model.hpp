#pragma once

#include <string>

#include "lossq/dist.hpp"

namespace lossq {

/// Largest server count accepted. Alternating binomial sums over the servers
/// lose precision quickly beyond this.
inline constexpr int kMaxServers = 16;

/// A GI/M/m/n loss system: `servers` exponential servers of rate `mu` each,
/// `buffer` waiting places, renewal arrivals with the given interarrival law.
/// An arrival finding servers + buffer customers present is lost.
struct QueueModel {
  int servers = 1;
  int buffer = 0;
  double mu = 1.0;
  InterarrivalDistribution arrivals = InterarrivalDistribution::exponential(1.0);

  [[nodiscard]] double lambda() const { return arrivals.arrival_rate(); }
  /// rho = lambda / (m mu).
  [[nodiscard]] double load() const { return lambda() / (servers * mu); }
  /// m + n, the largest number of customers the system holds.
  [[nodiscard]] int capacity() const { return servers + buffer; }

  /// Throws DomainError when a field is out of range.
  void validate() const;

  [[nodiscard]] std::string describe() const;

  /// Model whose interarrival law is `shape` rescaled so that the load is rho.
  static QueueModel with_load(const InterarrivalDistribution& shape, int servers, int buffer,
                              double mu, double rho);
};

}  // namespace lossq
