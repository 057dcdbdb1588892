#include "lossq/model.hpp"

#include <cmath>
#include <sstream>

#include "lossq/error.hpp"

namespace lossq {

void QueueModel::validate() const {
  if (servers < 1) throw DomainError("number of servers m must be >= 1");
  if (servers > kMaxServers) {
    throw DomainError("number of servers m must be <= " + std::to_string(kMaxServers));
  }
  if (buffer < 0) throw DomainError("number of waiting places n must be >= 0");
  if (!(std::isfinite(mu) && mu > 0.0)) throw DomainError("service rate mu must be > 0");
}

std::string QueueModel::describe() const {
  std::ostringstream out;
  out << "GI/M/" << servers << "/" << buffer << " [" << arrivals.spec() << ", mu=" << mu
      << ", rho=" << load() << "]";
  return out.str();
}

QueueModel QueueModel::with_load(const InterarrivalDistribution& shape, int servers, int buffer,
                                 double mu, double rho) {
  if (!(std::isfinite(rho) && rho > 0.0)) throw DomainError("load rho must be > 0");
  QueueModel model{servers, buffer, mu, shape};
  model.validate();
  model.arrivals = shape.with_mean(1.0 / (rho * servers * mu));
  return model;
}

}  // namespace lossq
