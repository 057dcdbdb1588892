#include "lossq/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <boost/random/exponential_distribution.hpp>

#include "lossq/error.hpp"
#include "lossq/rng.hpp"

namespace lossq {

namespace {

struct Tally {
  std::int64_t losses = 0;
  std::int64_t counted = 0;
};

template <typename Draw>
Tally run_replication(const SimConfig& config, Xoshiro256& rng, Draw draw) {
  const QueueModel& model = config.model;
  const int m = model.servers;
  const int cap = model.capacity();
  const double mu = model.mu;
  boost::random::exponential_distribution<double> exp_draw(1.0);
  auto exp1 = [&] { return exp_draw(rng); };

  Tally tally;
  int count = 0;
  double budget = exp1();
  for (std::int64_t a = 0; a < config.arrivals_total; ++a) {
    const bool full = count == cap;
    if (a >= config.warmup_arrivals) {
      ++tally.counted;
      if (full) ++tally.losses;
    }
    if (!full) ++count;
    double t = draw();
    while (count > 0) {
      const double rate = std::min(count, m) * mu;
      const double need = budget / rate;
      if (need > t) {
        budget -= t * rate;
        break;
      }
      t -= need;
      --count;
      budget = exp1();
    }
  }
  return tally;
}

Tally run_replication(const SimConfig& config, Xoshiro256 rng) {
  // Constant interarrival times skip the per-arrival family dispatch.
  if (const auto* det = std::get_if<Deterministic>(&config.model.arrivals.family())) {
    return run_replication(config, rng, [a = det->a] { return a; });
  }
  return run_replication(config, rng, [&] { return config.model.arrivals.sample(rng); });
}

}  // namespace

void SimConfig::validate() const {
  model.validate();
  if (warmup_arrivals < 0) throw DomainError("warmup arrivals must be >= 0");
  if (arrivals_total <= warmup_arrivals) {
    throw DomainError("arrivals per replication must exceed the warmup");
  }
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (threads < 0) throw DomainError("threads must be >= 0");
}

SimEstimate simulate(const SimConfig& config) {
  config.validate();
  const int reps = config.replications;
  std::vector<Xoshiro256> streams;
  streams.reserve(reps);
  Xoshiro256 base(config.seed);
  for (int r = 0; r < reps; ++r) {
    streams.push_back(base);
    base.jump();
  }

  std::vector<Tally> tallies(reps);
  int workers = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, reps);
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) tallies[r] = run_replication(config, streams[r]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < reps; r = next++) tallies[r] = run_replication(config, streams[r]);
      });
    }
  }

  SimEstimate est;
  double sum = 0.0;
  for (const auto& t : tallies) {
    est.losses += t.losses;
    est.arrivals_counted += t.counted;
    const double p = static_cast<double>(t.losses) / static_cast<double>(t.counted);
    est.replication_p.push_back(p);
    sum += p;
  }
  est.p_hat = static_cast<double>(est.losses) / static_cast<double>(est.arrivals_counted);
  if (reps > 1) {
    const double mean = sum / reps;
    double ss = 0.0;
    for (double p : est.replication_p) ss += (p - mean) * (p - mean);
    est.stderr_p = std::sqrt(ss / (reps - 1) / reps);
  }
  est.ci95_halfwidth = 1.96 * est.stderr_p;
  return est;
}

std::string sim_csv_header() { return "model,p_hat,stderr,ci95,seed,arrivals"; }

std::string sim_csv_row(const SimConfig& config, const SimEstimate& estimate) {
  std::ostringstream out;
  out.precision(10);
  out << '"' << config.model.describe() << "\"," << estimate.p_hat << ',' << estimate.stderr_p
      << ',' << estimate.ci95_halfwidth << ',' << config.seed << ',' << estimate.arrivals_counted;
  return out.str();
}

}  // namespace lossq
