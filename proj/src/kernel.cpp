#include "lossq/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lossq/error.hpp"
#include "lossq/numerics.hpp"

namespace lossq {

namespace {

// Interior kernel terms are extended until the certified tail drops below
// kSeriesTail. kMaxTerms caps the work; the tail must then at least be under
// kRequiredTail.
constexpr double kSeriesTail = 1e-20;
constexpr double kRequiredTail = 1e-11;
constexpr int kMaxTerms = 2'000'000;
// Terms past this remaining mass cannot move a double-precision kernel.
constexpr double kNegligible = 1e-30;

struct InteriorSeries {
  std::vector<double> r;       // r_{0,m,l}, l = 0..L-1
  std::vector<double> suffix;  // suffix[l] >= sum_{l' >= l} r_{0,m,l'}
  double tail = 0.0;           // bound on sum_{l >= L}
};

InteriorSeries interior_series(const InterarrivalDistribution& d, double rate, int min_terms) {
  InteriorSeries s;
  double bound = 1.0;
  for (int l = 0;; ++l) {
    s.r.push_back(d.mixed_poisson_kernel(rate, l));
    if (l + 1 >= min_terms) {
      bound = d.mixed_poisson_tail_bound(rate, l);
      if (bound < kSeriesTail) break;
    }
    if (l + 1 >= kMaxTerms) {
      if (bound >= kRequiredTail) {
        throw ToleranceError("interior kernel tail " + std::to_string(bound) + " after " +
                             std::to_string(kMaxTerms) + " terms");
      }
      break;
    }
  }
  s.tail = bound;
  s.suffix.assign(s.r.size() + 1, 0.0);
  s.suffix.back() = bound;
  CompensatedSum<double> acc(bound);
  for (std::size_t l = s.r.size(); l-- > 0;) {
    acc += s.r[l];
    s.suffix[l] = acc.value();
  }
  return s;
}

// One step of the pure-death chain on 0..m uniformized at rate m mu: from
// state s a step goes to s-1 with probability s/m, else stays.
void death_step(std::vector<double>& v, int m) {
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    v[s] = v[s] * (1.0 - static_cast<double>(s) / m) + v[s + 1] * static_cast<double>(s + 1) / m;
  }
  v.back() *= 1.0 - static_cast<double>(v.size() - 1) / m;
}

// Distribution of the number of busy servers after one interarrival time
// starting from `start` <= m busy servers and no queue.
std::vector<double> death_row(const InteriorSeries& s, int m, int start) {
  std::vector<double> v(start + 1, 0.0);
  v[start] = 1.0;
  std::vector<CompensatedSum<double>> acc(start + 1);
  for (std::size_t q = 0; q < s.r.size(); ++q) {
    for (int i = 0; i <= start; ++i) acc[i] += s.r[q] * v[i];
    if (s.suffix[q + 1] < kNegligible) break;
    death_step(v, m);
  }
  std::vector<double> row(start + 1);
  for (int i = 0; i <= start; ++i) row[i] = acc[i].value();
  return row;
}

// weights[q][i]: probability of i busy servers after q uniformized steps from m.
std::vector<std::vector<double>> death_weights(const InteriorSeries& s, int m) {
  std::vector<std::vector<double>> w;
  std::vector<double> v(m + 1, 0.0);
  v[m] = 1.0;
  for (std::size_t q = 0; q < s.r.size(); ++q) {
    w.push_back(v);
    if (s.suffix[q] < kNegligible) break;
    death_step(v, m);
  }
  return w;
}

double crossing_term(const InteriorSeries& s, const std::vector<std::vector<double>>& w, int m,
                     int k, int j) {
  CompensatedSum<double> acc;
  for (std::size_t q = k; q < w.size(); ++q) {
    const std::size_t l = j + q;
    if (l >= s.r.size()) break;
    acc += w[q][m - k] * s.r[l];
    if (s.suffix[l] < kNegligible) break;
  }
  return acc.value();
}

void check_server_args(double mu, int m, int k, int k_max) {
  if (!(std::isfinite(mu) && mu > 0.0)) throw DomainError("service rate mu must be > 0");
  if (m < 1 || m > kMaxServers) throw DomainError("server count out of range");
  if (k < 0 || k > k_max) throw DomainError("kernel index k out of range");
}

}  // namespace

double phi(const InterarrivalDistribution& d, double mu, int j) {
  if (j < 1) throw DomainError("phi_j needs j >= 1");
  return d.lst(mu * j);
}

std::vector<double> c_products(std::span<const double> phi) {
  std::vector<double> comp(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) comp[i] = 1.0 - phi[i];
  auto logs = log_c_products(phi, comp);
  for (double& x : logs) x = std::exp(x);
  return logs;
}

std::vector<double> log_c_products(std::span<const double> phi,
                                   std::span<const double> phi_complement) {
  if (phi.size() != phi_complement.size()) throw DomainError("phi size mismatch");
  std::vector<double> out(phi.size() + 1, 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0 && phi_complement[i] > 0.0)) {
      throw DomainError("phi_j must lie strictly inside (0, 1)");
    }
    out[i + 1] = out[i] + std::log(phi_complement[i]) - std::log(phi[i]);
  }
  return out;
}

double boundary_kernel_n0(const InterarrivalDistribution& d, double mu, int m, int k) {
  check_server_args(mu, m, k, m);
  CompensatedSum<double> acc;
  for (int i = 0; i <= k; ++i) {
    const int s = m - k + i;
    const double phis = s == 0 ? 1.0 : d.lst(mu * s);
    acc += ((i % 2 == 0) ? 1.0 : -1.0) * binomial(k, i) * phis;
  }
  return binomial(m, k) * acc.value();
}

double boundary_kernel(const InterarrivalDistribution& d, double mu, int m, int k, int j) {
  check_server_args(mu, m, k, m);
  if (k < 1) throw DomainError("boundary kernel needs k >= 1");
  if (j < 0) throw DomainError("boundary kernel needs j >= 0");
  const InteriorSeries s = interior_series(d, m * mu, j + 1);
  if (j == 0) return death_row(s, m, m)[m - k];
  return crossing_term(s, death_weights(s, m), m, k, j);
}

double KernelSet::crossing(int k, int j) const {
  if (k < 1 || k > m || j < 0 || j > n) throw DomainError("crossing index out of range");
  return k == m ? to_empty[j] : boundary[k - 1][j];
}

std::vector<double> KernelSet::transition_row(int post_state) const {
  const int cap = m + n;
  if (post_state < 1 || post_state > cap) throw DomainError("post-arrival state out of range");
  std::vector<double> row(cap + 1, 0.0);
  if (post_state <= m) {
    std::copy(death[post_state].begin(), death[post_state].end(), row.begin());
    return row;
  }
  const int j = post_state - m;
  for (int l = 0; l <= j; ++l) row[post_state - l] = interior[l];
  for (int k = 1; k <= m; ++k) row[m - k] = crossing(k, j);
  return row;
}

double KernelSet::defective_row_sum(int j) const {
  if (j < 0 || j > n) throw DomainError("row index out of range");
  CompensatedSum<double> acc;
  for (int l = 0; l <= j; ++l) acc += interior[l];
  for (int k = 1; k < m; ++k) acc += boundary[k - 1][j];
  return acc.value();
}

KernelSet build_kernel_set(const QueueModel& model) {
  model.validate();
  const int m = model.servers;
  const int n = model.buffer;
  const double mu = model.mu;
  const auto& d = model.arrivals;

  KernelSet ks;
  ks.m = m;
  ks.n = n;
  ks.mu = mu;

  const InteriorSeries s = interior_series(d, m * mu, n + 1);
  ks.interior.assign(s.r.begin(), s.r.begin() + n + 1);
  ks.interior_tail = s.suffix[n + 1];

  ks.death.resize(m + 1);
  ks.death[0] = {1.0};
  for (int i = 1; i <= m; ++i) ks.death[i] = death_row(s, m, i);

  const auto w = death_weights(s, m);
  ks.boundary.assign(m - 1, std::vector<double>(n + 1, 0.0));
  ks.to_empty.assign(n + 1, 0.0);
  for (int k = 1; k <= m; ++k) {
    auto& target = k == m ? ks.to_empty : ks.boundary[k - 1];
    target[0] = ks.death[m][m - k];
    for (int j = 1; j <= n; ++j) target[j] = crossing_term(s, w, m, k, j);
  }

  ks.phi.resize(m);
  ks.phi_complement.resize(m);
  for (int j = 1; j <= m; ++j) {
    ks.phi[j - 1] = d.lst(mu * j);
    ks.phi_complement[j - 1] = d.lst_complement(mu * j);
  }
  ks.cprod = log_c_products(ks.phi, ks.phi_complement);
  for (double& x : ks.cprod) x = std::exp(x);
  return ks;
}

}  // namespace lossq
