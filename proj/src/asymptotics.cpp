#include "lossq/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "lossq/error.hpp"
#include "lossq/kernel.hpp"
#include "lossq/numerics.hpp"

namespace lossq {

namespace {

// 1 - sigma for rho < 1, 0 otherwise. Roots w of w = 1 - lst(m mu w): w = 0
// always; a second one in (0, 1) exists exactly when rho < 1, with
// G(w) = lst_complement(m mu w) - w positive just right of 0 and G(1) < 0.
double sigma_complement(const InterarrivalDistribution& d, double mu, int m) {
  if (!(std::isfinite(mu) && mu > 0.0)) throw DomainError("service rate mu must be > 0");
  if (m < 1) throw DomainError("server count must be >= 1");
  const double rate = m * mu;
  const double rho = d.arrival_rate() / rate;
  if (rho >= 1.0 - kCriticalBand) return 0.0;
  auto g = [&](double w) { return d.lst_complement(rate * w) - w; };
  double lo = 0.5;
  while (!(g(lo) > 0.0)) {
    lo *= 0.5;
    if (lo < 1e-300) throw BracketError("no sign change for the root below 1");
  }
  const double hi = lo == 0.5 ? 1.0 : 2.0 * lo;
  RootOptions opt;
  opt.bisection_width = 1e-8 * hi;
  opt.tolerance = 1e-16 * hi;
  return bracketed_root(g, lo, hi, opt);
}

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

double horner(std::span<const double> f, double z) {
  double acc = 0.0;
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * z + f[i];
  return acc;
}

double horner_derivative(std::span<const double> f, double z) {
  double acc = 0.0;
  for (std::size_t i = f.size(); i-- > 1;) acc = acc * z + static_cast<double>(i) * f[i];
  return acc;
}

// Factorial moments of f over indices [0, end).
std::array<double, 3> factorial_moments(std::span<const double> f, std::size_t end) {
  std::array<CompensatedSum<double>, 3> acc;
  for (std::size_t j = 1; j < end; ++j) {
    const double x = static_cast<double>(j);
    acc[0] += x * f[j];
    acc[1] += x * (x - 1.0) * f[j];
    acc[2] += x * (x - 1.0) * (x - 2.0) * f[j];
  }
  return {acc[0].value(), acc[1].value(), acc[2].value()};
}

}  // namespace

double sigma_root(const InterarrivalDistribution& d, double mu, int m) {
  return 1.0 - sigma_complement(d, mu, m);
}

double sigma_root(const QueueModel& model) {
  model.validate();
  return sigma_root(model.arrivals, model.mu, model.servers);
}

double k_m_constant(const InterarrivalDistribution& d, double mu, int m, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("K_m needs sigma in (0, 1)");
  std::vector<double> phi(m), comp(m);
  for (int j = 1; j <= m; ++j) {
    phi[j - 1] = d.lst(mu * j);
    comp[j - 1] = d.lst_complement(mu * j);
  }
  const auto logc = log_c_products(phi, comp);
  const double w = 1.0 - sigma;
  CompensatedSum<double> sum;
  for (int j = 1; j <= m; ++j) {
    const double denom = m * w - j;
    if (std::abs(denom) < 1e-12) {
      throw SingularityError("K_m denominator m(1 - sigma) - " + std::to_string(j) +
                             " vanishes");
    }
    const double c = binomial(m, j) * std::exp(logc[j]) / comp[j - 1];
    sum += c * (m * comp[j - 1] - j) / denom;
  }
  const double k = 1.0 / (1.0 + w * sum.value());
  if (!std::isfinite(k) || !(k > 0.0)) throw NumericError("K_m is not a positive finite number");
  return k;
}

AsymptoticRegime classify(const QueueModel& model, const RegimeRequest& request) {
  model.validate();
  const int m = model.servers;
  const double rho = model.load();
  const MomentSet ms = model.arrivals.moments(m * model.mu);
  AsymptoticRegime r;
  r.rho2 = ms.rho2;
  r.rho3 = ms.rho3;
  if (request.heavy) {
    const double eps = 1.0 - rho;
    if (!(eps > 0.0)) throw DomainError("heavy-traffic estimate needs rho < 1");
    r.kind = RegimeKind::heavy_traffic;
    r.epsilon = eps;
    r.C = request.C.value_or(eps * model.buffer);
    if (*r.C < 0.0) throw DomainError("C must be >= 0");
    return r;
  }
  if (std::abs(rho - 1.0) < kCriticalBand) {
    r.kind = RegimeKind::critical;
  } else if (rho > 1.0) {
    r.kind = RegimeKind::overloaded;
  } else {
    r.kind = RegimeKind::underloaded;
    const double sigma = sigma_root(model.arrivals, model.mu, m);
    r.sigma_m = sigma;
    r.k_m = k_m_constant(model.arrivals, model.mu, m, sigma);
  }
  return r;
}

double heavy_traffic_main_term(double rho2, double epsilon, double C) {
  if (!(rho2 > 0.0) || !(epsilon > 0.0) || !(C > 0.0)) {
    throw DomainError("heavy-traffic term needs rho2, epsilon, C > 0");
  }
  return epsilon / std::expm1(2.0 * C / rho2);
}

double critical_main_term(double rho2, int n) {
  if (!std::isfinite(rho2)) throw NumericError("rho2 is infinite");
  if (n < 1) throw DomainError("critical estimate needs n >= 1");
  return rho2 / (2.0 * n);
}

double theorem2_estimate(double rho2, double epsilon, int n, double threshold) {
  return theorem2_estimate(rho2, epsilon, n, epsilon * n, threshold);
}

double theorem2_estimate(double rho2, double epsilon, int n, double C, double threshold) {
  if (C > threshold) return heavy_traffic_main_term(rho2, epsilon, C);
  return critical_main_term(rho2, n);
}

LossResult theorem1_estimate(const QueueModel& model, const AsymptoticRegime& regime) {
  model.validate();
  const int n = model.buffer;
  LossResult out;
  out.method = Method::asymptotic;
  out.diagnostics.regime = regime;
  switch (regime.kind) {
    case RegimeKind::overloaded: {
      const double rho = model.load();
      out.p = (rho - 1.0) / rho;
      out.diagnostics.formula = "overload limit (rho-1)/rho";
      break;
    }
    case RegimeKind::critical:
      out.p = critical_main_term(regime.rho2, n);
      out.diagnostics.formula = "critical rho2/(2n)";
      break;
    case RegimeKind::underloaded: {
      if (!regime.sigma_m || !regime.k_m) throw DomainError("underloaded regime lacks sigma or K");
      const double rate = model.servers * model.mu;
      const double w = 1.0 - *regime.sigma_m;
      const double slope = 1.0 + rate * model.arrivals.lst_derivative(rate * w);
      if (!(slope > 0.0)) throw NumericError("geometric prefactor is not positive");
      out.p = std::exp(std::log(*regime.k_m * slope) + n * std::log1p(-w));
      out.diagnostics.formula = "geometric K_m[1+m mu lst'(m mu(1-sigma))] sigma^n";
      break;
    }
    case RegimeKind::heavy_traffic:
      throw DomainError("heavy-traffic regime needs theorem2_estimate");
  }
  out.diagnostics.pi_log = -std::log(out.p);
  return out;
}

LossResult asymptotic_estimate(const QueueModel& model, const RegimeRequest& request) {
  const AsymptoticRegime regime = classify(model, request);
  if (regime.kind != RegimeKind::heavy_traffic) return theorem1_estimate(model, regime);
  LossResult out;
  out.method = Method::asymptotic;
  out.diagnostics.regime = regime;
  const double C = *regime.C;
  if (C > request.heavy_threshold) {
    out.p = heavy_traffic_main_term(regime.rho2, *regime.epsilon, C);
    out.diagnostics.formula = "heavy traffic eps/(exp(2C/rho2)-1)";
  } else {
    out.p = critical_main_term(regime.rho2, model.buffer);
    out.diagnostics.formula = "heavy traffic rho2/(2n)";
  }
  out.diagnostics.pi_log = -std::log(out.p);
  return out;
}

double TakacsLimits::predicted_limit(double q0) const {
  switch (limit_case) {
    case TakacsCase::bounded:
      return q0 / (1.0 - gamma[0]);
    case TakacsCase::linear:
      return 2.0 * q0 / gamma[1];
    case TakacsCase::geometric:
      return q0 / (1.0 - *f_prime_delta);
  }
  return 0.0;
}

TakacsLimits takacs_limits(std::span<const double> f) {
  if (f.empty() || !(f[0] > 0.0)) throw DomainError("kernel needs f_0 > 0");
  const double mass = stable_sum(f);
  if (std::abs(mass - 1.0) > 1e-8) {
    throw DomainError("kernel mass " + format_number(mass) + " is not 1");
  }
  TakacsLimits out;
  out.gamma = factorial_moments(f, f.size());
  const auto half = factorial_moments(f, (f.size() + 1) / 2);
  for (int i = 0; i < 3; ++i) {
    out.converged[i] = std::abs(out.gamma[i] - half[i]) <= 1e-10 * std::max(1.0, out.gamma[i]);
  }

  const double g1 = out.gamma[0];
  if (std::abs(g1 - 1.0) < 1e-10) {
    out.limit_case = TakacsCase::linear;
    out.limit_description = "gamma1 = 1: Q_n / n -> 2 Q_0 / gamma2 = " +
                            format_number(2.0 / out.gamma[1]) + " Q_0";
  } else if (g1 < 1.0) {
    out.limit_case = TakacsCase::bounded;
    out.limit_description =
        "gamma1 < 1: Q_n -> Q_0 / (1 - gamma1) = " + format_number(1.0 / (1.0 - g1)) + " Q_0";
  } else {
    out.limit_case = TakacsCase::geometric;
    // f(z) - z is convex with a root at 1 and slope gamma1 - 1 > 0 there, so
    // it is negative just below 1 and positive at 0.
    auto g = [&](double z) { return horner(f, z) - z; };
    double h = 0.5;
    while (!(g(1.0 - h) < 0.0)) {
      h *= 0.5;
      if (h < 1e-15) throw BracketError("no sign change for z = f(z) below 1");
    }
    const double delta = bracketed_root(g, 0.0, 1.0 - h);
    out.delta = delta;
    out.f_prime_delta = horner_derivative(f, delta);
    out.limit_description = "gamma1 > 1: Q_n delta^n -> Q_0 / (1 - f'(delta)), delta = " +
                            format_number(delta);
  }
  return out;
}

FactorialMoments kernel_factorial_moments(const InterarrivalDistribution& d, double rate,
                                          double tolerance) {
  if (!(rate > 0.0)) throw DomainError("kernel rate must be > 0");
  std::vector<double> f;
  std::array<double, 3> prev{};
  FactorialMoments out;
  for (int terms = 64; terms <= (1 << 22); terms *= 2) {
    for (int j = static_cast<int>(f.size()); j < terms; ++j) f.push_back(d.mixed_poisson_kernel(rate, j));
    out.gamma = factorial_moments(f, f.size());
    out.terms = terms;
    bool all = terms > 64;
    for (int i = 0; i < 3; ++i) {
      out.converged[i] =
          terms > 64 && std::abs(out.gamma[i] - prev[i]) <= tolerance * std::max(1.0, out.gamma[i]);
      all = all && out.converged[i];
    }
    if (all) break;
    prev = out.gamma;
  }
  return out;
}

}  // namespace lossq
