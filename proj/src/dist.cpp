#include "lossq/dist.hpp"

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "lossq/error.hpp"
#include "lossq/numerics.hpp"

namespace lossq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_nonnegative_s(double s) {
  if (!(s >= 0.0) || std::isnan(s)) {
    throw DomainError("transform argument must be >= 0, got " + std::to_string(s));
  }
}

// Gamma(shape, rate) pieces shared by the Erlang and Gamma families.
double gamma_lst(double shape, double rate, double s) { return std::exp(-shape * std::log1p(s / rate)); }

double gamma_kernel(double shape, double rate, double poisson_rate, int j, double log_coeff) {
  // Negative binomial pmf: C * (rate/(rate+r))^shape * (r/(rate+r))^j.
  const double log_p = -std::log1p(poisson_rate / rate);
  const double log_q = -std::log1p(rate / poisson_rate);
  return std::exp(log_coeff + shape * log_p + j * log_q);
}

double erlang_log_coeff(int k, int j) {
  // log C(k + j - 1, j), summed as a short product for the common small k.
  if (k <= 64) {
    double acc = 0.0;
    for (int i = 1; i < k; ++i) acc += std::log1p(static_cast<double>(j) / i);
    return acc;
  }
  return std::lgamma(k + j) - std::lgamma(k) - std::lgamma(j + 1.0);
}

double gamma_tail_bound(double shape, double rate, double poisson_rate, int j, double next) {
  const double q = poisson_rate / (rate + poisson_rate);
  const double ratio = std::max(q, (shape + j + 1) / (j + 2.0) * q);
  if (ratio >= 1.0) return 1.0;
  return next / (1.0 - ratio);
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

constexpr double kTailMass = 1e-18;

// Integral of g against a Gamma(shape, rate) density, split at quantiles so
// narrow peaks of large-shape densities are never straddled by one panel.
double integrate_gamma(double shape, double rate, const std::function<double(double)>& g) {
  using boost::math::quadrature::gauss_kronrod;
  const boost::math::gamma_distribution<double> dist(shape, 1.0 / rate);
  const double upper = boost::math::quantile(boost::math::complement(dist, kTailMass));
  constexpr unsigned kDepth = 10;
  constexpr double kTol = 1e-13;

  if (shape < 1.0) {
    // x = t^(1/shape) removes the x^(shape-1) singularity at the origin.
    const double log_norm = shape * std::log(rate) - std::lgamma(shape + 1.0);
    auto f = [&](double t) {
      if (t <= 0.0) return g(0.0) * std::exp(log_norm);
      const double x = std::pow(t, 1.0 / shape);
      return g(x) * std::exp(log_norm - rate * x);
    };
    const double t_upper = std::pow(upper, shape);
    const double t_mid = std::pow(boost::math::quantile(dist, 0.5), shape);
    return gauss_kronrod<double, 31>::integrate(f, 0.0, t_mid, kDepth, kTol) +
           gauss_kronrod<double, 31>::integrate(f, t_mid, t_upper, kDepth, kTol);
  }

  const double log_norm = shape * std::log(rate) - std::lgamma(shape);
  auto f = [&](double x) {
    if (x <= 0.0) return shape == 1.0 ? g(0.0) * std::exp(log_norm) : 0.0;
    return g(x) * std::exp(log_norm + (shape - 1.0) * std::log(x) - rate * x);
  };
  const double breaks[] = {0.0,
                           boost::math::quantile(dist, 0.01),
                           boost::math::quantile(dist, 0.5),
                           boost::math::quantile(dist, 0.99),
                           upper};
  CompensatedSum<double> acc;
  for (int i = 0; i + 1 < 5; ++i) {
    acc += gauss_kronrod<double, 31>::integrate(f, breaks[i], breaks[i + 1], kDepth, kTol);
  }
  return acc.value();
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DomainError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  while (true) {
    const auto bar = text.find('|');
    out.push_back(parse_number(text.substr(0, bar), what));
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return out;
}

}  // namespace

InterarrivalDistribution::InterarrivalDistribution(Family family) : family_(std::move(family)) {
  std::visit(
      Overloaded{
          [](const Deterministic& d) {
            if (!positive_finite(d.a)) throw DomainError("deterministic interarrival a must be > 0");
          },
          [](const Exponential& d) {
            if (!positive_finite(d.rate)) throw DomainError("exponential rate must be > 0");
          },
          [](const Erlang& d) {
            if (d.k < 1) throw DomainError("erlang k must be >= 1");
            if (!positive_finite(d.rate)) throw DomainError("erlang rate must be > 0");
          },
          [](Hyperexponential& d) {
            if (d.weights.empty() || d.weights.size() != d.rates.size()) {
              throw DomainError("hyperexponential needs equally many weights and rates");
            }
            for (double w : d.weights) {
              if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("hyperexponential weights must be >= 0");
            }
            for (double r : d.rates) {
              if (!positive_finite(r)) throw DomainError("hyperexponential rates must be > 0");
            }
            const double total = stable_sum<double>(d.weights);
            if (std::abs(total - 1.0) > 1e-12) {
              throw DomainError("hyperexponential weights must sum to 1, got " + format_double(total));
            }
            for (double& w : d.weights) w /= total;
          },
          [](const Gamma& d) {
            if (!positive_finite(d.shape)) throw DomainError("gamma shape must be > 0");
            if (!positive_finite(d.rate)) throw DomainError("gamma rate must be > 0");
          },
      },
      family_);
}

InterarrivalDistribution InterarrivalDistribution::deterministic(double a) {
  return InterarrivalDistribution(Deterministic{a});
}
InterarrivalDistribution InterarrivalDistribution::exponential(double rate) {
  return InterarrivalDistribution(Exponential{rate});
}
InterarrivalDistribution InterarrivalDistribution::erlang(int k, double rate) {
  return InterarrivalDistribution(Erlang{k, rate});
}
InterarrivalDistribution InterarrivalDistribution::hyperexponential(std::vector<double> weights,
                                                                    std::vector<double> rates) {
  return InterarrivalDistribution(Hyperexponential{std::move(weights), std::move(rates)});
}
InterarrivalDistribution InterarrivalDistribution::gamma(double shape, double rate) {
  return InterarrivalDistribution(Gamma{shape, rate});
}

std::string_view InterarrivalDistribution::family_name() const {
  return std::visit(Overloaded{
                        [](const Deterministic&) { return std::string_view("det"); },
                        [](const Exponential&) { return std::string_view("exp"); },
                        [](const Erlang&) { return std::string_view("erlang"); },
                        [](const Hyperexponential&) { return std::string_view("hyper"); },
                        [](const Gamma&) { return std::string_view("gamma"); },
                    },
                    family_);
}

double InterarrivalDistribution::mean() const { return raw_moment(1); }

double InterarrivalDistribution::raw_moment(int k) const {
  if (k < 0) throw DomainError("moment order must be >= 0");
  auto factorial = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) { return std::pow(d.a, k); },
          [&](const Exponential& d) { return factorial(k) / std::pow(d.rate, k); },
          [&](const Erlang& d) {
            double out = 1.0;
            for (int i = 0; i < k; ++i) out *= (d.k + i) / d.rate;
            return out;
          },
          [&](const Hyperexponential& d) {
            CompensatedSum<double> acc;
            for (std::size_t i = 0; i < d.weights.size(); ++i) {
              acc += d.weights[i] * factorial(k) / std::pow(d.rates[i], k);
            }
            return acc.value();
          },
          [&](const Gamma& d) {
            double out = 1.0;
            for (int i = 0; i < k; ++i) out *= (d.shape + i) / d.rate;
            return out;
          },
      },
      family_);
}

double InterarrivalDistribution::lst(double s) const {
  require_nonnegative_s(s);
  return std::visit(Overloaded{
                        [&](const Deterministic& d) { return std::exp(-s * d.a); },
                        [&](const Exponential& d) { return d.rate / (d.rate + s); },
                        [&](const Erlang& d) { return gamma_lst(d.k, d.rate, s); },
                        [&](const Hyperexponential& d) {
                          CompensatedSum<double> acc;
                          for (std::size_t i = 0; i < d.weights.size(); ++i) {
                            acc += d.weights[i] * d.rates[i] / (d.rates[i] + s);
                          }
                          return acc.value();
                        },
                        [&](const Gamma& d) { return gamma_lst(d.shape, d.rate, s); },
                    },
                    family_);
}

double InterarrivalDistribution::lst_complement(double s) const {
  require_nonnegative_s(s);
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) { return -std::expm1(-s * d.a); },
          [&](const Exponential& d) { return s / (d.rate + s); },
          [&](const Erlang& d) { return -std::expm1(-d.k * std::log1p(s / d.rate)); },
          [&](const Hyperexponential& d) {
            CompensatedSum<double> acc;
            for (std::size_t i = 0; i < d.weights.size(); ++i) {
              acc += d.weights[i] * s / (d.rates[i] + s);
            }
            return acc.value();
          },
          [&](const Gamma& d) { return -std::expm1(-d.shape * std::log1p(s / d.rate)); },
      },
      family_);
}

double InterarrivalDistribution::lst_derivative(double s) const {
  require_nonnegative_s(s);
  return std::visit(Overloaded{
                        [&](const Deterministic& d) { return -d.a * std::exp(-s * d.a); },
                        [&](const Exponential& d) {
                          const double den = d.rate + s;
                          return -d.rate / (den * den);
                        },
                        [&](const Erlang& d) { return -d.k / (d.rate + s) * gamma_lst(d.k, d.rate, s); },
                        [&](const Hyperexponential& d) {
                          CompensatedSum<double> acc;
                          for (std::size_t i = 0; i < d.weights.size(); ++i) {
                            const double den = d.rates[i] + s;
                            acc += -d.weights[i] * d.rates[i] / (den * den);
                          }
                          return acc.value();
                        },
                        [&](const Gamma& d) {
                          return -d.shape / (d.rate + s) * gamma_lst(d.shape, d.rate, s);
                        },
                    },
                    family_);
}

double InterarrivalDistribution::mixed_poisson_kernel(double rate, int j) const {
  if (!positive_finite(rate)) throw DomainError("kernel rate must be > 0");
  if (j < 0) throw DomainError("kernel index must be >= 0");
  if (j == 0) return lst(rate);
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) {
            const double x = rate * d.a;
            return std::exp(j * std::log(x) - x - std::lgamma(j + 1.0));
          },
          [&](const Exponential& d) {
            const double den = d.rate + rate;
            return d.rate / den * std::pow(rate / den, j);
          },
          [&](const Erlang& d) { return gamma_kernel(d.k, d.rate, rate, j, erlang_log_coeff(d.k, j)); },
          [&](const Hyperexponential& d) {
            CompensatedSum<double> acc;
            for (std::size_t i = 0; i < d.weights.size(); ++i) {
              const double den = d.rates[i] + rate;
              acc += d.weights[i] * d.rates[i] / den * std::pow(rate / den, j);
            }
            return acc.value();
          },
          [&](const Gamma& d) {
            const double log_coeff = std::lgamma(d.shape + j) - std::lgamma(d.shape) - std::lgamma(j + 1.0);
            return gamma_kernel(d.shape, d.rate, rate, j, log_coeff);
          },
      },
      family_);
}

double InterarrivalDistribution::mixed_poisson_tail_bound(double rate, int j) const {
  if (!positive_finite(rate)) throw DomainError("kernel rate must be > 0");
  if (j < 0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) {
            const double x = rate * d.a;
            const double ratio = x / (j + 2.0);
            if (ratio >= 1.0) return 1.0;
            return mixed_poisson_kernel(rate, j + 1) / (1.0 - ratio);
          },
          [&](const Exponential& d) { return std::pow(rate / (d.rate + rate), j + 1); },
          [&](const Erlang& d) {
            return gamma_tail_bound(d.k, d.rate, rate, j, mixed_poisson_kernel(rate, j + 1));
          },
          [&](const Hyperexponential& d) {
            CompensatedSum<double> acc;
            for (std::size_t i = 0; i < d.weights.size(); ++i) {
              acc += d.weights[i] * std::pow(rate / (d.rates[i] + rate), j + 1);
            }
            return acc.value();
          },
          [&](const Gamma& d) {
            return gamma_tail_bound(d.shape, d.rate, rate, j, mixed_poisson_kernel(rate, j + 1));
          },
      },
      family_);
}

MomentSet InterarrivalDistribution::moments(double scale) const {
  if (!positive_finite(scale)) throw DomainError("moment scale must be > 0");
  return MomentSet{scale * scale * raw_moment(2), scale * scale * scale * raw_moment(3), scale};
}

InterarrivalDistribution InterarrivalDistribution::time_scaled(double c) const {
  if (!positive_finite(c)) throw DomainError("time scale factor must be > 0");
  return InterarrivalDistribution(std::visit(
      Overloaded{
          [&](const Deterministic& d) -> Family { return Deterministic{d.a * c}; },
          [&](const Exponential& d) -> Family { return Exponential{d.rate / c}; },
          [&](const Erlang& d) -> Family { return Erlang{d.k, d.rate / c}; },
          [&](const Hyperexponential& d) -> Family {
            Hyperexponential out = d;
            for (double& r : out.rates) r /= c;
            return out;
          },
          [&](const Gamma& d) -> Family { return Gamma{d.shape, d.rate / c}; },
      },
      family_));
}

InterarrivalDistribution InterarrivalDistribution::with_mean(double mean_value) const {
  if (!positive_finite(mean_value)) throw DomainError("mean must be > 0");
  if (std::holds_alternative<Deterministic>(family_)) return deterministic(mean_value);
  if (std::holds_alternative<Exponential>(family_)) return exponential(1.0 / mean_value);
  return time_scaled(mean_value / mean());
}

double InterarrivalDistribution::integrate(const std::function<double(double)>& g) const {
  return std::visit(Overloaded{
                        [&](const Deterministic& d) { return g(d.a); },
                        [&](const Exponential& d) { return integrate_gamma(1.0, d.rate, g); },
                        [&](const Erlang& d) { return integrate_gamma(d.k, d.rate, g); },
                        [&](const Hyperexponential& d) {
                          CompensatedSum<double> acc;
                          for (std::size_t i = 0; i < d.weights.size(); ++i) {
                            if (d.weights[i] > 0.0) acc += d.weights[i] * integrate_gamma(1.0, d.rates[i], g);
                          }
                          return acc.value();
                        },
                        [&](const Gamma& d) { return integrate_gamma(d.shape, d.rate, g); },
                    },
                    family_);
}

double InterarrivalDistribution::sample(Xoshiro256& rng) const {
  return std::visit(Overloaded{
                        [&](const Deterministic& d) { return d.a; },
                        [&](const Exponential& d) { return -std::log(rng.uniform_open0()) / d.rate; },
                        [&](const Erlang& d) {
                          double acc = 0.0;
                          for (int i = 0; i < d.k; ++i) acc -= std::log(rng.uniform_open0());
                          return acc / d.rate;
                        },
                        [&](const Hyperexponential& d) {
                          const double u = rng.uniform();
                          double cum = 0.0;
                          std::size_t pick = d.weights.size() - 1;
                          for (std::size_t i = 0; i < d.weights.size(); ++i) {
                            cum += d.weights[i];
                            if (u < cum) {
                              pick = i;
                              break;
                            }
                          }
                          return -std::log(rng.uniform_open0()) / d.rates[pick];
                        },
                        [&](const Gamma& d) {
                          std::gamma_distribution<double> draw(d.shape, 1.0 / d.rate);
                          return draw(rng);
                        },
                    },
                    family_);
}

std::string InterarrivalDistribution::spec() const {
  auto join = [](const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += '|';
      out += format_double(xs[i]);
    }
    return out;
  };
  return std::visit(
      Overloaded{
          [&](const Deterministic& d) { return "det:a=" + format_double(d.a); },
          [&](const Exponential& d) { return "exp:rate=" + format_double(d.rate); },
          [&](const Erlang& d) { return "erlang:k=" + std::to_string(d.k) + ",rate=" + format_double(d.rate); },
          [&](const Hyperexponential& d) { return "hyper:w=" + join(d.weights) + ",rate=" + join(d.rates); },
          [&](const Gamma& d) {
            return "gamma:shape=" + format_double(d.shape) + ",rate=" + format_double(d.rate);
          },
      },
      family_);
}

InterarrivalDistribution parse_distribution(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::vector<std::pair<std::string_view, std::string_view>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw DomainError("malformed distribution parameter '" + std::string(item) + "'");
      }
      params.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }

  auto find = [&](std::string_view key) -> std::optional<std::string_view> {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    return std::nullopt;
  };
  auto check_keys = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : params) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw DomainError("unknown parameter '" + std::string(k) + "' for '" + std::string(name) + "'");
      }
    }
  };

  if (name == "det") {
    check_keys({"a"});
    const auto a = find("a");
    return InterarrivalDistribution::deterministic(a ? parse_number(*a, "a") : 1.0);
  }
  if (name == "exp") {
    check_keys({"rate"});
    const auto rate = find("rate");
    return InterarrivalDistribution::exponential(rate ? parse_number(*rate, "rate") : 1.0);
  }
  if (name == "erlang") {
    check_keys({"k", "rate"});
    const auto k_text = find("k");
    if (!k_text) throw DomainError("erlang requires k");
    const double k = parse_number(*k_text, "k");
    if (k != std::floor(k) || k < 1 || k > 1e6) throw DomainError("erlang k must be a positive integer");
    const auto rate = find("rate");
    return InterarrivalDistribution::erlang(static_cast<int>(k), rate ? parse_number(*rate, "rate") : k);
  }
  if (name == "hyper") {
    check_keys({"w", "rate"});
    const auto w = find("w");
    const auto rate = find("rate");
    if (!w || !rate) throw DomainError("hyper requires w and rate lists");
    return InterarrivalDistribution::hyperexponential(parse_list(*w, "w"), parse_list(*rate, "rate"));
  }
  if (name == "gamma") {
    check_keys({"shape", "rate"});
    const auto shape_text = find("shape");
    if (!shape_text) throw DomainError("gamma requires shape");
    const double shape = parse_number(*shape_text, "shape");
    const auto rate = find("rate");
    return InterarrivalDistribution::gamma(shape, rate ? parse_number(*rate, "rate") : shape);
  }
  throw DomainError("unknown distribution family '" + std::string(name) + "'");
}

double mixed_poisson_kernel_quadrature(const InterarrivalDistribution& d, double rate, int j) {
  if (!positive_finite(rate)) throw DomainError("kernel rate must be > 0");
  if (j < 0) throw DomainError("kernel index must be >= 0");
  const double log_fact = std::lgamma(j + 1.0);
  return d.integrate([&](double x) {
    const double y = rate * x;
    if (j == 0) return std::exp(-y);
    if (y <= 0.0) return 0.0;
    return std::exp(j * std::log(y) - y - log_fact);
  });
}

}  // namespace lossq
