#include "lossq/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lossq/error.hpp"
#include "lossq/numerics.hpp"

namespace lossq {

namespace {

constexpr double kBig = 1e300;
constexpr double kSmall = 1e-300;
// Cut chain values are rescaled early so one division by a small pivot cannot
// overflow.
constexpr double kRescaleAt = 1e200;

template <typename Real>
PiSequence forward_solve(std::span<const double> f, double q0, int horizon) {
  PiSequence out;
  out.series_n = horizon;
  out.values.assign(horizon + 1, 0.0);
  out.log_scale.assign(horizon + 1, 0.0);
  std::vector<Real> work(horizon + 1, Real(0));
  work[0] = q0;
  out.values[0] = q0;
  double log_scale = 0.0;
  const Real f0 = f[0];
  const int last = static_cast<int>(f.size()) - 1;

  for (int j = 0; j < horizon; ++j) {
    CompensatedSum<Real> acc(work[j]);
    for (int i = 1, top = std::min(j, last); i <= top; ++i) {
      if (f[i] != 0.0) acc += -static_cast<Real>(f[i]) * work[j - i + 1];
    }
    const Real next = acc.value() / f0;
    if (!(next > 0) || !std::isfinite(static_cast<double>(next))) {
      throw InstabilityError("recurrence value Q_" + std::to_string(j + 1) +
                             " is not positive; kernel rows or precision exhausted");
    }
    work[j + 1] = next;
    if (next > kBig || next < kSmall) {
      int e = 0;
      std::frexp(static_cast<double>(next), &e);
      for (int k = 0; k <= j + 1; ++k) work[k] = std::ldexp(work[k], -e);
      log_scale += e * std::numbers::ln2;
    }
    out.values[j + 1] = static_cast<double>(work[j + 1]);
    out.log_scale[j + 1] = log_scale;
  }
  return out;
}

LossResult gim1n_from(const KernelSet& ks) {
  const PiSequence q = solve_generic(ks.interior, 1.0, ks.n + 1);
  LossResult r;
  r.method = Method::recurrence;
  r.diagnostics.pi_log = q.log_value(ks.n + 1);
  r.diagnostics.extended_precision = q.extended_precision;
  r.p = std::exp(-r.diagnostics.pi_log);
  return r;
}

LossResult gimm0_from(const KernelSet& ks) {
  const auto logc = log_c_products(ks.phi, ks.phi_complement);
  double log_total = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= ks.m; ++i) {
    log_total = log_add_exp(log_total, std::log(binomial(ks.m, i)) + logc[i]);
  }
  LossResult r;
  r.method = Method::gim_m0_closed_form;
  r.diagnostics.pi_log = log_total;
  r.p = std::exp(-log_total);
  return r;
}

// Unnormalized arrival-stationary vector with x[m+n] = exp(-log_scale).
struct CutChain {
  std::vector<double> x;
  double log_scale = 0.0;
};

// Flow balance across the cut between pre-arrival states s and s+1: an arrival
// seeing s and no departure before the next one is the only way up; any
// state above drops to s or below with the probability summed from its row.
// Solving from the full state downward introduces one unknown per equation.
CutChain cut_chain(const KernelSet& ks) {
  const int m = ks.m;
  const int n = ks.n;
  const int cap = m + n;

  // tail[k] = sum_{l >= k} r_{0,m,l}, k = 0..n+1.
  std::vector<double> tail(n + 2);
  {
    CompensatedSum<double> acc(ks.interior_tail);
    tail[n + 1] = ks.interior_tail;
    for (int k = n; k >= 0; --k) {
      acc += ks.interior[k];
      tail[k] = acc.value();
    }
  }

  // Probability that post-arrival state `post` ends at or below s < m.
  auto down_to_boundary = [&](int post, int s) {
    CompensatedSum<double> acc;
    if (post <= m) {
      for (int i = 0; i <= s; ++i) acc += ks.death[post][i];
    } else {
      const int j = post - m;
      for (int k = m - s; k <= m; ++k) acc += ks.crossing(k, j);
    }
    return acc.value();
  };

  CutChain c;
  c.x.assign(cap + 1, 0.0);
  c.x[cap] = 1.0;
  for (int s = cap - 1; s >= 0; --s) {
    CompensatedSum<double> acc;
    double pivot = 0.0;
    if (s >= m) {
      for (int t = s + 1; t <= cap; ++t) acc += c.x[t] * tail[std::min(t + 1, cap) - s];
      pivot = ks.interior[0];
    } else {
      for (int t = s + 1; t <= cap; ++t) acc += c.x[t] * down_to_boundary(std::min(t + 1, cap), s);
      pivot = ks.death[s + 1][s + 1];
    }
    const double xs = acc.value() / pivot;
    if (!(xs > 0.0) || !std::isfinite(xs)) {
      throw InstabilityError("stationary mass at state " + std::to_string(s) +
                             " is not a positive finite number");
    }
    c.x[s] = xs;
    if (xs > kRescaleAt) {
      int e = 0;
      std::frexp(xs, &e);
      for (int t = s; t <= cap; ++t) c.x[t] = std::ldexp(c.x[t], -e);
      c.log_scale += e * std::numbers::ln2;
    }
  }
  return c;
}

}  // namespace

double PiSequence::log_value(int j) const {
  if (j < 0 || j >= static_cast<int>(values.size())) throw DomainError("Q index out of range");
  return std::log(values[j]) + log_scale[j];
}

double PiSequence::value(int j) const { return std::exp(log_value(j)); }

PiSequence solve_generic(std::span<const double> f, double q0, int horizon,
                         const SolveOptions& options) {
  if (f.empty() || !(f[0] > 0.0)) throw DomainError("kernel needs f_0 > 0");
  if (!(q0 > 0.0) || !std::isfinite(q0)) throw DomainError("initial value must be > 0");
  if (horizon < 0) throw DomainError("horizon must be >= 0");
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("kernel entries must be >= 0");
  }
  if (stable_sum(f) > 1.0 + 1e-10) throw DomainError("kernel mass exceeds 1");

  PiSequence primary = forward_solve<double>(f, q0, horizon);
  if (!options.extended_check) return primary;
  PiSequence extended = forward_solve<long double>(f, q0, horizon);
  for (int j = 0; j <= horizon; ++j) {
    const double a = primary.log_value(j);
    const double b = extended.log_value(j);
    if (std::abs(a - b) > 1e-9) {
      extended.extended_precision = true;
      return extended;
    }
  }
  return primary;
}

LossResult loss_gim1n(const QueueModel& model) {
  if (model.servers != 1) throw DomainError("loss_gim1n needs m = 1");
  return gim1n_from(build_kernel_set(model));
}

LossResult loss_gimm0(const QueueModel& model) {
  if (model.buffer != 0) throw DomainError("loss_gimm0 needs n = 0");
  return gimm0_from(build_kernel_set(model));
}

LossResult loss_gimmn(const QueueModel& model) { return loss_gimmn(model, build_kernel_set(model)); }

LossResult loss_gimmn(const QueueModel& model, const KernelSet& kernels) {
  model.validate();
  if (kernels.m != model.servers || kernels.n != model.buffer) {
    throw DomainError("kernel set does not match the model dimensions");
  }
  if (model.servers == 1) return gim1n_from(kernels);
  if (model.buffer == 0) return gimm0_from(kernels);
  return loss_cut_chain(model, kernels);
}

LossResult loss_cut_chain(const QueueModel& model, const KernelSet& kernels) {
  if (kernels.m != model.servers || kernels.n != model.buffer) {
    throw DomainError("kernel set does not match the model dimensions");
  }
  const CutChain c = cut_chain(kernels);
  LossResult r;
  r.method = Method::recurrence;
  r.diagnostics.pi_log = std::log(stable_sum<double>(c.x)) + c.log_scale;
  r.p = std::exp(-r.diagnostics.pi_log);
  return r;
}

std::vector<double> stationary_gim1n(const QueueModel& model) {
  if (model.servers != 1) throw DomainError("stationary_gim1n needs m = 1");
  const KernelSet ks = build_kernel_set(model);
  const int cap = model.buffer + 1;
  const PiSequence q = solve_generic(ks.interior, 1.0, cap);
  const double top = q.log_value(cap);
  std::vector<double> out(cap + 1);
  for (int j = 0; j <= cap; ++j) {
    const double hi = std::exp(q.log_value(cap - j) - top);
    const double lo = j == cap ? 0.0 : std::exp(q.log_value(cap - j - 1) - top);
    out[j] = hi - lo;
  }
  return out;
}

std::vector<double> stationary_gimmn(const QueueModel& model) {
  return stationary_gimmn(model, build_kernel_set(model));
}

std::vector<double> stationary_gimmn(const QueueModel& model, const KernelSet& kernels) {
  model.validate();
  CutChain c = cut_chain(kernels);
  const double total = stable_sum<double>(c.x);
  for (double& v : c.x) v /= total;
  return c.x;
}

}  // namespace lossq
