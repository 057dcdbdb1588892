#include "lossq/mcoracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lossq/error.hpp"

namespace lossq {

double EmbeddedChain::row_sum_error() const {
  return (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

EmbeddedChain build_chain(const QueueModel& model) {
  return build_chain(model, build_kernel_set(model));
}

EmbeddedChain build_chain(const QueueModel& model, const KernelSet& kernels) {
  model.validate();
  const int cap = model.capacity();
  if (cap + 1 > kMaxOracleStates) {
    throw DomainError("oracle supports at most " + std::to_string(kMaxOracleStates) + " states");
  }
  EmbeddedChain chain;
  chain.m = model.servers;
  chain.n = model.buffer;
  chain.P = Eigen::MatrixXd::Zero(cap + 1, cap + 1);
  for (int i = 0; i <= cap; ++i) {
    const auto row = kernels.transition_row(std::min(i + 1, cap));
    for (int k = 0; k <= cap; ++k) chain.P(i, k) = row[k];
  }
  const double err = chain.row_sum_error();
  if (err > 1e-8) {
    throw NumericError("embedded chain row sum misses 1 by " + std::to_string(err));
  }
  return chain;
}

std::vector<double> stationary_vector(const EmbeddedChain& chain) {
  const int s = chain.states();
  Eigen::MatrixXd A = chain.P.transpose() - Eigen::MatrixXd::Identity(s, s);
  A.row(s - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s);
  b(s - 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite() || x.minCoeff() < -1e-10) {
    throw SingularityError("embedded chain balance system is singular");
  }
  std::vector<double> out(x.data(), x.data() + s);
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

LossResult loss_oracle(const QueueModel& model) {
  const auto pi = stationary_vector(build_chain(model));
  LossResult r;
  r.method = Method::mc_oracle;
  r.p = pi.back();
  r.diagnostics.pi_log = -std::log(r.p);
  return r;
}

}  // namespace lossq
