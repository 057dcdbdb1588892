#include "lossq/report.hpp"

#include <cmath>
#include <string>

#include "lossq/error.hpp"

namespace lossq {

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

// JSON has no infinities or NaN; they are written as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void to_json(json& j, const QueueModel& model) {
  j = json{{"m", model.servers},
           {"n", model.buffer},
           {"mu", model.mu},
           {"dist", model.arrivals.spec()},
           {"lambda", model.lambda()},
           {"rho", model.load()}};
}

void from_json(const json& j, QueueModel& model) {
  model.servers = j.at("m").get<int>();
  model.buffer = j.at("n").get<int>();
  model.mu = j.at("mu").get<double>();
  model.arrivals = parse_distribution(j.at("dist").get<std::string>());
  model.validate();
}

void to_json(json& j, const AsymptoticRegime& regime) {
  j = json{{"kind", std::string(regime_name(regime.kind))}, {"rho2", number_or_null(regime.rho2)}};
  put_optional(j, "sigma_m", regime.sigma_m);
  put_optional(j, "K_m", regime.k_m);
  if (regime.rho3) j["rho3"] = number_or_null(*regime.rho3);
  put_optional(j, "C", regime.C);
  put_optional(j, "epsilon", regime.epsilon);
}

void from_json(const json& j, AsymptoticRegime& regime) {
  regime.kind = parse_regime(j.at("kind").get<std::string>());
  regime.rho2 = j.at("rho2").is_null() ? INFINITY : j.at("rho2").get<double>();
  regime.sigma_m = get_optional<double>(j, "sigma_m");
  regime.k_m = get_optional<double>(j, "K_m");
  regime.rho3 = get_optional<double>(j, "rho3");
  regime.C = get_optional<double>(j, "C");
  regime.epsilon = get_optional<double>(j, "epsilon");
}

void to_json(json& j, const LossResult& result) {
  json diag = json::object();
  if (result.diagnostics.regime) diag["regime"] = *result.diagnostics.regime;
  put_optional(diag, "ci_halfwidth", result.diagnostics.ci_halfwidth);
  put_optional(diag, "stderr", result.diagnostics.stderr_p);
  if (!result.diagnostics.formula.empty()) diag["formula"] = result.diagnostics.formula;
  if (result.diagnostics.extended_precision) diag["extended_precision"] = true;
  j = json{{"p", result.p},
           {"method", std::string(method_name(result.method))},
           {"pi_log", number_or_null(result.diagnostics.pi_log)},
           {"diagnostics", diag}};
}

void from_json(const json& j, LossResult& result) {
  result.p = j.at("p").get<double>();
  result.method = parse_method(j.at("method").get<std::string>());
  result.diagnostics = {};
  if (!j.at("pi_log").is_null()) result.diagnostics.pi_log = j.at("pi_log").get<double>();
  const json& diag = j.at("diagnostics");
  if (diag.contains("regime")) result.diagnostics.regime = diag.at("regime").get<AsymptoticRegime>();
  result.diagnostics.ci_halfwidth = get_optional<double>(diag, "ci_halfwidth");
  result.diagnostics.stderr_p = get_optional<double>(diag, "stderr");
  result.diagnostics.formula = diag.value("formula", std::string());
  result.diagnostics.extended_precision = diag.value("extended_precision", false);
}

void to_json(json& j, const SimEstimate& estimate) {
  j = json{{"p_hat", estimate.p_hat},
           {"stderr", estimate.stderr_p},
           {"ci95_halfwidth", estimate.ci95_halfwidth},
           {"losses", estimate.losses},
           {"arrivals_counted", estimate.arrivals_counted}};
}

json result_json(const QueueModel& model, const LossResult& result) {
  json j = result;
  j["model"] = model;
  return j;
}

json kernels_json(const KernelSet& kernels) {
  return json{{"m", kernels.m},
              {"n", kernels.n},
              {"mu", kernels.mu},
              {"interior", kernels.interior},
              {"boundary", kernels.boundary},
              {"to_empty", kernels.to_empty},
              {"phi", kernels.phi},
              {"cprod", kernels.cprod}};
}

json chain_json(const EmbeddedChain& chain, const std::vector<double>& stationary) {
  json rows = json::array();
  for (int i = 0; i < chain.states(); ++i) {
    std::vector<double> row(chain.P.cols());
    for (int k = 0; k < chain.P.cols(); ++k) row[k] = chain.P(i, k);
    rows.push_back(row);
  }
  return json{{"m", chain.m}, {"n", chain.n}, {"P", rows}, {"pi", stationary}};
}

}  // namespace lossq
