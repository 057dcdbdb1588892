#pragma once

#include <vector>

#include "json.hpp"
#include "lossq/kernel.hpp"
#include "lossq/mcoracle.hpp"
#include "lossq/model.hpp"
#include "lossq/result.hpp"
#include "lossq/sim.hpp"

namespace lossq {

using nlohmann::json;

void to_json(json& j, const QueueModel& model);
void from_json(const json& j, QueueModel& model);

void to_json(json& j, const AsymptoticRegime& regime);
void from_json(const json& j, AsymptoticRegime& regime);

/// {p, method, pi_log, diagnostics}; see result_json for the model-tagged form.
void to_json(json& j, const LossResult& result);
void from_json(const json& j, LossResult& result);

void to_json(json& j, const SimEstimate& estimate);

/// {model, p, method, pi_log, diagnostics}.
[[nodiscard]] json result_json(const QueueModel& model, const LossResult& result);

/// {m, n, mu, interior, boundary, to_empty, phi, cprod}.
[[nodiscard]] json kernels_json(const KernelSet& kernels);

/// {m, n, P, pi}.
[[nodiscard]] json chain_json(const EmbeddedChain& chain, const std::vector<double>& stationary);

}  // namespace lossq
