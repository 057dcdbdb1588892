#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace lossq {

enum class Method { recurrence, gim_m0_closed_form, mc_oracle, asymptotic, simulation };

[[nodiscard]] std::string_view method_name(Method method);
/// Inverse of method_name; throws DomainError on an unknown name.
[[nodiscard]] Method parse_method(std::string_view name);

enum class RegimeKind { overloaded, critical, underloaded, heavy_traffic };

[[nodiscard]] std::string_view regime_name(RegimeKind kind);
[[nodiscard]] RegimeKind parse_regime(std::string_view name);

/// Which asymptotic statement applies to a model, plus the constants its
/// formula needs. sigma_m and k_m are set only for the underloaded regime;
/// C and epsilon only for heavy traffic.
struct AsymptoticRegime {
  RegimeKind kind = RegimeKind::underloaded;
  std::optional<double> sigma_m;
  std::optional<double> k_m;
  double rho2 = 0.0;
  std::optional<double> rho3;
  std::optional<double> C;
  std::optional<double> epsilon;
};

struct Diagnostics {
  /// log(1/p); for the recurrence this is the log of the expected number of
  /// arrivals to the first loss.
  double pi_log = std::numeric_limits<double>::quiet_NaN();
  std::optional<AsymptoticRegime> regime;
  std::optional<double> ci_halfwidth;
  std::optional<double> stderr_p;
  /// Name of the asymptotic main term used, empty otherwise.
  std::string formula;
  /// The long double pass replaced the double pass.
  bool extended_precision = false;
};

struct LossResult {
  double p = 0.0;
  Method method = Method::recurrence;
  Diagnostics diagnostics;
};

}  // namespace lossq
