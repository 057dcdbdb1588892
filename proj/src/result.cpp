#include "lossq/result.hpp"

#include <array>
#include <string>
#include <utility>

#include "lossq/error.hpp"

namespace lossq {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethods{{
    {Method::recurrence, "recurrence"},
    {Method::gim_m0_closed_form, "gim_m0_closed_form"},
    {Method::mc_oracle, "mc_oracle"},
    {Method::asymptotic, "asymptotic"},
    {Method::simulation, "simulation"},
}};

constexpr std::array<std::pair<RegimeKind, std::string_view>, 4> kRegimes{{
    {RegimeKind::overloaded, "overloaded"},
    {RegimeKind::critical, "critical"},
    {RegimeKind::underloaded, "underloaded"},
    {RegimeKind::heavy_traffic, "heavy_traffic"},
}};

}  // namespace

std::string_view method_name(Method method) {
  for (const auto& [m, name] : kMethods) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethods) {
    if (n == name) return m;
  }
  throw DomainError("unknown method '" + std::string(name) + "'");
}

std::string_view regime_name(RegimeKind kind) {
  for (const auto& [k, name] : kRegimes) {
    if (k == kind) return name;
  }
  return "unknown";
}

RegimeKind parse_regime(std::string_view name) {
  for (const auto& [k, n] : kRegimes) {
    if (n == name) return k;
  }
  throw DomainError("unknown regime '" + std::string(name) + "'");
}

}  // namespace lossq
