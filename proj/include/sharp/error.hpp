#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharp {

enum class Errc {
  invalid_dimension,
  unsupported_composite,
  incompatible_systems,
  not_a_composite,
  not_normalized,
  not_copurifications,
  zero_state,
  invalid_state,
  not_pure,
  not_maximal,
  domain_error,
  invalid_distribution,
  effect_not_certain,
  unsupported,
  not_a_test,
  triangularity_failed,
  not_comparable,
  invalid_order,
  inapplicable_function,
  energy_out_of_range,
  not_invertible,
  invalid_temperature,
  not_reversible,
  unknown_suite,
  schema_error,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::unsupported_composite: return "unsupported-composite";
    case Errc::incompatible_systems: return "incompatible-systems";
    case Errc::not_a_composite: return "not-a-composite";
    case Errc::not_normalized: return "not-normalized";
    case Errc::not_copurifications: return "not-copurifications";
    case Errc::zero_state: return "zero-state";
    case Errc::invalid_state: return "invalid-state";
    case Errc::not_pure: return "not-pure";
    case Errc::not_maximal: return "not-maximal";
    case Errc::domain_error: return "domain-error";
    case Errc::invalid_distribution: return "invalid-distribution";
    case Errc::effect_not_certain: return "effect-not-certain";
    case Errc::unsupported: return "unsupported";
    case Errc::not_a_test: return "not-a-test";
    case Errc::triangularity_failed: return "triangularity-failed";
    case Errc::not_comparable: return "not-comparable";
    case Errc::invalid_order: return "invalid-order";
    case Errc::inapplicable_function: return "inapplicable-function";
    case Errc::energy_out_of_range: return "energy-out-of-range";
    case Errc::not_invertible: return "not-invertible";
    case Errc::invalid_temperature: return "invalid-temperature";
    case Errc::not_reversible: return "not-reversible";
    case Errc::unknown_suite: return "unknown-suite";
    case Errc::schema_error: return "schema-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code so CLI diagnostics stay greppable.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sharp
