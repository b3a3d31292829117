#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rexec {

enum class ErrorKind {
    precision_violation,
    eta_tilde_violation,
    invalid_parameter,
    out_of_horizon,
    blow_up,
    support_too_narrow,
    degenerate_normalizer,
    config_mismatch,
    nonfinite_state,
    increments_missing,
    h0_unavailable,
    boundary_hit,
    validation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every library failure carries a kind so callers (CLI, bindings) can map it
/// to exit codes or Python exception types without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace rexec
