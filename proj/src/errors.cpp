#include "rexec/errors.hpp"

namespace rexec {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::precision_violation: return "PrecisionViolation";
        case ErrorKind::eta_tilde_violation: return "EtaTildeViolation";
        case ErrorKind::invalid_parameter: return "InvalidParameter";
        case ErrorKind::out_of_horizon: return "OutOfHorizon";
        case ErrorKind::blow_up: return "BlowUp";
        case ErrorKind::support_too_narrow: return "SupportTooNarrow";
        case ErrorKind::degenerate_normalizer: return "DegenerateNormalizer";
        case ErrorKind::config_mismatch: return "ConfigMismatch";
        case ErrorKind::nonfinite_state: return "NonfiniteState";
        case ErrorKind::increments_missing: return "IncrementsMissing";
        case ErrorKind::h0_unavailable: return "H0Unavailable";
        case ErrorKind::boundary_hit: return "BoundaryHit";
        case ErrorKind::validation: return "ValidationError";
    }
    return "Error";
}

}  // namespace rexec
