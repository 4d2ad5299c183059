#include "ugks/error.hpp"

namespace ugks {

std::string_view to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::InvalidConfig: return "invalid-config";
        case ErrorCategory::OperatorInvalid: return "operator-invalid";
        case ErrorCategory::SolverFailure: return "solver-failure";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::Parse: return "parse";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::InvalidConfig: return 2;
        case ErrorCategory::OperatorInvalid: return 3;
        case ErrorCategory::SolverFailure: return 4;
        case ErrorCategory::Io: return 5;
        case ErrorCategory::Parse: return 6;
    }
    return 1;
}

}  // namespace ugks
