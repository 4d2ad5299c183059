#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ugks {

/// Coarse failure classes. The CLI prints the category name so scripts can
/// branch on it without parsing the message.
enum class ErrorCategory {
    InvalidConfig,
    OperatorInvalid,
    SolverFailure,
    Io,
    Parse,
};

std::string_view to_string(ErrorCategory category) noexcept;

/// Process exit code associated with a category (never 0).
int exit_code(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace ugks
