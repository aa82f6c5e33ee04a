#pragma once

#include <stdexcept>
#include <string>

namespace ringwalk {

// Raised when a configuration violates a documented invariant before any
// numerics run. The CLI maps it to exit code 1.
class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical post-condition (unitarity, eigen residual, ...)
// is breached. Carries the offending residual. The CLI maps it to exit code 2.
class ContractViolation : public std::runtime_error {
public:
    ContractViolation(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace ringwalk
