#pragma once

#include <stdexcept>
#include <string>

namespace robustnet {

// Numerical failure (non-convergence, ill-conditioning) as opposed to an
// invalid-input error, which is reported via std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an LMI-based synthesis cannot produce a controller.
class SynthesisError : public std::runtime_error {
public:
    SynthesisError(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace robustnet
