#pragma once

#include <stdexcept>
#include <string>

namespace rsmdp {

// Iterative solve exhausted its iteration budget without meeting the
// residual tolerance. Carries the last residual seen.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Requested policy enumeration exceeds the configured cap.
class SizeCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A trace does not span enough iterations for the requested window
// diagnostic.
class TraceTooShortError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rsmdp
