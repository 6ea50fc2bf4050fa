#pragma once

#include <stdexcept>
#include <string>

namespace kloostpath {

// Error taxonomy shared by the C++ core and the C API (which maps each type
// to a kp_status code).

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OverflowError : std::range_error {
    using std::range_error::range_error;
};

struct NotAUnit : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotASquare : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnsupportedDepth : std::domain_error {
    using std::domain_error::domain_error;
};

struct PreconditionFailed : std::domain_error {
    using std::domain_error::domain_error;
};

struct SingularQuadratic : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidPhase : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace kloostpath
