#pragma once

#include <stdexcept>
#include <string>

namespace brbm {

// Domain violations use std::domain_error, unknown ids std::out_of_range and
// contract misuse std::logic_error. The three below carry their own exit codes
// in the CLI.

/// A population or memory guard was exceeded; results would be truncated.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver left its validity region (front hit the domain edge, rank-deficient
/// design, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace brbm
