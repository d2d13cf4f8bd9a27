#pragma once

#include <stdexcept>
#include <string>

namespace sparseclust {

// Precondition violations (bad dimensions, out-of-range parameters) are
// reported as std::invalid_argument. The types below cover the rest.

/// Non-finite input or iterate, or overflow in a numerical kernel.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A closed-form bound was requested outside the regime where it holds.
class OutsideRegime : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Malformed experiment configuration.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace sparseclust
