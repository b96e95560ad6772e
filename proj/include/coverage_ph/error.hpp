#pragma once

#include <stdexcept>
#include <string>

namespace coverage_ph {

// Bad input data or configuration. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Routing provider failure or incomplete travel cache. Maps to CLI exit code 2.
class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken internal invariant (a builder produced an inconsistent structure).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace coverage_ph
