#pragma once

#include <stdexcept>

namespace edgelogdet {

// Bad numeric parameter (non-positive shape, n = 0, alpha <= 0, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data that cannot be processed, e.g. non-finite matrix entries.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested quantity needs real characteristic roots, i.e. (i - 1) <= N theta^2.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Formula evaluated outside its domain (theta <= 1 for the theta scaling, w <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SingularDeterminant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace edgelogdet
