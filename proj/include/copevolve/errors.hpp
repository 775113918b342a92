#pragma once

#include <stdexcept>
#include <string>

namespace copevolve {

/// A caller broke a documented precondition (dimension mismatch, bad config, NaN input).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input data (instance files, configs, manifests).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A constraint whose zero-level set does not exist within the search radius.
class NoBoundaryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Angle requested between constraints where one normal vector is zero.
class UndefinedAngleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Feature requested for a constraint kind it is not defined on.
class UnsupportedKindError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

} // namespace copevolve
