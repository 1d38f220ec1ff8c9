#pragma once

#include <stdexcept>
#include <string>

namespace qcomp {

/// Parameters violate an operation's preconditions (CLI exit code 2).
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// The quantity is mathematically undefined for these inputs, e.g. conditioning
/// on an impossible event (CLI exit code 2).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Inputs exceed the declared limits of the exact path (CLI exit code 3).
class CapacityExceeded : public std::length_error {
public:
    explicit CapacityExceeded(const std::string& what) : std::length_error(what) {}
};

/// Reading a config file or writing results failed (CLI exit code 4).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcomp
