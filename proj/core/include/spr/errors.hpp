#pragma once

#include <stdexcept>
#include <string>

namespace spr {

// Base class for all library errors. Subclasses encode the failure family so
// callers can branch without parsing messages.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument values or malformed inputs (bad dimensions, out-of-range
// parameters, unparsable files).
class DomainError : public Error {
public:
    using Error::Error;
};

// Numerically rank-deficient input where independence was required.
class DependencyError : public Error {
public:
    using Error::Error;
};

// A requested exhaustive computation exceeds the documented enumeration caps.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Input data is internally contradictory (e.g. measurements that no signal
// can produce).
class InconsistencyError : public Error {
public:
    using Error::Error;
};

// More than one structurally distinct answer fits the input within tolerance.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

}  // namespace spr
