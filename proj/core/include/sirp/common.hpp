#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace sirp {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input files / records.
class LoadError : public Error {
public:
    using Error::Error;
};

// Data passed validation syntactically but violates a model assumption.
class DataError : public Error {
public:
    using Error::Error;
};

// Impossible model construction request (bad dimensions, asymmetric
// distances for the symmetric variant, ...).
class BuildError : public Error {
public:
    using Error::Error;
};

// Solver gave up (iteration cap after Bland fallback, numerical trouble).
class SolveError : public Error {
public:
    using Error::Error;
};

} // namespace sirp
