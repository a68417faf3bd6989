#pragma once

#include <stdexcept>
#include <string>

namespace nct {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that violates an operation's preconditions (theta mismatch, bad names, ...).
class RejectedInput : public Error {
public:
    using Error::Error;
};

class BoxError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMetric : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class UnsupportedOrientation : public Error {
public:
    using Error::Error;
};

class StructuralError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace nct
