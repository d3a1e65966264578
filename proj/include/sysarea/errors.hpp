#pragma once

#include <stdexcept>
#include <string>

namespace sysarea {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Quadrature band is below the degree it has to integrate exactly.
class BandTooLow : public Error {
public:
    using Error::Error;
};

// Variation parameter outside the admissible range ]-a, a[.
class NonAdmissibleT : public Error {
public:
    using Error::Error;
};

class ProjectionResidualTooLarge : public Error {
public:
    using Error::Error;
};

class DegenerateSystole : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class IOFailure : public Error {
public:
    using Error::Error;
};

}  // namespace sysarea
