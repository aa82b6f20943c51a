// errors.hpp: exception types used across the library

#pragma once

#include <stdexcept>
#include <string>

namespace sbscatter {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. k <= 0 for the form factor).
struct DomainError : Error {
    using Error::Error;
};

/// Invalid parameters or configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Operator assembly with inconsistent grid/basis.
struct AssemblyError : Error {
    using Error::Error;
};

/// Eigensolver failure.
struct SolverError : Error {
    using Error::Error;
};

/// Eigenstate identification failed (overlap too small).
struct AmbiguityError : Error {
    using Error::Error;
};

/// Integration contour passes through or too close to the spectrum.
struct ContourError : Error {
    using Error::Error;
};

/// Not enough data for a fit.
struct FitError : Error {
    using Error::Error;
};

/// Contract violation (e.g. a non-Hermitian operator where one is required).
struct ContractError : Error {
    using Error::Error;
};

}  // namespace sbscatter
