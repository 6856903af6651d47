#pragma once

#include <stdexcept>
#include <string>

namespace lattice_entropy {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A lattice or experiment parameter lies outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operand sizes disagree (matrix vs basis, phases vs state, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A state that must be normalized is not.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// The eigensolver did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Coarse-grainings live in different bases and no basis change was supplied.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Internal inconsistency, e.g. nonzero probability in a zero-volume macrostate.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Localization window contains no admissible configuration.
class EmptySubspaceError : public Error {
public:
    using Error::Error;
};

/// File input/output failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lattice_entropy
