#pragma once

#include <stdexcept>
#include <string>

namespace qwc {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition/invariant. Messages name
/// the violated invariant so callers can report it verbatim.
struct ConfigError : Error {
    using Error::Error;
};

/// Waveform support does not fit on the grid (more than 1% of the norm
/// falls outside).
struct TruncationError : ConfigError {
    using ConfigError::ConfigError;
};

/// Argument of the inverse error function left its domain at a
/// non-endpoint of the chirp construction.
struct BoundaryError : ConfigError {
    using ConfigError::ConfigError;
};

/// Non-monotone amplitude where the closed-form dechirp needs an invertible
/// branch.
struct BranchError : ConfigError {
    using ConfigError::ConfigError;
};

/// A simulation produced invalid results (spectral aliasing, norm drift).
struct SimulationError : Error {
    using Error::Error;
};

/// Curve fit could not be performed (too few usable points).
struct FitError : Error {
    using Error::Error;
};

/// File or format problem during serialization.
struct IoError : Error {
    using Error::Error;
};

} // namespace qwc
