#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gptref {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Effects do not sum to the unit effect.
class NotAMeasurement : public Error {
public:
    using Error::Error;
};

// Effect matrix has rank < r.
class NotInformationallyComplete : public Error {
public:
    using Error::Error;
};

// A vector fails its cone oracle.
class ConeViolation : public Error {
public:
    using Error::Error;
};

// An outcome has bias w_i = 0; the weighted constructions are undefined there.
class ZeroBias : public Error {
public:
    using Error::Error;
};

// The depolarization search found no admissible scale on the requested branch.
class NoFeasibleAlpha : public Error {
public:
    using Error::Error;
};

// A user-supplied nullspace corrector K fails K Zt = 0 or K w = 0.
class InvalidNullspace : public Error {
public:
    using Error::Error;
};

class NotAMic : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

// Operation requires an unbiased measurement.
class UnsupportedBias : public Error {
public:
    using Error::Error;
};

class PreconditionFailure : public Error {
public:
    using Error::Error;
};

class NotASic : public Error {
public:
    using Error::Error;
};

class NotPure : public Error {
public:
    using Error::Error;
};

// Carries every named invariant a device file failed, not just the first.
class DeviceValidationError : public Error {
public:
    DeviceValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace gptref
