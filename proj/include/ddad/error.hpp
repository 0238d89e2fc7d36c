#pragma once

#include <stdexcept>
#include <string>

namespace ddad {

/// Bad dimensions, out-of-range parameters, malformed configuration.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class EstimationFailure {
    InsufficientData,    // F F^T singular
    UnstableModel,       // identified M has spectral radius >= 1
    DegenerateEstimate,  // all-zero covariance handed to the detector
};

class EstimationError : public std::runtime_error {
public:
    EstimationError(EstimationFailure kind, const std::string& what, double spectral_radius = 0.0)
        : std::runtime_error(what), kind_(kind), spectral_radius_(spectral_radius) {}

    EstimationFailure kind() const noexcept { return kind_; }
    /// Only meaningful for UnstableModel.
    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    EstimationFailure kind_;
    double spectral_radius_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ddad
