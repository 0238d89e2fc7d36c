// Shared linear-algebra aliases and value types used across the toolkit.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ddad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Scalar-identity noise covariances: u ~ N(0, sigma_u I), w ~ N(0, sigma_w I),
/// v ~ N(0, sigma_v I). All three are variances, not standard deviations.
struct NoiseSpec {
    double sigma_u = 1.0;
    double sigma_w = 1.0;
    double sigma_v = 1.0;

    void validate() const;
    bool operator==(const NoiseSpec&) const = default;
};

enum class CovarianceMethod { Direct, Indirect, Oracle };

std::string_view to_string(CovarianceMethod method);
CovarianceMethod covariance_method_from_string(std::string_view name);

/// Behavior covariance S (or an estimate of it) with the parameters that produced it.
struct CovarianceEstimate {
    Matrix S;
    CovarianceMethod method = CovarianceMethod::Oracle;
    int N = 0;  // number of experiments; 0 for the oracle
    int T = 0;
    std::optional<int> L;
    NoiseSpec noise;
    bool clipped = false;  // negative eigenvalues were clipped to restore PSD

    Index dim() const { return S.rows(); }
};

}  // namespace ddad
