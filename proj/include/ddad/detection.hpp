// Chi-squared behavior detector and ROC utilities.
#pragma once

#include <span>
#include <vector>

#include "ddad/types.hpp"

namespace ddad {

struct PseudoInverse {
    Matrix matrix;
    int rank = 0;
    bool full_rank = false;
};

/// Eigendecomposition pseudo-inverse; eigenvalues at or below rel_tol * lambda_max
/// are dropped. Throws EstimationError(DegenerateEstimate) for an all-zero S.
PseudoInverse invert_covariance(const Matrix& S, double rel_tol = 1e-8);

struct DetectorStat {
    double g = 0.0;
    int dof = 0;
};

/// g = z^T S_inv z.
DetectorStat chi2_statistic(const Vector& z, const Matrix& S_inv);

enum class Hypothesis { H0, H1 };

/// Alarm (H1) iff g > lambda.
Hypothesis detect(const DetectorStat& stat, double lambda);

/// Upper-alpha quantile of the chi-squared distribution with `dof` degrees of freedom.
double chi2_threshold(int dof, double alpha);

struct RocPoint {
    double lambda = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};
using RocCurve = std::vector<RocPoint>;

/// fpr = fraction of nominal g > lambda, tpr = fraction of attacked g > lambda,
/// one point per threshold, sorted by increasing lambda.
RocCurve roc_curve(std::span<const double> nominal_g, std::span<const double> attacked_g,
                   std::span<const double> thresholds);

/// `points` thresholds at evenly spaced empirical quantiles of the pooled
/// statistics. The lowest one sits just below the pooled minimum, so the
/// curve always runs from (1, 1) down to (0, 0).
std::vector<double> quantile_thresholds(std::span<const double> nominal_g,
                                        std::span<const double> attacked_g, std::size_t points = 512);

/// Trapezoidal area under the (fpr, tpr) points, anchored at (0,0) and (1,1).
double auc(const RocCurve& curve);

}  // namespace ddad
