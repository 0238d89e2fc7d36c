#include "ddad/detection.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "ddad/error.hpp"

namespace ddad {

PseudoInverse invert_covariance(const Matrix& S, double rel_tol) {
    if (S.rows() != S.cols() || S.rows() == 0) throw InvalidArgument("covariance must be a nonempty square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
    const Vector& ev = es.eigenvalues();
    const double lambda_max = ev.maxCoeff();
    if (!(lambda_max > 0.0)) {
        throw EstimationError(EstimationFailure::DegenerateEstimate, "degenerate covariance estimate (no positive eigenvalues)");
    }
    Vector inv = Vector::Zero(ev.size());
    int rank = 0;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > rel_tol * lambda_max) {
            inv(i) = 1.0 / ev(i);
            ++rank;
        }
    }
    PseudoInverse out;
    out.matrix = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    out.matrix = (0.5 * (out.matrix + out.matrix.transpose())).eval();
    out.rank = rank;
    out.full_rank = rank == S.rows();
    return out;
}

DetectorStat chi2_statistic(const Vector& z, const Matrix& S_inv) {
    if (S_inv.rows() != z.size() || S_inv.cols() != z.size()) throw InvalidArgument("behavior and S_inv sizes differ");
    return {z.dot(S_inv * z), static_cast<int>(z.size())};
}

Hypothesis detect(const DetectorStat& stat, double lambda) {
    return stat.g > lambda ? Hypothesis::H1 : Hypothesis::H0;
}

double chi2_threshold(int dof, double alpha) {
    if (dof < 1) throw InvalidArgument("degrees of freedom must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    const boost::math::chi_squared dist(dof);
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

RocCurve roc_curve(std::span<const double> nominal_g, std::span<const double> attacked_g,
                   std::span<const double> thresholds) {
    if (nominal_g.empty() || attacked_g.empty()) throw InvalidArgument("ROC needs nonempty nominal and attacked samples");
    std::vector<double> nominal(nominal_g.begin(), nominal_g.end());
    std::vector<double> attacked(attacked_g.begin(), attacked_g.end());
    std::vector<double> lambdas(thresholds.begin(), thresholds.end());
    std::sort(nominal.begin(), nominal.end());
    std::sort(attacked.begin(), attacked.end());
    std::sort(lambdas.begin(), lambdas.end());

    auto exceed = [](const std::vector<double>& sorted, double lambda) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), lambda);
        return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
    };
    RocCurve curve;
    curve.reserve(lambdas.size());
    for (double lambda : lambdas) {
        curve.push_back({lambda, exceed(nominal, lambda), exceed(attacked, lambda)});
    }
    return curve;
}

std::vector<double> quantile_thresholds(std::span<const double> nominal_g,
                                        std::span<const double> attacked_g, std::size_t points) {
    if (points < 2) throw InvalidArgument("need at least two thresholds");
    std::vector<double> pooled(nominal_g.begin(), nominal_g.end());
    pooled.insert(pooled.end(), attacked_g.begin(), attacked_g.end());
    if (pooled.empty()) throw InvalidArgument("no statistics to take quantiles of");
    std::sort(pooled.begin(), pooled.end());

    std::vector<double> out(points);
    const double last = static_cast<double>(pooled.size() - 1);
    for (std::size_t k = 0; k < points; ++k) {
        const auto rank = static_cast<std::size_t>(std::llround(last * static_cast<double>(k) / static_cast<double>(points - 1)));
        out[k] = pooled[rank];
    }
    out.front() = std::nextafter(pooled.front(), -std::numeric_limits<double>::infinity());
    return out;
}

double auc(const RocCurve& curve) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.size() + 2);
    pts.emplace_back(0.0, 0.0);
    for (const RocPoint& pt : curve) pts.emplace_back(pt.fpr, pt.tpr);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].first - pts[i - 1].first) * 0.5 * (pts[i].second + pts[i - 1].second);
    }
    return area;
}

}  // namespace ddad
