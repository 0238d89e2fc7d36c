#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddad/bound_study.hpp"
#include "ddad/bounds.hpp"
#include "ddad/error.hpp"
#include "ddad/estimation.hpp"
#include "oracles.hpp"

using namespace ddad;

TEST(DirectBound, ScalarHandValue) {
    const BoundReport rep = direct_bound(Matrix::Constant(1, 1, 4.0), 10, 1.0);
    // r = 1: (sqrt(2*1*2/10) + 2/10) * 4
    EXPECT_NEAR(rep.bound, (std::sqrt(0.4) + 0.2) * 4.0, 1e-14);
    EXPECT_NEAR(rep.confidence, 1.0 - 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_TRUE(rep.applicable);
    EXPECT_DOUBLE_EQ(rep.input("r"), 1.0);
}

TEST(DirectBound, PreconditionAndVacuousConfidence) {
    const Matrix S = Matrix::Identity(14, 14);
    EXPECT_FALSE(direct_bound(S, 14, 5.0).applicable);
    EXPECT_TRUE(direct_bound(S, 15, 5.0).applicable);
    const BoundReport weak = direct_bound(S, 100, 1.0);
    EXPECT_EQ(weak.confidence, 0.0);
    EXPECT_FALSE(weak.note.empty());
    EXPECT_NEAR(direct_bound(S, 100, 5.0).confidence, 1.0 - 28.0 * std::exp(-5.0), 1e-15);
    EXPECT_THROW(direct_bound(S, 0, 5.0), InvalidArgument);
}

TEST(OlsBound, GramianScalarGeometricSeries) {
    const double a = 0.6;
    const Matrix G = gramian_sum(Matrix::Constant(1, 1, a), 1000000);
    EXPECT_NEAR(G(0, 0), 1.0 / (1.0 - a * a), 1e-12);
    const Matrix G3 = gramian_sum(Matrix::Constant(1, 1, a), 3);
    EXPECT_NEAR(G3(0, 0), 1 + a * a + std::pow(a, 4) + std::pow(a, 6), 1e-15);
    EXPECT_THROW(gramian_sum(Matrix::Constant(1, 1, 1.0), 10), EstimationError);
}

TEST(OlsBound, GammaAndBoundHandValues) {
    // d = 2, theta = 0.5, tr = 2
    EXPECT_NEAR(ols_gamma(2.0, 2, 0.5), std::sqrt(16.0 * (std::log(10.0) + (std::log(8.0) + 1.0) / 2.0)), 1e-13);
    const Matrix M = Matrix::Zero(2, 2);  // Gamma = I, trace 2
    const BoundReport rep = ols_bound(M, 1, 1, 1, 400, 0.4, 1.0);
    EXPECT_NEAR(rep.bound, std::sqrt(1.0 / 400.0) * ols_gamma(2.0, 2, 0.1), 1e-14);
    EXPECT_NEAR(rep.confidence, 0.6, 1e-15);
    EXPECT_NEAR(rep.input("N_eta"), std::log(5.0) + 2 * std::log(5.0), 1e-13);
    EXPECT_NEAR(rep.input("N_s"), 2 * std::log(3.0) + 4 * std::log(12.5), 1e-13);
    EXPECT_TRUE(rep.applicable);
    EXPECT_FALSE(ols_bound(M, 1, 1, 1, 5, 0.4, 1.0).applicable);
}

TEST(OlsBound, CalibrationPicksEmpiricalQuantile) {
    const std::vector<double> errs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    // 90% coverage needs the 9th smallest error, 0.9: k = N_id (0.9 / gamma)^2
    const double k = calibrate_ols_constant(errs, 2.0, 100, 0.1);
    EXPECT_NEAR(k, 100 * 0.45 * 0.45, 1e-12);
    int covered = 0;
    for (double e : errs) covered += (e <= std::sqrt(k / 100.0) * 2.0 + 1e-15) ? 1 : 0;
    EXPECT_EQ(covered, 9);
}

TEST(Sensitivity, FScalarHandValue) {
    // T - L = 2, M = 0.5, dM = 0.1: ||F|| + 1 + 2 (0.6 + 0.36)
    const Matrix M = Matrix::Constant(1, 1, 0.5), dM = Matrix::Constant(1, 1, 0.1);
    Eigen::Matrix3d F;
    F << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
    const double normF = F.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    EXPECT_NEAR(sensitivity_F(M, dM, 4, 2), normF + 1 + 2 * (0.6 + 0.36), 1e-13);
}

TEST(Sensitivity, FBoundsMeasuredPerturbation) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix M = oracle::random_stable(4, 0.7, gen);
        const Matrix dM = oracle::random_stable(4, 0.05, gen);
        const double dF = spectral_norm(assemble_F(M + dM, 7, 3) - assemble_F(M, 7, 3));
        EXPECT_LE(dF, sensitivity_F(M, dM, 7, 3));
    }
}

TEST(Sensitivity, PCoversSmallPsdPerturbations) {
    std::mt19937_64 gen(21);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> scale(0.0, 1e-3);
    auto gaussian = [&] {
        Matrix X(6, 6);
        for (Index i = 0; i < X.size(); ++i) X.data()[i] = nd(gen);
        return X;
    };
    int covered = 0, accepted = 0;
    for (int tries = 0; accepted < 500 && tries < 200000; ++tries) {
        const Matrix M = oracle::random_stable(6, 0.8, gen);
        const Matrix G = gaussian();
        const Matrix Q = G * G.transpose() / 6.0;
        Matrix dM = gaussian();
        dM *= scale(gen) / spectral_norm(dM);
        const Matrix H = gaussian();
        Matrix dQ = H * H.transpose();
        dQ *= scale(gen) / spectral_norm(dQ);
        const SensitivityReport rep = sensitivity_P(M, dM, Q, dQ, 3, 1, 1);
        if (!rep.precondition_met) continue;
        ++accepted;
        const double dP = spectral_norm(solve_discrete_lyapunov(M + dM, Q + dQ) - solve_discrete_lyapunov(M, Q));
        covered += dP <= rep.value ? 1 : 0;
    }
    ASSERT_EQ(accepted, 500);
    EXPECT_GE(covered, 475);
}

TEST(Sensitivity, PreconditionDetectsIndefinitePerturbation) {
    const Matrix M = Matrix::Identity(2, 2) * 0.5;
    const Matrix Q = Matrix::Identity(2, 2);
    Matrix dQ(2, 2);
    dQ << 0.1, 0, 0, -0.1;
    EXPECT_FALSE(sensitivity_P(M, Matrix::Zero(2, 2), Q, dQ, 1, 1, 1).precondition_met);
    EXPECT_TRUE(sensitivity_P(M, Matrix::Zero(2, 2), Q, Matrix::Identity(2, 2) * 0.1, 1, 1, 1).precondition_met);
}

TEST(IndirectBound, Arithmetic) {
    const BoundReport rep = indirect_bound(2.0, 3.0, 0.5, 0.25, 0.9, 0.8);
    EXPECT_DOUBLE_EQ(rep.bound, 2.0 * 0.5 + 0.25 * 3.0 + 0.25 * 0.5);
    EXPECT_DOUBLE_EQ(rep.confidence, 0.72);
    EXPECT_NEAR(indirect_bound(2.0, 1.0, 0.1, 0.2).bound, 0.42, 1e-15);
    EXPECT_THROW(indirect_bound(-1, 1, 1, 1), InvalidArgument);
}

TEST(BoundStudy, SmallRunIsConsistent) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 1);
    BoundStudyConfig cfg;
    cfg.runs = 20;
    cfg.calibrate_k = true;
    const BoundStudyResult res = run_bound_study(sys, cfg);
    EXPECT_EQ(res.direct.evaluated, 20);
    EXPECT_GT(res.direct.report.bound, res.direct.median_error);
    EXPECT_EQ(res.indirect.exceedance, 0.0);
    EXPECT_GT(res.calibrated_k, 0.0);
    EXPECT_GT(res.indirect_bias, 0.0);
    cfg.runs = 0;
    EXPECT_THROW(run_bound_study(sys, cfg), InvalidArgument);
}
