#include <gtest/gtest.h>

#include <random>

#include "ddad/bounds.hpp"
#include "ddad/error.hpp"
#include "ddad/estimation.hpp"
#include "oracles.hpp"

using namespace ddad;

TEST(Lyapunov, MatchesFixedPointIteration) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 8;
        const Matrix M = oracle::random_stable(d, 0.3 + 0.6 * (trial % 5) / 4.0, gen);
        const Matrix Q = oracle::random_psd(d, gen);
        const Matrix P = solve_discrete_lyapunov(M, Q);
        const Matrix ref = oracle::lyapunov_fixed_point(M, Q);
        EXPECT_LT((P - ref).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
        EXPECT_EQ(P, P.transpose());
    }
}

TEST(Lyapunov, ScalarClosedForm) {
    const Matrix P = solve_discrete_lyapunov(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 3.0));
    EXPECT_NEAR(P(0, 0), 4.0, 1e-14);
}

TEST(Lyapunov, RejectsUnstableModel) {
    try {
        solve_discrete_lyapunov(Matrix::Constant(1, 1, 1.0), Matrix::Identity(1, 1));
        FAIL() << "expected EstimationError";
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.kind(), EstimationFailure::UnstableModel);
        EXPECT_NEAR(e.spectral_radius(), 1.0, 1e-12);
    }
}

TEST(Ols, NoiselessRecovery) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 6;
        const Matrix M = oracle::random_stable(d, 0.9, gen);
        DataMatrices dm;
        dm.F = Matrix(d, 5 * d);
        for (Index i = 0; i < dm.F.size(); ++i) dm.F.data()[i] = nd(gen);
        dm.F_next = M * dm.F;
        const Matrix M_hat = ols_fit(dm);
        EXPECT_LT(oracle::rel_err(M_hat, M), 1e-10);
        EXPECT_LT(residual_covariance(dm, M_hat).cwiseAbs().maxCoeff(), 1e-20 + 1e-12 * dm.F.squaredNorm());
    }
}

TEST(Ols, RankDeficientDesignIsInsufficientData) {
    DataMatrices dm;
    dm.F = Matrix::Ones(3, 10);
    dm.F_next = Matrix::Ones(3, 10);
    try {
        ols_fit(dm);
        FAIL() << "expected EstimationError";
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.kind(), EstimationFailure::InsufficientData);
    }
}

TEST(Direct, ScalarHandValue) {
    std::vector<BehaviorVector> zs = {{Vector::Constant(1, 1.0), 1}, {Vector::Constant(1, -3.0), 1}};
    const CovarianceEstimate est = direct_covariance(zs);
    EXPECT_DOUBLE_EQ(est.S(0, 0), 5.0);  // (1 + 9) / 2, divisor N
    EXPECT_EQ(est.method, CovarianceMethod::Direct);
    EXPECT_EQ(est.N, 2);
}

TEST(Direct, MatchesExactCovarianceForLargeN) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 1);
    const Matrix S = true_behavior_covariance(sys, NoiseSpec{}, 7).S;
    const ExperimentSet data = generate_experiments(sys, NoiseSpec{}, 20000, 7, 9);
    EXPECT_LT(oracle::rel_err(direct_covariance(data).S, S), 0.05);
}

TEST(SigmaD, BlockStructureAndSymmetry) {
    std::mt19937_64 gen(8);
    const Matrix M = oracle::random_stable(4, 0.7, gen);
    const Matrix P = solve_discrete_lyapunov(M, oracle::random_psd(4, gen));
    const Matrix SD = assemble_sigma_D(M, P, 6, 3);
    ASSERT_EQ(SD.rows(), 16);
    EXPECT_EQ(SD, SD.transpose());
    EXPECT_TRUE(SD.block(8, 0, 4, 4).isApprox(M * M * P, 1e-13));
    EXPECT_TRUE(SD.block(0, 12, 4, 4).isApprox((M * M * M * P).transpose(), 1e-13));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(SD);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10 * eig.eigenvalues().maxCoeff());
    const Matrix F = assemble_F(M, 6, 3);
    EXPECT_TRUE(F.block(4, 12, 4, 4).isApprox(M * M, 1e-13));
}

TEST(Indirect, ExactAtWindowEqualToOrderForStationaryDeterministicPlant) {
    // Without process or measurement noise, a window of n samples carries the
    // state, so the minor behaviors of a stationary run are exactly VAR(1).
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const LtiSystem sys = random_stable_system(3, 1, 1, seed);
        const NoiseSpec nz{1, 0, 0};
        const Matrix S = oracle::stationary_behavior_covariance(sys, nz, 7);
        const IndirectResult exact = population_indirect_model(S, 7, 3, 1, 1);
        EXPECT_LT(oracle::rel_err(exact.estimate.S, S), 1e-10) << "seed " << seed;
        const IndirectResult shorter = population_indirect_model(S, 7, 1, 1, 1);
        EXPECT_GT(oracle::rel_err(shorter.estimate.S, S), 1e-4) << "seed " << seed;
    }
}

TEST(Indirect, ConvergesToItsPopulationModel) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 1);
    const int T = 7, L = 3;
    const Matrix S = true_behavior_covariance(sys, NoiseSpec{}, T).S;
    const Matrix target = population_indirect_model(S, T, L, 1, 1).estimate.S;
    const double e_small = oracle::rel_err(indirect_covariance(generate_experiments(sys, NoiseSpec{}, 200, T, 3), L).estimate.S, target);
    const double e_large = oracle::rel_err(indirect_covariance(generate_experiments(sys, NoiseSpec{}, 12800, T, 3), L).estimate.S, target);
    EXPECT_LT(e_large, 0.03);
    EXPECT_LT(e_large, e_small);
}

TEST(Indirect, NearlyUnbiasedOnStationaryData) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 1);
    const Matrix S = oracle::stationary_behavior_covariance(sys, NoiseSpec{}, 7);
    EXPECT_LT(oracle::rel_err(population_indirect_model(S, 7, 3, 1, 1).estimate.S, S), 0.01);
}

TEST(Indirect, ResultIsSymmetricPsdAndRecordsModel) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 2);
    const IndirectResult res = indirect_covariance(generate_experiments(sys, NoiseSpec{}, 60, 7, 1), 3);
    EXPECT_EQ(res.estimate.S, res.estimate.S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(res.estimate.S);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * eig.eigenvalues().maxCoeff());
    EXPECT_EQ(res.estimate.method, CovarianceMethod::Indirect);
    EXPECT_EQ(res.estimate.L, 3);
    EXPECT_LT(res.model.spectral_radius, 1.0);
    EXPECT_EQ(res.model.M_hat.rows(), 6);
}

TEST(Indirect, TooFewPairsIsInsufficientData) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 2);
    // one experiment gives 4 regression pairs for 6 regressors
    try {
        indirect_covariance(generate_experiments(sys, NoiseSpec{}, 1, 7, 1), 3);
        FAIL() << "expected EstimationError";
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.kind(), EstimationFailure::InsufficientData);
    }
}

TEST(RepairPsd, ClipsNegativeEigenvalues) {
    Matrix S(2, 2);
    S << 1, 2, 2, 1;  // eigenvalues 3, -1
    Matrix fixed = S;
    EXPECT_TRUE(repair_psd(fixed));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(fixed);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-15);
    EXPECT_NEAR(fixed(0, 0), 1.5, 1e-14);
    Matrix good = Matrix::Identity(2, 2);
    EXPECT_FALSE(repair_psd(good));
}

TEST(Kronecker, SmallHandValue) {
    Matrix a(1, 2), b(2, 1);
    a << 1, 2;
    b << 3, 4;
    Matrix expected(2, 2);
    expected << 3, 6, 4, 8;
    EXPECT_EQ(kronecker(a, b), expected);
}
