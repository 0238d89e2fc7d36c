#include <gtest/gtest.h>

#include "ddad/error.hpp"
#include "ddad/rng.hpp"
#include "ddad/system_sim.hpp"
#include "oracles.hpp"

using namespace ddad;

namespace {

LtiSystem scalar_system(double a, double b, double c) {
    return LtiSystem::make(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c));
}

}  // namespace

TEST(SystemSim, RandomSystemIsStableControllableObservable) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const LtiSystem sys = random_stable_system(3, 1, 1, seed);
        EXPECT_NEAR(spectral_radius(sys.A), 0.8, 1e-12);
        Eigen::FullPivLU<Matrix> ctrb(controllability_matrix(sys.A, sys.B));
        Eigen::FullPivLU<Matrix> obsv(observability_matrix(sys.A, sys.C));
        EXPECT_EQ(ctrb.rank(), 3);
        EXPECT_EQ(obsv.rank(), 3);
    }
}

TEST(SystemSim, RandomSystemIsDeterministicInSeed) {
    EXPECT_EQ(random_stable_system(3, 1, 1, 7).fingerprint(), random_stable_system(3, 1, 1, 7).fingerprint());
    EXPECT_NE(random_stable_system(3, 1, 1, 7).fingerprint(), random_stable_system(3, 1, 1, 8).fingerprint());
}

TEST(SystemSim, MakeRejectsBadPlants) {
    EXPECT_THROW(scalar_system(1.2, 1, 1), InvalidArgument);
    EXPECT_THROW(scalar_system(0.5, 0, 1), InvalidArgument);
    EXPECT_THROW(scalar_system(0.5, 1, 0), InvalidArgument);
    EXPECT_THROW(LtiSystem::make(Matrix::Identity(2, 2) * 0.5, Matrix::Ones(3, 1), Matrix::Ones(1, 2)), InvalidArgument);
    EXPECT_NO_THROW(scalar_system(-0.9, 2, 0.5));
}

TEST(SystemSim, ScalarToeplitzHandValues) {
    const LtiSystem sys = scalar_system(0.5, 2.0, 3.0);
    const Matrix C = markov_toeplitz(sys, 3).input;
    // y_{k+1} = sum_j c a^{k-j} b u_j
    Matrix expected(3, 3);
    expected << 6, 0, 0, 3, 6, 0, 1.5, 3, 6;
    EXPECT_TRUE(C.isApprox(expected, 1e-15));
    const Matrix Cw = markov_toeplitz(sys, 3).process;
    Matrix expected_w(3, 3);
    expected_w << 3, 0, 0, 1.5, 3, 0, 0.75, 1.5, 3;
    EXPECT_TRUE(Cw.isApprox(expected_w, 1e-15));
}

TEST(SystemSim, ScalarCovarianceHandValues) {
    // T = 1: Z = [u0, y1], y1 = c b u0 + c w0 + v0.
    const LtiSystem sys = scalar_system(0.5, 2.0, 3.0);
    const NoiseSpec nz{0.7, 0.2, 0.1};
    const Matrix S = true_behavior_covariance(sys, nz, 1).S;
    EXPECT_NEAR(S(0, 0), 0.7, 1e-15);
    EXPECT_NEAR(S(0, 1), 6 * 0.7, 1e-14);
    EXPECT_NEAR(S(1, 1), 36 * 0.7 + 9 * 0.2 + 0.1, 1e-13);
}

TEST(SystemSim, NoiselessOutputsEqualToeplitzTimesInput) {
    const LtiSystem sys = random_stable_system(3, 2, 2, 4);
    const int T = 6;
    Rng rng(11);
    const Trajectory tr = simulate(sys, NoiseSpec{1, 0, 0}, NoAttack{}, T, rng);
    Vector u(T * 2), y(T * 2);
    for (int t = 0; t < T; ++t) {
        u.segment(t * 2, 2) = tr.inputs.row(t).transpose();
        y.segment(t * 2, 2) = tr.outputs.row(t).transpose();
    }
    EXPECT_LT((markov_toeplitz(sys, T).input * u - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SystemSim, TrueCovarianceMatchesPropagation) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const LtiSystem sys = random_stable_system(3, 2, 1, seed);
        const NoiseSpec nz{1.3, 0.4, 0.9};
        const Matrix S = true_behavior_covariance(sys, nz, 5).S;
        const Matrix ref = oracle::behavior_covariance_by_propagation(sys, nz, 5);
        EXPECT_LT((S - ref).cwiseAbs().maxCoeff(), 1e-11 * ref.cwiseAbs().maxCoeff());
    }
}

TEST(SystemSim, SameStreamSharesNominalNoiseAcrossAttacks) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 2);
    Rng a(5), b(5);
    const Trajectory nominal = simulate(sys, NoiseSpec{}, NoAttack{}, 7, a);
    const Trajectory attacked = simulate(sys, NoiseSpec{}, GaussianInjection{1.5}, 7, b);
    EXPECT_EQ(nominal.inputs, attacked.inputs);
    EXPECT_NE(nominal.outputs, attacked.outputs);
}

TEST(SystemSim, ExplicitAttackEntersThroughBaAndGa) {
    const LtiSystem sys = scalar_system(0.5, 1.0, 1.0);
    ExplicitAttack atk{Matrix::Zero(3, 1), Matrix::Zero(3, 1)};
    atk.u_a(0, 0) = 1.0;  // x_1 += 1
    atk.y_a(2, 0) = 4.0;  // y_3 += 4
    Rng a(9), b(9);
    const Trajectory base = simulate(sys, NoiseSpec{}, NoAttack{}, 3, a);
    const Trajectory hit = simulate(sys, NoiseSpec{}, atk, 3, b);
    const Matrix diff = hit.outputs - base.outputs;
    EXPECT_NEAR(diff(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(diff(1, 0), 0.5, 1e-14);
    EXPECT_NEAR(diff(2, 0), 0.25 + 4.0, 1e-14);
    EXPECT_THROW(
        [&] {
            Rng c(1);
            simulate(sys, NoiseSpec{}, ExplicitAttack{Matrix::Zero(2, 1), Matrix::Zero(3, 1)}, 3, c);
        }(),
        InvalidArgument);
}

TEST(SystemSim, ExperimentsAreReproducibleAndIndependentOfN) {
    const LtiSystem sys = random_stable_system(3, 1, 1, 3);
    const ExperimentSet a = generate_experiments(sys, NoiseSpec{}, 10, 7, 42);
    const ExperimentSet b = generate_experiments(sys, NoiseSpec{}, 25, 7, 42);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.trajectories[i], b.trajectories[i]);
    EXPECT_EQ(a.system_fingerprint, sys.fingerprint());
}

TEST(SystemSim, NoiseSpecValidation) {
    EXPECT_THROW((NoiseSpec{-1, 1, 1}.validate()), InvalidArgument);
    EXPECT_THROW((NoiseSpec{1, std::nan(""), 1}.validate()), InvalidArgument);
    EXPECT_NO_THROW((NoiseSpec{0, 0, 0}.validate()));
}

TEST(Rng, DeriveSeedSeparatesPaths) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {0, 0}));
}
