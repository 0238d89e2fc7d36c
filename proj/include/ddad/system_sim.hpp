// LTI plant definition, trajectory simulation under nominal and attacked
// operation, and the exact finite-horizon behavior covariance.
//
//   x_{t+1} = A x_t + B u_t + w_t + Ba ua_t
//   y_t     = C x_t + v_t + Ga ya_t,        x_0 = 0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ddad/rng.hpp"
#include "ddad/types.hpp"

namespace ddad {

struct LtiSystem {
    Matrix A;   // n x n
    Matrix B;   // n x m
    Matrix C;   // p x n
    Matrix Ba;  // n x m, actuator attack channel
    Matrix Ga;  // p x p, sensor attack channel
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }

    /// Validates dimensions, stability, controllability and observability.
    /// Ba defaults to B and Ga to the identity.
    static LtiSystem make(Matrix A, Matrix B, Matrix C, std::optional<Matrix> Ba = std::nullopt,
                          std::optional<Matrix> Ga = std::nullopt, std::uint64_t seed = 0);

    /// Stable hex digest of the matrices, used to tie datasets to the plant.
    std::string fingerprint() const;
};

struct NoAttack {};
/// ua_t, ya_t i.i.d. N(0, variance) per coordinate.
struct GaussianInjection {
    double variance = 1.5;
};
/// Row t of u_a is ua_t (t = 0..T-1); row k of y_a is ya_{k+1}.
struct ExplicitAttack {
    Matrix u_a;  // T x m
    Matrix y_a;  // T x p
};
using AttackSpec = std::variant<NoAttack, GaussianInjection, ExplicitAttack>;

/// Row t of `inputs` is u_t (t = 0..T-1); row k of `outputs` is y_{k+1}.
struct Trajectory {
    Matrix inputs;   // T x m
    Matrix outputs;  // T x p

    int horizon() const { return static_cast<int>(inputs.rows()); }
    int m() const { return static_cast<int>(inputs.cols()); }
    int p() const { return static_cast<int>(outputs.cols()); }
    bool operator==(const Trajectory& other) const {
        return inputs == other.inputs && outputs == other.outputs;
    }
};

struct ExperimentSet {
    std::vector<Trajectory> trajectories;
    std::string system_fingerprint;
    NoiseSpec noise;
    std::uint64_t master_seed = 0;

    int size() const { return static_cast<int>(trajectories.size()); }
    int horizon() const { return trajectories.front().horizon(); }
    int m() const { return trajectories.front().m(); }
    int p() const { return trajectories.front().p(); }
    /// Throws InvalidArgument when empty or when trajectories disagree on T, m, p.
    void validate() const;
};

double spectral_radius(const Matrix& M);
Matrix controllability_matrix(const Matrix& A, const Matrix& B);
Matrix observability_matrix(const Matrix& A, const Matrix& C);

/// Gaussian A rescaled to spectral radius 0.8, Gaussian B and C; redrawn
/// until the pair checks pass. Deterministic in `seed`.
LtiSystem random_stable_system(int n, int m, int p, std::uint64_t seed);

/// Draw order is fixed: all of u, then w, then v, then (for Gaussian
/// injection) ua and ya. Runs sharing a stream therefore share the nominal
/// noise realization regardless of the attack.
Trajectory simulate(const LtiSystem& sys, const NoiseSpec& noise, const AttackSpec& attack, int T,
                    Rng& rng);

/// Trajectory i is drawn from the stream derive_seed(master_seed, {i}).
ExperimentSet generate_experiments(const LtiSystem& sys, const NoiseSpec& noise, int N, int T,
                                   std::uint64_t master_seed);

/// Tp x T·cols block lower-triangular Toeplitz matrix with block (i, j) = C A^{i-j} G.
Matrix block_toeplitz(const Matrix& A, const Matrix& G, const Matrix& C, int T);

struct MarkovToeplitz {
    Matrix input;    // maps u to y
    Matrix process;  // maps w to y (B replaced by I)
};
MarkovToeplitz markov_toeplitz(const LtiSystem& sys, int T);

/// Exact E[Z Z^T] for the nominal system over horizon T from x_0 = 0.
CovarianceEstimate true_behavior_covariance(const LtiSystem& sys, const NoiseSpec& noise, int T);

}  // namespace ddad
