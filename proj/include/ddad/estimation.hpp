// Data-driven estimators of the behavior covariance S.
//
// Direct:   S^d = (1/N) sum_i z_i z_i^T.
// Indirect: fit f_{t+1} = M f_t + eps_t by least squares over all minor
//           behaviors, take Sigma_eps from the residuals, solve
//           P = M P M^T + Sigma_eps, assemble the block autocovariance
//           Sigma_D of [f_1; ...; f_{T-L+1}] and return K Sigma_D K^T.
#pragma once

#include <span>

#include "ddad/behavior.hpp"
#include "ddad/system_sim.hpp"
#include "ddad/types.hpp"

namespace ddad {

/// Identified VAR(1) model of the minor behaviors.
struct IndirectModel {
    Matrix M_hat;
    Matrix Sigma_eps_hat;
    Matrix P_hat;
    int T = 0;
    int L = 0;
    double spectral_radius = 0.0;

    int blocks() const { return T - L + 1; }
    /// Block matrix with M_hat^{|i-j|} in block (i, j).
    Matrix F() const;
};

struct IndirectResult {
    CovarianceEstimate estimate;
    IndirectModel model;
};

CovarianceEstimate direct_covariance(std::span<const BehaviorVector> behaviors);
CovarianceEstimate direct_covariance(const ExperimentSet& data);

/// argmin_M ||F_next - M F||_F, i.e. F_next F^T (F F^T)^{-1}.
/// Throws EstimationError(InsufficientData) when F F^T is singular.
Matrix ols_fit(const DataMatrices& dm);

/// (1/N_id) E E^T with E = F_next - M F and N_id the number of regression pairs.
Matrix residual_covariance(const DataMatrices& dm, const Matrix& M);

/// Unique symmetric P with P = M P M^T + Q, from (I - M (x) M) vec(P) = vec(Q).
/// Throws EstimationError(UnstableModel) when rho(M) >= 1 - 1e-9.
Matrix solve_discrete_lyapunov(const Matrix& M, const Matrix& Q);

/// Block (i, j) is M^{i-j} P for i >= j and P (M^{j-i})^T for i < j, with
/// T - L + 1 blocks per side.
Matrix assemble_sigma_D(const Matrix& M, const Matrix& P, int T, int L);

/// Block matrix with M^{|i-j|} in block (i, j), T - L + 1 blocks per side.
Matrix assemble_F(const Matrix& M, int T, int L);

/// Everything downstream of the regression: Lyapunov solve, Sigma_D,
/// K Sigma_D K^T, symmetrization and PSD repair.
IndirectResult indirect_from_model(const Matrix& M, const Matrix& Sigma_eps, int T, int L, int m, int p);

IndirectResult indirect_covariance(const ExperimentSet& data, int L);

/// Large-sample limit of the indirect pipeline given the exact behavior
/// covariance: the pooled regression moments are read off S instead of data.
/// The returned estimate is the covariance the indirect method converges to,
/// which differs from S whenever the minor behaviors are not a stationary VAR(1).
IndirectResult population_indirect_model(const Matrix& S, int T, int L, int m, int p);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Clips eigenvalues below zero when the most negative one is beyond
/// -rel_tol * ||S||. Returns true when clipping happened.
bool repair_psd(Matrix& S, double rel_tol = 1e-8);

}  // namespace ddad
