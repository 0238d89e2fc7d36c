// Finite-sample error bounds and perturbation sensitivities, evaluated as
// diagnostics next to the empirically measured estimation errors.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddad/types.hpp"

namespace ddad {

struct BoundReport {
    double bound = 0.0;
    double confidence = 0.0;  // probability that the bound holds
    bool applicable = true;   // false when the result's sample-size precondition fails
    std::string note;
    std::vector<std::pair<std::string, double>> inputs;

    double input(const std::string& name) const;
};

double spectral_norm(const Matrix& M);

/// Sample-covariance bound: with r = tr(S)/||S||,
///   ||S - S^d|| <= (sqrt(2 theta (r+1)/N) + 2 theta r / N) ||S||
/// with probability at least 1 - 2 d e^{-theta}, d = dim S, valid for N > d.
BoundReport direct_bound(const Matrix& S, int N, double theta);

/// sum_{j=0}^{N_id} M^j (M^j)^T, truncated once the trace of a term drops
/// below 1e-14 of the running trace.
Matrix gramian_sum(const Matrix& M, long long N_id);

/// sqrt(8 d (log(5/theta) + (log(4 tr Gamma) + 1)/2)) with d = L(m+p).
double ols_gamma(double trace_gamma, int dim, double theta);

/// ||M - M_hat|| <= sqrt(k/N_id) gamma(M, theta/4) with probability 1 - theta,
/// for N_id >= max(N_eta(theta), N_s(theta)). Throws EstimationError when rho(M) >= 1.
BoundReport ols_bound(const Matrix& M, int L, int m, int p, long long N_id, double theta, double k = 1.0);

/// Smallest k for which sqrt(k/N_id) * gamma covers at least (1 - theta) of the
/// observed ||M - M_hat|| values.
double calibrate_ols_constant(std::span<const double> errors, double gamma, long long N_id, double theta);

struct SensitivityReport {
    double value = 0.0;
    bool precondition_met = false;  // Delta_P and Delta_Sigma_eps both PSD
};

/// Lyapunov-solution sensitivity at the perturbed model (M + dM, Sigma_eps + dSigma_eps):
///   sqrt(d) ||I (x) I - M^T (x) M^T|| [ (1 + ||M+dM||)^2 ||dSigma|| / ||Sigma+dSigma||
///                                     + 2 (||M|| + ||dM||)^2 ||dM|| / ||M+dM|| ].
SensitivityReport sensitivity_P(const Matrix& M, const Matrix& dM, const Matrix& Sigma_eps,
                                const Matrix& dSigma_eps, int L, int m, int p);

/// ||F(M)|| + 1 + 2 sum_{k=1}^{T-L} ||M + dM||^k.
double sensitivity_F(const Matrix& M, const Matrix& dM, int T, int L);

/// F_norm dP + dF P_norm + dF dP. Confidence is the product of the two inputs'
/// confidences, a heuristic that treats the events as independent.
BoundReport indirect_bound(double F_norm, double P_norm, double dP_bound, double dF_bound,
                           double confidence_P = 1.0, double confidence_F = 1.0);

}  // namespace ddad
