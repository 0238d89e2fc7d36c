#include "ddad/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ddad/error.hpp"
#include "ddad/estimation.hpp"
#include "ddad/system_sim.hpp"

namespace ddad {
namespace {

bool is_psd(const Matrix& S, double rel_tol = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    return ev.minCoeff() >= -rel_tol * scale;
}

}  // namespace

double BoundReport::input(const std::string& name) const {
    for (const auto& [key, value] : inputs) {
        if (key == name) return value;
    }
    throw InvalidArgument("bound report has no input '" + name + "'");
}

double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    if (M.rows() > 64 || M.cols() > 64) {
        Eigen::BDCSVD<Matrix> svd(M);
        return svd.singularValues()(0);
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

BoundReport direct_bound(const Matrix& S, int N, double theta) {
    if (S.rows() != S.cols() || S.rows() == 0) throw InvalidArgument("S must be a nonempty square matrix");
    if (N < 1) throw InvalidArgument("N must be >= 1");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidArgument("theta must be finite and >= 0");

    const double d = static_cast<double>(S.rows());
    const double norm = spectral_norm(S);
    const double r = norm > 0.0 ? S.trace() / norm : 0.0;
    const double n = static_cast<double>(N);

    BoundReport rep;
    rep.bound = (std::sqrt(2.0 * theta * (r + 1.0) / n) + 2.0 * theta * r / n) * norm;
    rep.confidence = std::max(0.0, 1.0 - 2.0 * d * std::exp(-theta));
    rep.applicable = N > S.rows();
    if (!rep.applicable) {
        rep.note = "precondition N > T(m+p) violated";
    } else if (rep.confidence == 0.0) {
        rep.note = "vacuous: confidence is zero";
    }
    rep.inputs = {{"theta", theta}, {"N", n}, {"dim", d}, {"r", r}, {"norm_S", norm}};
    return rep;
}

Matrix gramian_sum(const Matrix& M, long long N_id) {
    if (M.rows() != M.cols()) throw InvalidArgument("M must be square");
    if (N_id < 0) throw InvalidArgument("N_id must be >= 0");
    const double rho = spectral_radius(M);
    if (!(rho < 1.0)) {
        throw EstimationError(EstimationFailure::UnstableModel,
                              "Gamma_N diverges: spectral radius " + std::to_string(rho), rho);
    }
    Matrix gamma = Matrix::Identity(M.rows(), M.cols());
    Matrix Mj = Matrix::Identity(M.rows(), M.cols());
    for (long long j = 1; j <= N_id; ++j) {
        Mj = M * Mj;
        const Matrix term = Mj * Mj.transpose();
        gamma += term;
        if (term.trace() < 1e-14 * gamma.trace()) break;
    }
    return gamma;
}

double ols_gamma(double trace_gamma, int dim, double theta) {
    return std::sqrt(8.0 * dim *
                     (std::log(5.0 / theta) + (std::log(4.0 * trace_gamma) + 1.0) / 2.0));
}

BoundReport ols_bound(const Matrix& M, int L, int m, int p, long long N_id, double theta, double k) {
    const int dim = L * (m + p);
    if (M.rows() != dim || M.cols() != dim) throw InvalidArgument("M must be L(m+p) square");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    if (!(k > 0.0)) throw InvalidArgument("k must be positive");
    if (N_id < 1) throw InvalidArgument("N_id must be >= 1");

    const double tr = gramian_sum(M, N_id).trace();
    const double gamma = ols_gamma(tr, dim, theta / 4.0);
    const double n_eta = k * std::log(2.0 / theta) + dim * std::log(5.0);
    const double n_s = k * (dim * std::log(tr + 1.0) + 2.0 * dim * std::log(5.0 / theta));

    BoundReport rep;
    rep.bound = std::sqrt(k / static_cast<double>(N_id)) * gamma;
    rep.confidence = 1.0 - theta;
    rep.applicable = static_cast<double>(N_id) >= std::max(n_eta, n_s);
    if (!rep.applicable) rep.note = "N_id below max(N_eta, N_s)";
    rep.inputs = {{"theta", theta}, {"k", k}, {"N_id", static_cast<double>(N_id)}, {"dim", double(dim)},
                  {"trace_gamma", tr}, {"gamma_s", gamma}, {"N_eta", n_eta}, {"N_s", n_s}};
    return rep;
}

double calibrate_ols_constant(std::span<const double> errors, double gamma, long long N_id, double theta) {
    if (errors.empty()) throw InvalidArgument("need at least one observed error");
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    // bound >= e  <=>  k >= N_id (e / gamma)^2
    std::vector<double> needed;
    needed.reserve(errors.size());
    for (double e : errors) {
        const double ratio = e / gamma;
        needed.push_back(static_cast<double>(N_id) * ratio * ratio);
    }
    std::sort(needed.begin(), needed.end());
    const auto count = static_cast<std::size_t>(std::ceil((1.0 - theta) * static_cast<double>(needed.size())));
    return needed[std::clamp<std::size_t>(count, 1, needed.size()) - 1];
}

SensitivityReport sensitivity_P(const Matrix& M, const Matrix& dM, const Matrix& Sigma_eps,
                                const Matrix& dSigma_eps, int L, int m, int p) {
    const Index d = static_cast<Index>(L) * (m + p);
    for (const Matrix* X : {&M, &dM, &Sigma_eps, &dSigma_eps}) {
        if (X->rows() != d || X->cols() != d) throw InvalidArgument("sensitivity inputs must be L(m+p) square");
    }
    const Matrix M_pert = M + dM;
    const Matrix sigma_pert = Sigma_eps + dSigma_eps;
    const double norm_M_pert = spectral_norm(M_pert);
    const double norm_sigma_pert = spectral_norm(sigma_pert);
    if (norm_M_pert == 0.0 || norm_sigma_pert == 0.0) {
        throw InvalidArgument("degenerate perturbation: ||M + dM|| or ||Sigma + dSigma|| is zero");
    }
    const Matrix Mt = M.transpose();
    const double lyap_norm = spectral_norm(Matrix::Identity(d * d, d * d) - kronecker(Mt, Mt));
    const double norm_dM = spectral_norm(dM);
    const double a = 1.0 + norm_M_pert;
    const double b = spectral_norm(M) + norm_dM;

    SensitivityReport rep;
    rep.value = std::sqrt(static_cast<double>(d)) * lyap_norm *
                (a * a * (spectral_norm(dSigma_eps) / norm_sigma_pert) + 2.0 * b * b * (norm_dM / norm_M_pert));

    rep.precondition_met = is_psd(dSigma_eps);
    if (rep.precondition_met) {
        try {
            const Matrix dP = solve_discrete_lyapunov(M_pert, sigma_pert) - solve_discrete_lyapunov(M, Sigma_eps);
            rep.precondition_met = is_psd(dP);
        } catch (const EstimationError&) {
            rep.precondition_met = false;
        }
    }
    return rep;
}

double sensitivity_F(const Matrix& M, const Matrix& dM, int T, int L) {
    if (M.rows() != M.cols() || dM.rows() != M.rows() || dM.cols() != M.cols()) {
        throw InvalidArgument("M and dM must be square and equal size");
    }
    const double q = spectral_norm(M + dM);
    double sum = 0.0, qk = 1.0;
    for (int k = 1; k <= T - L; ++k) {
        qk *= q;
        sum += qk;
    }
    return spectral_norm(assemble_F(M, T, L)) + 1.0 + 2.0 * sum;
}

BoundReport indirect_bound(double F_norm, double P_norm, double dP_bound, double dF_bound,
                           double confidence_P, double confidence_F) {
    for (double v : {F_norm, P_norm, dP_bound, dF_bound}) {
        if (!(v >= 0.0)) throw InvalidArgument("indirect bound inputs must be nonnegative");
    }
    BoundReport rep;
    rep.bound = F_norm * dP_bound + dF_bound * P_norm + dF_bound * dP_bound;
    rep.confidence = confidence_P * confidence_F;
    rep.note = "confidence is the product of the constituent confidences (heuristic)";
    rep.inputs = {{"F_norm", F_norm}, {"P_norm", P_norm}, {"dP", dP_bound}, {"dF", dF_bound}};
    return rep;
}

}  // namespace ddad
