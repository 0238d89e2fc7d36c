#include "ddad/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "ddad/error.hpp"

namespace ddad {
namespace {

constexpr double kStabilityMargin = 1e-9;

void symmetrize(Matrix& S) { S = (0.5 * (S + S.transpose())).eval(); }

std::vector<Matrix> powers(const Matrix& M, int count) {
    std::vector<Matrix> out;
    out.reserve(count);
    out.push_back(Matrix::Identity(M.rows(), M.cols()));
    for (int k = 1; k < count; ++k) out.push_back(M * out.back());
    return out;
}

}  // namespace

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

bool repair_psd(Matrix& S, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const Vector& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() >= -rel_tol * scale) return false;
    S = es.eigenvectors() * ev.cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    symmetrize(S);
    return true;
}

CovarianceEstimate direct_covariance(std::span<const BehaviorVector> behaviors) {
    if (behaviors.empty()) throw InvalidArgument("direct estimator needs at least one behavior");
    const Index d = behaviors.front().z.size();
    Matrix Z(d, static_cast<Index>(behaviors.size()));
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        if (behaviors[i].z.size() != d) throw InvalidArgument("behaviors have different lengths");
        Z.col(static_cast<Index>(i)) = behaviors[i].z;
    }
    CovarianceEstimate est;
    est.S = Matrix::Zero(d, d);
    est.S.selfadjointView<Eigen::Lower>().rankUpdate(Z, 1.0 / static_cast<double>(behaviors.size()));
    est.S = est.S.selfadjointView<Eigen::Lower>();
    est.method = CovarianceMethod::Direct;
    est.N = static_cast<int>(behaviors.size());
    est.T = behaviors.front().horizon;
    return est;
}

CovarianceEstimate direct_covariance(const ExperimentSet& data) {
    data.validate();
    std::vector<BehaviorVector> behaviors;
    behaviors.reserve(data.trajectories.size());
    for (const Trajectory& tr : data.trajectories) behaviors.push_back(stack_behavior(tr));
    CovarianceEstimate est = direct_covariance(behaviors);
    est.noise = data.noise;
    return est;
}

Matrix ols_fit(const DataMatrices& dm) {
    const Index d = dm.F.rows();
    if (dm.F_next.rows() != d || dm.F_next.cols() != dm.F.cols()) {
        throw InvalidArgument("F and F_next must have identical shapes");
    }
    if (dm.F.cols() < d) {
        throw EstimationError(EstimationFailure::InsufficientData,
                              "insufficient identification data: " + std::to_string(dm.F.cols()) +
                                  " regression pairs for a " + std::to_string(d) + "-dimensional model");
    }
    // Solve F^T M^T = F_next^T in the least-squares sense.
    Eigen::ColPivHouseholderQR<Matrix> qr(dm.F.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() < d) {
        throw EstimationError(EstimationFailure::InsufficientData,
                              "insufficient identification data: F F^T is singular (rank " +
                                  std::to_string(qr.rank()) + " < " + std::to_string(d) + ")");
    }
    return qr.solve(dm.F_next.transpose()).transpose();
}

Matrix residual_covariance(const DataMatrices& dm, const Matrix& M) {
    if (M.rows() != dm.F.rows() || M.cols() != dm.F.rows()) throw InvalidArgument("M has the wrong size");
    const Matrix E = dm.F_next - M * dm.F;
    Matrix sigma = (E * E.transpose()) / static_cast<double>(dm.samples());
    symmetrize(sigma);
    return sigma;
}

Matrix solve_discrete_lyapunov(const Matrix& M, const Matrix& Q) {
    const Index d = M.rows();
    if (M.cols() != d || Q.rows() != d || Q.cols() != d) throw InvalidArgument("M and Q must be square and equal size");
    const double rho = spectral_radius(M);
    if (!(rho < 1.0 - kStabilityMargin)) {
        throw EstimationError(EstimationFailure::UnstableModel,
                              "identified model is unstable (spectral radius " + std::to_string(rho) + ")", rho);
    }
    const Matrix system = Matrix::Identity(d * d, d * d) - kronecker(M, M);
    const Vector vecQ = Q.reshaped();
    Vector vecP = system.partialPivLu().solve(vecQ);
    // One step of iterative refinement keeps the residual near machine precision
    // when I - M (x) M is poorly conditioned.
    vecP += system.partialPivLu().solve(vecQ - system * vecP);
    Matrix P = vecP.reshaped(d, d);
    symmetrize(P);
    return P;
}

Matrix assemble_sigma_D(const Matrix& M, const Matrix& P, int T, int L) {
    if (L < 1 || L > T) throw InvalidArgument("window length must satisfy 1 <= L <= T");
    const Index d = M.rows();
    const int b = T - L + 1;
    const auto Mk = powers(M, b);
    Matrix sigma(b * d, b * d);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j <= i; ++j) {
            const Matrix block = Mk[i - j] * P;
            sigma.block(i * d, j * d, d, d) = block;
            if (i != j) sigma.block(j * d, i * d, d, d) = block.transpose();
        }
    }
    return sigma;
}

Matrix assemble_F(const Matrix& M, int T, int L) {
    if (L < 1 || L > T) throw InvalidArgument("window length must satisfy 1 <= L <= T");
    const Index d = M.rows();
    const int b = T - L + 1;
    const auto Mk = powers(M, b);
    Matrix F(b * d, b * d);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            F.block(i * d, j * d, d, d) = Mk[std::abs(i - j)];
        }
    }
    return F;
}

Matrix IndirectModel::F() const { return assemble_F(M_hat, T, L); }

IndirectResult indirect_from_model(const Matrix& M, const Matrix& Sigma_eps, int T, int L, int m, int p) {
    const Index d = static_cast<Index>(L) * (m + p);
    if (M.rows() != d || M.cols() != d || Sigma_eps.rows() != d || Sigma_eps.cols() != d) {
        throw InvalidArgument("model matrices must be L(m+p) square");
    }
    IndirectResult out;
    out.model.M_hat = M;
    out.model.Sigma_eps_hat = Sigma_eps;
    out.model.T = T;
    out.model.L = L;
    out.model.spectral_radius = spectral_radius(M);
    out.model.P_hat = solve_discrete_lyapunov(M, Sigma_eps);

    const Matrix sigma_D = assemble_sigma_D(M, out.model.P_hat, T, L);
    Matrix S = selector_matrix(T, L, m, p).conjugate(sigma_D);
    symmetrize(S);
    out.estimate.clipped = repair_psd(S);
    out.estimate.S = std::move(S);
    out.estimate.method = CovarianceMethod::Indirect;
    out.estimate.T = T;
    out.estimate.L = L;
    return out;
}

IndirectResult indirect_covariance(const ExperimentSet& data, int L) {
    const DataMatrices dm = build_regression_matrices(data, L);
    const Matrix M = ols_fit(dm);
    const Matrix sigma_eps = residual_covariance(dm, M);
    IndirectResult out = indirect_from_model(M, sigma_eps, data.horizon(), L, data.m(), data.p());
    out.estimate.N = data.size();
    out.estimate.noise = data.noise;
    return out;
}

IndirectResult population_indirect_model(const Matrix& S, int T, int L, int m, int p) {
    if (L < 1 || L >= T) throw InvalidArgument("window length must satisfy 1 <= L < T");
    if (S.rows() != static_cast<Index>(T) * (m + p) || S.cols() != S.rows()) {
        throw InvalidArgument("S must be T(m+p) square");
    }
    const Index d = static_cast<Index>(L) * (m + p);
    Matrix R00 = Matrix::Zero(d, d), R10 = Matrix::Zero(d, d), R11 = Matrix::Zero(d, d);
    for (int j = 1; j <= T - L; ++j) {
        const auto cur = window_indices(T, L, m, p, j);
        const auto nxt = window_indices(T, L, m, p, j + 1);
        R00 += S(cur, cur);
        R10 += S(nxt, cur);
        R11 += S(nxt, nxt);
    }
    const double pairs = static_cast<double>(T - L);
    R00 /= pairs;
    R10 /= pairs;
    R11 /= pairs;
    Eigen::LDLT<Matrix> ldlt(R00);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
        throw EstimationError(EstimationFailure::InsufficientData, "population regression moments are singular");
    }
    const Matrix M = ldlt.solve(R10.transpose()).transpose();
    Matrix sigma_eps = R11 - M * R00 * M.transpose();
    symmetrize(sigma_eps);
    return indirect_from_model(M, sigma_eps, T, L, m, p);
}

}  // namespace ddad
