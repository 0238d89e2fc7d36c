#include "ddad/system_sim.hpp"

#include <Eigen/Eigenvalues>
#include <cstring>
#include <sstream>
#include <iomanip>

#include "ddad/error.hpp"

namespace ddad {
namespace {

constexpr double kTargetSpectralRadius = 0.8;
constexpr int kMaxSystemDraws = 1000;

int numerical_rank(const Matrix& M) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    const double tol = 1e-9 * sv(0) * static_cast<double>(std::max(M.rows(), M.cols()));
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            out(i, j) = rng.standard_normal();
        }
    }
    return out;
}

// Row t of the result holds draw t.
Matrix gaussian_rows(Index rows, Index cols, double variance, Rng& rng) {
    Matrix out(rows, cols);
    for (Index t = 0; t < rows; ++t) {
        out.row(t) = rng.gaussian(cols, variance).transpose();
    }
    return out;
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

double spectral_radius(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix controllability_matrix(const Matrix& A, const Matrix& B) {
    const Index n = A.rows();
    Matrix out(n, n * B.cols());
    Matrix block = B;
    for (Index k = 0; k < n; ++k) {
        out.middleCols(k * B.cols(), B.cols()) = block;
        block = A * block;
    }
    return out;
}

Matrix observability_matrix(const Matrix& A, const Matrix& C) {
    return controllability_matrix(A.transpose(), C.transpose()).transpose();
}

LtiSystem LtiSystem::make(Matrix A, Matrix B, Matrix C, std::optional<Matrix> Ba,
                          std::optional<Matrix> Ga, std::uint64_t seed) {
    const Index n = A.rows();
    if (n < 1 || A.cols() != n) throw InvalidArgument("A must be square with n >= 1");
    if (B.rows() != n || B.cols() < 1) throw InvalidArgument("B must be n x m with m >= 1");
    if (C.cols() != n || C.rows() < 1) throw InvalidArgument("C must be p x n with p >= 1");

    LtiSystem sys;
    sys.Ba = Ba ? std::move(*Ba) : B;
    sys.Ga = Ga ? std::move(*Ga) : Matrix::Identity(C.rows(), C.rows());
    if (sys.Ba.rows() != n || sys.Ba.cols() != B.cols()) throw InvalidArgument("Ba must be n x m");
    if (sys.Ga.rows() != C.rows() || sys.Ga.cols() != C.rows()) throw InvalidArgument("Ga must be p x p");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !sys.Ba.allFinite() ||
        !sys.Ga.allFinite()) {
        throw InvalidArgument("system matrices must be finite");
    }

    const double rho = spectral_radius(A);
    if (!(rho < 1.0)) {
        throw InvalidArgument("A is not Schur stable (spectral radius " + std::to_string(rho) + ")");
    }
    if (numerical_rank(controllability_matrix(A, B)) < n) throw InvalidArgument("(A, B) is not controllable");
    if (numerical_rank(observability_matrix(A, C)) < n) throw InvalidArgument("(A, C) is not observable");

    sys.A = std::move(A);
    sys.B = std::move(B);
    sys.C = std::move(C);
    sys.seed = seed;
    return sys;
}

std::string LtiSystem::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Matrix* M : {&A, &B, &C, &Ba, &Ga}) {
        const std::int64_t dims[2] = {M->rows(), M->cols()};
        fnv1a(h, dims, sizeof(dims));
        for (Index j = 0; j < M->cols(); ++j) {
            for (Index i = 0; i < M->rows(); ++i) {
                const double v = (*M)(i, j);
                fnv1a(h, &v, sizeof(v));
            }
        }
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void ExperimentSet::validate() const {
    if (trajectories.empty()) throw InvalidArgument("experiment set is empty");
    const Trajectory& first = trajectories.front();
    if (first.horizon() < 1) throw InvalidArgument("trajectories must have T >= 1");
    for (const Trajectory& tr : trajectories) {
        if (tr.horizon() != first.horizon() || tr.outputs.rows() != first.horizon() ||
            tr.m() != first.m() || tr.p() != first.p()) {
            throw InvalidArgument("trajectories disagree on horizon or dimensions");
        }
    }
}

LtiSystem random_stable_system(int n, int m, int p, std::uint64_t seed) {
    if (n < 1 || m < 1 || p < 1) throw InvalidArgument("n, m, p must all be >= 1");
    Rng rng(seed);
    for (int attempt = 0; attempt < kMaxSystemDraws; ++attempt) {
        Matrix A = gaussian_matrix(n, n, rng);
        Matrix B = gaussian_matrix(n, m, rng);
        Matrix C = gaussian_matrix(p, n, rng);
        const double rho = spectral_radius(A);
        if (!(rho > 1e-8)) continue;
        A *= kTargetSpectralRadius / rho;
        try {
            return LtiSystem::make(std::move(A), std::move(B), std::move(C), std::nullopt,
                                   std::nullopt, seed);
        } catch (const InvalidArgument&) {
            // rank check failed; draw again
        }
    }
    throw InvalidArgument("could not draw a controllable and observable system for the requested dimensions");
}

Trajectory simulate(const LtiSystem& sys, const NoiseSpec& noise, const AttackSpec& attack, int T,
                    Rng& rng) {
    if (T < 1) throw InvalidArgument("horizon T must be >= 1");
    const Index n = sys.n(), m = sys.m(), p = sys.p();

    const Matrix U = gaussian_rows(T, m, noise.sigma_u, rng);
    const Matrix W = gaussian_rows(T, n, noise.sigma_w, rng);
    const Matrix V = gaussian_rows(T, p, noise.sigma_v, rng);

    Matrix Ua = Matrix::Zero(T, m);
    Matrix Ya = Matrix::Zero(T, p);
    if (const auto* g = std::get_if<GaussianInjection>(&attack)) {
        Ua = gaussian_rows(T, m, g->variance, rng);
        Ya = gaussian_rows(T, p, g->variance, rng);
    } else if (const auto* e = std::get_if<ExplicitAttack>(&attack)) {
        if (e->u_a.rows() != T || e->u_a.cols() != m || e->y_a.rows() != T || e->y_a.cols() != p) {
            throw InvalidArgument("explicit attack must be T x m (inputs) and T x p (outputs)");
        }
        Ua = e->u_a;
        Ya = e->y_a;
    }

    Trajectory out{U, Matrix(T, p)};
    Vector x = Vector::Zero(n);
    for (int t = 0; t < T; ++t) {
        x = sys.A * x + sys.B * U.row(t).transpose() + W.row(t).transpose() +
            sys.Ba * Ua.row(t).transpose();
        out.outputs.row(t) =
            (sys.C * x + V.row(t).transpose() + sys.Ga * Ya.row(t).transpose()).transpose();
    }
    return out;
}

ExperimentSet generate_experiments(const LtiSystem& sys, const NoiseSpec& noise, int N, int T,
                                   std::uint64_t master_seed) {
    if (N < 1) throw InvalidArgument("number of experiments N must be >= 1");
    if (T < 1) throw InvalidArgument("horizon T must be >= 1");
    noise.validate();
    ExperimentSet set;
    set.trajectories.reserve(N);
    for (int i = 0; i < N; ++i) {
        Rng rng(derive_seed(master_seed, {static_cast<std::uint64_t>(i)}));
        set.trajectories.push_back(simulate(sys, noise, NoAttack{}, T, rng));
    }
    set.system_fingerprint = sys.fingerprint();
    set.noise = noise;
    set.master_seed = master_seed;
    return set;
}

Matrix block_toeplitz(const Matrix& A, const Matrix& G, const Matrix& C, int T) {
    if (T < 1) throw InvalidArgument("horizon T must be >= 1");
    const Index p = C.rows(), k = G.cols();
    std::vector<Matrix> markov;  // C A^j G
    markov.reserve(T);
    Matrix AjG = G;
    for (int j = 0; j < T; ++j) {
        markov.push_back(C * AjG);
        AjG = A * AjG;
    }
    Matrix out = Matrix::Zero(T * p, T * k);
    for (int i = 0; i < T; ++i) {
        for (int j = 0; j <= i; ++j) {
            out.block(i * p, j * k, p, k) = markov[i - j];
        }
    }
    return out;
}

MarkovToeplitz markov_toeplitz(const LtiSystem& sys, int T) {
    return {block_toeplitz(sys.A, sys.B, sys.C, T),
            block_toeplitz(sys.A, Matrix::Identity(sys.n(), sys.n()), sys.C, T)};
}

CovarianceEstimate true_behavior_covariance(const LtiSystem& sys, const NoiseSpec& noise, int T) {
    noise.validate();
    const auto [Cu, Cw] = markov_toeplitz(sys, T);
    const Index du = static_cast<Index>(T) * sys.m();
    const Index dy = static_cast<Index>(T) * sys.p();

    Matrix S(du + dy, du + dy);
    S.topLeftCorner(du, du) = noise.sigma_u * Matrix::Identity(du, du);
    S.bottomLeftCorner(dy, du) = noise.sigma_u * Cu;
    S.topRightCorner(du, dy) = noise.sigma_u * Cu.transpose();
    S.bottomRightCorner(dy, dy) = noise.sigma_u * Cu * Cu.transpose() +
                                  noise.sigma_w * Cw * Cw.transpose() +
                                  noise.sigma_v * Matrix::Identity(dy, dy);
    S = (0.5 * (S + S.transpose())).eval();

    CovarianceEstimate est;
    est.S = std::move(S);
    est.method = CovarianceMethod::Oracle;
    est.T = T;
    est.noise = noise;
    return est;
}

}  // namespace ddad
