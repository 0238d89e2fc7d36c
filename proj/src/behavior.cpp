#include "ddad/behavior.hpp"

#include <string>

#include "ddad/error.hpp"

namespace ddad {
namespace {

void check_window(int T, int L) {
    if (L < 1 || L > T) {
        throw InvalidArgument("window length L=" + std::to_string(L) + " must satisfy 1 <= L <= T=" +
                              std::to_string(T));
    }
}

}  // namespace

BehaviorVector stack_behavior(const Trajectory& traj) {
    const Index T = traj.horizon(), m = traj.m(), p = traj.p();
    BehaviorVector out{Vector(T * (m + p)), static_cast<int>(T)};
    for (Index t = 0; t < T; ++t) {
        out.z.segment(t * m, m) = traj.inputs.row(t).transpose();
        out.z.segment(T * m + t * p, p) = traj.outputs.row(t).transpose();
    }
    return out;
}

Trajectory unstack_behavior(const BehaviorVector& z, int m, int p) {
    const Index T = z.horizon;
    if (m < 1 || p < 1 || z.z.size() != T * (m + p)) {
        throw InvalidArgument("behavior length does not match T(m+p)");
    }
    Trajectory out{Matrix(T, m), Matrix(T, p)};
    for (Index t = 0; t < T; ++t) {
        out.inputs.row(t) = z.z.segment(t * m, m).transpose();
        out.outputs.row(t) = z.z.segment(T * m + t * p, p).transpose();
    }
    return out;
}

std::vector<Index> window_indices(int T, int L, int m, int p, int window) {
    check_window(T, L);
    if (window < 1 || window > T - L + 1) throw InvalidArgument("window index out of range");
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(L) * (m + p));
    // u_{window-1 .. window+L-2}; u_k sits at k*m in Z.
    for (int k = window - 1; k < window - 1 + L; ++k) {
        for (int c = 0; c < m; ++c) idx.push_back(static_cast<Index>(k) * m + c);
    }
    // y_{window .. window+L-1}; y_k sits at T*m + (k-1)*p in Z.
    for (int k = window; k < window + L; ++k) {
        for (int c = 0; c < p; ++c) idx.push_back(static_cast<Index>(T) * m + static_cast<Index>(k - 1) * p + c);
    }
    return idx;
}

std::vector<MinorBehavior> minor_behaviors(const Trajectory& traj, int L) {
    const int T = traj.horizon();
    check_window(T, L);
    const Vector z = stack_behavior(traj).z;
    std::vector<MinorBehavior> out;
    out.reserve(T - L + 1);
    for (int j = 1; j <= T - L + 1; ++j) {
        out.push_back({z(window_indices(T, L, traj.m(), traj.p(), j)), j, L});
    }
    return out;
}

Vector stack_minor_behaviors(const Trajectory& traj, int L) {
    const auto windows = minor_behaviors(traj, L);
    const Index len = windows.front().f.size();
    Vector D(len * static_cast<Index>(windows.size()));
    for (std::size_t j = 0; j < windows.size(); ++j) {
        D.segment(static_cast<Index>(j) * len, len) = windows[j].f;
    }
    return D;
}

DataMatrices build_regression_matrices(const ExperimentSet& data, int L) {
    data.validate();
    const int T = data.horizon(), m = data.m(), p = data.p();
    if (L < 1 || L >= T) {
        throw InvalidArgument("no regression pairs: window length L=" + std::to_string(L) +
                              " must satisfy 1 <= L < T=" + std::to_string(T));
    }
    const Index len = static_cast<Index>(L) * (m + p);
    const Index per_experiment = T - L;
    DataMatrices dm{Matrix(len, data.size() * per_experiment), Matrix(len, data.size() * per_experiment)};

    std::vector<std::vector<Index>> windows;
    for (int j = 1; j <= T - L + 1; ++j) windows.push_back(window_indices(T, L, m, p, j));

    Index col = 0;
    for (const Trajectory& traj : data.trajectories) {
        const Vector z = stack_behavior(traj).z;
        for (Index j = 0; j < per_experiment; ++j, ++col) {
            dm.F.col(col) = z(windows[j]);
            dm.F_next.col(col) = z(windows[j + 1]);
        }
    }
    return dm;
}

Matrix SelectorMatrix::dense() const {
    Matrix K = Matrix::Zero(rows(), cols_);
    for (Index r = 0; r < rows(); ++r) K(r, source_[r]) = 1.0;
    return K;
}

Vector SelectorMatrix::apply(const Vector& D) const {
    if (D.size() != cols_) throw InvalidArgument("stacked minor behaviors have the wrong length");
    return D(source_);
}

Matrix SelectorMatrix::conjugate(const Matrix& sigma) const {
    if (sigma.rows() != cols_ || sigma.cols() != cols_) throw InvalidArgument("Sigma_D has the wrong size");
    return sigma(source_, source_);
}

SelectorMatrix selector_matrix(int T, int L, int m, int p) {
    check_window(T, L);
    if (m < 1 || p < 1) throw InvalidArgument("m and p must be >= 1");
    const Index d = static_cast<Index>(T) * (m + p);
    const Index len = static_cast<Index>(L) * (m + p);
    std::vector<Index> source(d, -1);
    for (int j = 1; j <= T - L + 1; ++j) {
        const auto idx = window_indices(T, L, m, p, j);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (source[idx[k]] < 0) source[idx[k]] = (j - 1) * len + static_cast<Index>(k);
        }
    }
    return SelectorMatrix(std::move(source), (T - L + 1) * len);
}

}  // namespace ddad
