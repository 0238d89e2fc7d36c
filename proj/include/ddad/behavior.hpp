// Behavior vectors, sliding-window minor behaviors, regression data matrices
// and the selector K that rebuilds Z from the stacked minor behaviors.
//
// Z = [u_0 .. u_{T-1} | y_1 .. y_T]. Window j (1-based, j = 1..T-L+1) is
// f_j = [u_{j-1} .. u_{j+L-2} | y_j .. y_{j+L-1}], of length L(m+p).
#pragma once

#include <span>
#include <vector>

#include "ddad/system_sim.hpp"
#include "ddad/types.hpp"

namespace ddad {

struct BehaviorVector {
    Vector z;
    int horizon = 0;
};

struct MinorBehavior {
    Vector f;
    int window = 0;  // 1-based
    int length = 0;  // L
};

/// Column k of F_next is the window after column k of F, from the same experiment.
/// Columns are ordered experiment-major, then time.
struct DataMatrices {
    Matrix F;
    Matrix F_next;

    Index samples() const { return F.cols(); }
};

BehaviorVector stack_behavior(const Trajectory& traj);
Trajectory unstack_behavior(const BehaviorVector& z, int m, int p);

/// Positions in Z of the coordinates of window j, in window order.
std::vector<Index> window_indices(int T, int L, int m, int p, int window);

std::vector<MinorBehavior> minor_behaviors(const Trajectory& traj, int L);

/// D = [f_1; f_2; ...; f_{T-L+1}].
Vector stack_minor_behaviors(const Trajectory& traj, int L);

DataMatrices build_regression_matrices(const ExperimentSet& data, int L);

/// Binary T(m+p) x (T-L+1)L(m+p) matrix with one 1 per row. Stored as the
/// column index that feeds each row; every Z coordinate is copied from the
/// earliest window that contains it.
class SelectorMatrix {
public:
    SelectorMatrix(std::vector<Index> source, Index cols) : source_(std::move(source)), cols_(cols) {}

    Index rows() const { return static_cast<Index>(source_.size()); }
    Index cols() const { return cols_; }
    std::span<const Index> sources() const { return source_; }

    Matrix dense() const;
    /// K D
    Vector apply(const Vector& D) const;
    /// K Sigma K^T
    Matrix conjugate(const Matrix& sigma) const;

private:
    std::vector<Index> source_;
    Index cols_;
};

SelectorMatrix selector_matrix(int T, int L, int m, int p);

}  // namespace ddad
