#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "tlra/error.hpp"

namespace tlra {

// An n x r matrix with orthonormal columns representing a point of
// Gr(r, R^n).  The orthonormal completion spanning the complement is
// computed once on demand and cached alongside.
struct OrthoFrame {
    Eigen::MatrixXd basis;                       // n x r
    std::optional<Eigen::MatrixXd> completion;   // n x (n-r) when present

    OrthoFrame() = default;
    explicit OrthoFrame(Eigen::MatrixXd b) : basis(std::move(b)) {}

    int n() const { return static_cast<int>(basis.rows()); }
    int rank() const { return static_cast<int>(basis.cols()); }

    // [basis | completion] as one orthogonal n x n matrix.
    Eigen::MatrixXd full_basis() const;
};

// One frame per mode: a point of Gr(r1,n1) x ... x Gr(rd,nd).
struct SubspaceTuple {
    std::vector<OrthoFrame> frames;

    SubspaceTuple() = default;
    explicit SubspaceTuple(std::vector<OrthoFrame> f) : frames(std::move(f)) {}

    int order() const { return static_cast<int>(frames.size()); }
    std::vector<int> dims() const;
    std::vector<int> ranks() const;
};

// Local coordinates of a subspace tuple relative to an anchor tuple:
// one (n_i - r_i) x r_i block per mode.  Total degrees of freedom
// sum_i (n_i - r_i) r_i.
struct ChartPoint {
    std::vector<Eigen::MatrixXd> blocks;

    static ChartPoint zero(const SubspaceTuple& anchor);

    int total_dim() const;
    double norm() const;  // Frobenius norm over all blocks
};

// Gram-Schmidt with reorthogonalization.  Column span is preserved and
// each output column has its leading nonzero entry positive, so repeated
// runs produce identical bases.  Throws DegenerateInputError when the
// input has numerical rank below its column count.
OrthoFrame orthonormalize(const Eigen::MatrixXd& vectors);

// Populate frame.completion with an orthonormal basis of the orthogonal
// complement (empty when r = n).
OrthoFrame complete(OrthoFrame frame);
SubspaceTuple complete(SubspaceTuple tuple);

// Frame of the subspace with basis (anchor basis + anchor completion * X_i)
// per mode.  X = 0 reproduces the anchor subspaces.
SubspaceTuple chart_to_tuple(const SubspaceTuple& anchor, const ChartPoint& x);

struct ChartCoordinates {
    ChartPoint chart;                  // blocks X_{i,0} * Y_{i,0}^{-1}
    std::vector<Eigen::MatrixXd> y0;   // r_i x r_i top blocks
    std::vector<Eigen::MatrixXd> x0;   // (n_i - r_i) x r_i bottom blocks
};

// Coordinates of `target` in the chart anchored at `anchor` (which must
// carry completions).  Throws OutOfChartError when a target subspace
// meets the anchor complement, i.e. Y_{i,0} is singular.
ChartCoordinates tuple_to_chart(const SubspaceTuple& anchor,
                                const SubspaceTuple& target);

// ||sin Theta|| between the column spans of two frames of equal shape;
// zero iff the subspaces coincide.
double principal_angle_distance(const OrthoFrame& a, const OrthoFrame& b);

}  // namespace tlra
