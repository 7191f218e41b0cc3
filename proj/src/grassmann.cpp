#include "tlra/grassmann.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace tlra {

namespace {

constexpr double kChartTol = 1e-10;  // Y_{i,0} singularity threshold

// Flip each column so its leading entry of non-negligible size is
// positive; keeps bases reproducible across runs.
void fix_column_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double scale = m.col(c).cwiseAbs().maxCoeff();
        if (scale == 0.0) continue;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > 1e-12 * scale) {
                if (m(r, c) < 0.0) m.col(c) = -m.col(c);
                break;
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd OrthoFrame::full_basis() const {
    if (!completion)
        throw Error("frame: completion not populated, call complete() first");
    Eigen::MatrixXd full(basis.rows(), basis.rows());
    full.leftCols(basis.cols()) = basis;
    full.rightCols(completion->cols()) = *completion;
    return full;
}

std::vector<int> SubspaceTuple::dims() const {
    std::vector<int> d;
    d.reserve(frames.size());
    for (const auto& f : frames) d.push_back(f.n());
    return d;
}

std::vector<int> SubspaceTuple::ranks() const {
    std::vector<int> r;
    r.reserve(frames.size());
    for (const auto& f : frames) r.push_back(f.rank());
    return r;
}

ChartPoint ChartPoint::zero(const SubspaceTuple& anchor) {
    ChartPoint x;
    x.blocks.reserve(anchor.frames.size());
    for (const auto& f : anchor.frames)
        x.blocks.push_back(Eigen::MatrixXd::Zero(f.n() - f.rank(), f.rank()));
    return x;
}

int ChartPoint::total_dim() const {
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.size());
    return n;
}

double ChartPoint::norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return std::sqrt(s);
}

OrthoFrame orthonormalize(const Eigen::MatrixXd& vectors) {
    const Eigen::Index n = vectors.rows();
    const Eigen::Index r = vectors.cols();
    if (r > n) throw DimensionError("orthonormalize: more columns than rows");

    Eigen::MatrixXd q = vectors;
    for (Eigen::Index c = 0; c < r; ++c) {
        const double original = q.col(c).norm();
        // modified Gram-Schmidt with one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index p = 0; p < c; ++p)
                q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
        const double remaining = q.col(c).norm();
        if (remaining <= 1e-12 * std::max(original, 1e-300))
            throw DegenerateInputError("orthonormalize: numerical rank below column count");
        q.col(c) /= remaining;
    }
    fix_column_signs(q);
    return OrthoFrame(std::move(q));
}

OrthoFrame complete(OrthoFrame frame) {
    if (frame.completion) return frame;
    const Eigen::Index n = frame.n();
    const Eigen::Index r = frame.rank();
    if (r == n) {
        frame.completion = Eigen::MatrixXd(n, 0);
        return frame;
    }
    // Householder Q of the basis: its trailing n-r columns span the
    // orthogonal complement exactly.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame.basis);
    Eigen::MatrixXd q = qr.householderQ();
    frame.completion = q.rightCols(n - r);
    return frame;
}

SubspaceTuple complete(SubspaceTuple tuple) {
    for (auto& f : tuple.frames) f = complete(std::move(f));
    return tuple;
}

SubspaceTuple chart_to_tuple(const SubspaceTuple& anchor, const ChartPoint& x) {
    if (x.blocks.size() != anchor.frames.size())
        throw DimensionError("chart_to_tuple: block count mismatch");
    SubspaceTuple out;
    out.frames.reserve(anchor.frames.size());
    for (std::size_t i = 0; i < anchor.frames.size(); ++i) {
        const auto& f = anchor.frames[i];
        const auto& xi = x.blocks[i];
        if (xi.rows() != f.n() - f.rank() || xi.cols() != f.rank())
            throw DimensionError("chart_to_tuple: block shape mismatch");
        if (!f.completion)
            throw Error("chart_to_tuple: anchor frame lacks completion");
        Eigen::MatrixXd w = f.basis;
        if (xi.rows() > 0) w += *f.completion * xi;
        out.frames.push_back(orthonormalize(w));
    }
    return out;
}

ChartCoordinates tuple_to_chart(const SubspaceTuple& anchor,
                                const SubspaceTuple& target) {
    if (anchor.frames.size() != target.frames.size())
        throw DimensionError("tuple_to_chart: order mismatch");
    ChartCoordinates out;
    for (std::size_t i = 0; i < anchor.frames.size(); ++i) {
        const auto& a = anchor.frames[i];
        const auto& t = target.frames[i];
        if (a.n() != t.n() || a.rank() != t.rank())
            throw DimensionError("tuple_to_chart: frame shape mismatch");
        const Eigen::Index r = a.rank();
        if ((t.basis - a.basis).squaredNorm() == 0.0) {
            // anchored at itself: exact zero, no rounding residue
            out.chart.blocks.push_back(Eigen::MatrixXd::Zero(a.n() - r, r));
            out.y0.push_back(Eigen::MatrixXd::Identity(r, r));
            out.x0.push_back(Eigen::MatrixXd::Zero(a.n() - r, r));
            continue;
        }
        Eigen::MatrixXd z = a.full_basis().transpose() * t.basis;  // Z_{i,0}
        Eigen::MatrixXd y0 = z.topRows(r);
        Eigen::MatrixXd x0 = z.bottomRows(a.n() - r);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(y0, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (r > 0 && (sv(0) == 0.0 || sv(r - 1) < kChartTol * sv(0)))
            throw OutOfChartError("tuple_to_chart: target meets anchor complement, re-anchor");
        out.chart.blocks.push_back(x0 * svd.solve(Eigen::MatrixXd::Identity(r, r)));
        out.y0.push_back(std::move(y0));
        out.x0.push_back(std::move(x0));
    }
    return out;
}

double principal_angle_distance(const OrthoFrame& a, const OrthoFrame& b) {
    if (a.n() != b.n() || a.rank() != b.rank())
        throw DimensionError("principal_angle_distance: frame shape mismatch");
    // singular values of (I - A A^T) B are the principal-angle sines;
    // evaluating them directly stays accurate for nearly equal spans
    const Eigen::MatrixXd residual = b.basis - a.basis * (a.basis.transpose() * b.basis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double sine = std::min(1.0, svd.singularValues()(i));
        s += sine * sine;
    }
    return std::sqrt(s);
}

}  // namespace tlra
