#include "tlra/matrix_approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tlra {

namespace {
constexpr double kPinvCutoff = 1e-12;     // relative to sigma_max
constexpr double kSigmaSignificant = 1e-8;  // relative to sigma_1
}  // namespace

void check_index_set(const std::vector<int>& indices, int extent,
                     const std::string& what) {
    if (indices.empty()) throw DimensionError(what + ": empty index set");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= extent)
            throw DimensionError(what + ": index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw DimensionError(what + ": indices must be strictly increasing");
    }
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
    return out;
}

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& a, const std::vector<int>& cols) {
    Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    return out;
}

Eigen::MatrixXd select_block(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                a(rows[i], cols[j]);
    return out;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return Eigen::MatrixXd::Zero(a.cols(), a.rows());
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > kPinvCutoff * sv(0)) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

RankKApprox svd_rank_k(const Eigen::MatrixXd& a, int k) {
    if (k < 1) throw DimensionError("svd_rank_k: k must be positive");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? kPinvCutoff * sv(0) : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    const int kept = std::min(k, rank);

    RankKApprox out;
    out.factors.left = svd.matrixU().leftCols(kept);
    out.factors.right = svd.matrixV().leftCols(kept);
    out.factors.values = sv.head(kept);
    out.approx = out.factors.left * out.factors.values.asDiagonal() *
                 out.factors.right.transpose();
    double tail = 0.0;
    for (Eigen::Index i = kept; i < sv.size(); ++i) tail += sv(i) * sv(i);
    out.error = std::sqrt(tail);
    return out;
}

RowSampleResult row_sample_refine(const Eigen::MatrixXd& a, int k,
                                  const std::vector<int>& initial_rows,
                                  int max_rounds) {
    check_index_set(initial_rows, static_cast<int>(a.rows()), "row_sample_refine");
    if (static_cast<int>(initial_rows.size()) < k)
        throw DimensionError("row_sample_refine: need at least k sampled rows");
    if (max_rounds < 1) throw DimensionError("row_sample_refine: max_rounds must be positive");

    // Orthonormal basis Q of the sampled row span.
    Eigen::MatrixXd sampled = select_rows(a, initial_rows).transpose();  // n x s
    Eigen::JacobiSVD<Eigen::MatrixXd> ssvd(sampled, Eigen::ComputeThinU);
    const auto& ssv = ssvd.singularValues();
    int sdim = 0;
    while (sdim < ssv.size() && ssv(sdim) > kPinvCutoff * std::max(ssv(0), 1e-300)) ++sdim;
    if (sdim < k)
        throw DegenerateInputError("row_sample_refine: sampled row space rank below k");
    Eigen::MatrixXd q = ssvd.matrixU().leftCols(sdim);

    RowSampleResult out;
    // B_1: best rank-k approximation of the row-projected matrix.
    Eigen::MatrixXd b = svd_rank_k(a * q * q.transpose(), k).approx;
    out.trace.errors.push_back((a - b).norm());
    out.trace.norms.push_back(b.norm());

    for (int round = 1; round < max_rounds; ++round) {
        if (round % 2 == 1) {
            // project columns of A onto the current k-dim column space
            Eigen::MatrixXd u = svd_rank_k(b, k).factors.left;
            b = u * (u.transpose() * a);
        } else {
            // project rows of A onto the current k-dim row space
            Eigen::MatrixXd v = svd_rank_k(b, k).factors.right;
            b = (a * v) * v.transpose();
        }
        out.trace.errors.push_back((a - b).norm());
        out.trace.norms.push_back(b.norm());
    }
    out.approx = std::move(b);
    return out;
}

MatrixCurFactors cur_optimal(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols) {
    check_index_set(rows, static_cast<int>(a.rows()), "cur_optimal rows");
    check_index_set(cols, static_cast<int>(a.cols()), "cur_optimal cols");
    MatrixCurFactors f;
    f.row_set = rows;
    f.col_set = cols;
    f.c = select_cols(a, cols);
    f.r = select_rows(a, rows);
    f.u = pinv(f.c) * a * pinv(f.r);
    f.mode = CurMode::optimal;
    return f;
}

MatrixCurFactors cur_local(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                           const std::vector<int>& cols,
                           const std::vector<int>& fit_rows,
                           const std::vector<int>& fit_cols) {
    check_index_set(rows, static_cast<int>(a.rows()), "cur_local rows");
    check_index_set(cols, static_cast<int>(a.cols()), "cur_local cols");
    check_index_set(fit_rows, static_cast<int>(a.rows()), "cur_local fit rows");
    check_index_set(fit_cols, static_cast<int>(a.cols()), "cur_local fit cols");
    MatrixCurFactors f;
    f.row_set = rows;
    f.col_set = cols;
    f.c = select_cols(a, cols);
    f.r = select_rows(a, rows);
    f.u = pinv(select_block(a, fit_rows, cols)) * select_block(a, fit_rows, fit_cols) *
          pinv(select_block(a, rows, fit_cols));
    f.mode = CurMode::local;
    return f;
}

MatrixCurFactors cur_classic(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols,
                             bool allow_pseudo_inverse) {
    check_index_set(rows, static_cast<int>(a.rows()), "cur_classic rows");
    check_index_set(cols, static_cast<int>(a.cols()), "cur_classic cols");
    if (rows.size() != cols.size())
        throw DimensionError("cur_classic: |I| must equal |J|");
    MatrixCurFactors f;
    f.row_set = rows;
    f.col_set = cols;
    f.c = select_cols(a, cols);
    f.r = select_rows(a, rows);
    const Eigen::MatrixXd pivot = select_block(a, rows, cols);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(pivot);
    if (!lu.isInvertible()) {
        if (!allow_pseudo_inverse)
            throw SingularPivotError("cur_classic: pivot block A[I,J] singular");
        f.u = pinv(pivot);
        f.pseudo_inverse_used = true;
    } else {
        f.u = lu.inverse();
    }
    f.mode = CurMode::classic;
    return f;
}

namespace {
// k sorted indices drawn uniformly from [0, extent) without replacement.
std::vector<int> draw_subset(std::mt19937_64& rng, int extent, int k) {
    std::vector<int> pool(static_cast<std::size_t>(extent));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, extent - 1);
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

double pivot_score(const Eigen::MatrixXd& block, PivotObjective objective) {
    if (objective == PivotObjective::abs_det)
        return std::abs(Eigen::FullPivLU<Eigen::MatrixXd>(block).determinant());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
    double prod = 1.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= kSigmaSignificant * sv(0)) prod *= sv(i);
    return prod;
}
}  // namespace

PivotSearchResult pivot_search(const Eigen::MatrixXd& a, int k, int trials,
                               PivotObjective objective, std::uint64_t seed) {
    if (k < 1 || k > std::min(a.rows(), a.cols()))
        throw DimensionError("pivot_search: k out of range");
    if (trials < 1) throw DimensionError("pivot_search: trials must be positive");

    // All candidate sets come from one seeded stream; scoring is
    // parallel over trials with a fixed-order reduction below.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> row_sets(static_cast<std::size_t>(trials));
    std::vector<std::vector<int>> col_sets(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        row_sets[static_cast<std::size_t>(t)] = draw_subset(rng, static_cast<int>(a.rows()), k);
        col_sets[static_cast<std::size_t>(t)] = draw_subset(rng, static_cast<int>(a.cols()), k);
    }
    std::vector<double> scores(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < trials; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        scores[ut] = pivot_score(select_block(a, row_sets[ut], col_sets[ut]), objective);
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t)
        if (scores[t] > scores[best]) best = t;

    return {row_sets[best], col_sets[best], scores[best]};
}

double cur_error_bound(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                       const std::vector<int>& cols, double mu_estimate) {
    check_index_set(rows, static_cast<int>(a.rows()), "cur_error_bound rows");
    check_index_set(cols, static_cast<int>(a.cols()), "cur_error_bound cols");
    if (rows.size() != cols.size())
        throw DimensionError("cur_error_bound: |I| must equal |J|");
    const int k = static_cast<int>(rows.size());
    const double det =
        std::abs(Eigen::FullPivLU<Eigen::MatrixXd>(select_block(a, rows, cols))
                     .determinant());
    if (det == 0.0) throw SingularPivotError("cur_error_bound: pivot determinant is zero");
    if (mu_estimate < det * (1.0 - 1e-12))
        throw DimensionError("cur_error_bound: mu_estimate below |det A[I,J]|");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double sigma_next = k < sv.size() ? sv(k) : 0.0;
    return (k + 1) * mu_estimate / det * sigma_next;
}

}  // namespace tlra
