#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "tlra/error.hpp"

namespace tlra {

// Strictly increasing, in-range, non-empty 0-based index list.
void check_index_set(const std::vector<int>& indices, int extent,
                     const std::string& what);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, const std::vector<int>& rows);
Eigen::MatrixXd select_cols(const Eigen::MatrixXd& a, const std::vector<int>& cols);
Eigen::MatrixXd select_block(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols);

// Moore-Penrose pseudoinverse; singular values below 1e-12 * sigma_max
// are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& a);

struct SvdFactors {
    Eigen::MatrixXd left;           // columns u_i
    Eigen::MatrixXd right;          // columns v_i
    Eigen::VectorXd values;         // sigma_1 >= ... >= sigma_r > 0
    int rank() const { return static_cast<int>(values.size()); }
};

struct RankKApprox {
    SvdFactors factors;   // truncated to at most k positive values
    Eigen::MatrixXd approx;
    double error;         // ||A - approx||_F = sqrt(sum of tail sigma^2)
};

// Best rank-k approximation via SVD; k beyond the rank returns A exactly.
RankKApprox svd_rank_k(const Eigen::MatrixXd& a, int k);

struct RowSampleTrace {
    std::vector<double> errors;  // ||A - B_l||, non-increasing
    std::vector<double> norms;   // ||B_l||, non-decreasing
};

struct RowSampleResult {
    RowSampleTrace trace;
    Eigen::MatrixXd approx;  // final B, rank <= k
};

// Iterative rank-k refinement from a sampled row set: project rows onto
// the sampled row space, truncate, then alternate projections between
// the current column and row spaces.  Throws DegenerateInputError when
// the sampled rows span fewer than k dimensions.
RowSampleResult row_sample_refine(const Eigen::MatrixXd& a, int k,
                                  const std::vector<int>& initial_rows,
                                  int max_rounds);

enum class CurMode : std::uint8_t { optimal, local, classic };

struct MatrixCurFactors {
    std::vector<int> row_set;   // I
    std::vector<int> col_set;   // J
    Eigen::MatrixXd c;          // A[:, J]
    Eigen::MatrixXd r;          // A[I, :]
    Eigen::MatrixXd u;          // |J| x |I| core
    CurMode mode = CurMode::optimal;
    bool pseudo_inverse_used = false;

    Eigen::MatrixXd approx() const { return c * u * r; }
    double entry(int i, int j) const { return c.row(i) * u * r.col(j); }
};

// U minimizing ||A - C U R||_F over all U: U = C^+ A R^+.
MatrixCurFactors cur_optimal(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols);

// U fitting only the entries A[fit_rows, fit_cols]:
// U = A[I',J]^+ A[I',J'] A[I,J']^+.
MatrixCurFactors cur_local(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                           const std::vector<int>& cols,
                           const std::vector<int>& fit_rows,
                           const std::vector<int>& fit_cols);

// Skeleton approximation A[:,J] A[I,J]^{-1} A[I,:] with |I| = |J|.
// A singular pivot throws SingularPivotError unless allow_pseudo_inverse
// is set, in which case A[I,J]^+ is substituted and flagged.
MatrixCurFactors cur_classic(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                             const std::vector<int>& cols,
                             bool allow_pseudo_inverse = false);

enum class PivotObjective : std::uint8_t { abs_det, sigma_product };

struct PivotSearchResult {
    std::vector<int> rows;
    std::vector<int> cols;
    double score = 0.0;
};

// Best-scoring k x k pivot over `trials` uniform random draws.  Scores
// are |det| or the product of singular values >= 1e-8 * sigma_1.
// Deterministic for a given seed; ties break toward the earliest trial.
PivotSearchResult pivot_search(const Eigen::MatrixXd& a, int k, int trials,
                               PivotObjective objective, std::uint64_t seed);

// Entrywise-max error bound (k+1) * mu / |det A[I,J]| * sigma_{k+1}(A)
// for the classic skeleton at pivot (I, J), where mu >= |det A[I,J]| is
// an estimate of the maximal k x k pivot volume.
double cur_error_bound(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                       const std::vector<int>& cols, double mu_estimate);

}  // namespace tlra
