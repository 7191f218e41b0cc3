#include <doctest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "tlra/matrix_approx.hpp"

using namespace tlra;

namespace {
Eigen::MatrixXd random_rank_k(int rows, int cols, int k, std::uint64_t seed) {
    return oracle::random_matrix(rows, k, seed) *
           oracle::random_matrix(k, cols, seed + 1);
}
}  // namespace

TEST_CASE("svd_rank_k basics") {
    Eigen::MatrixXd d = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const RankKApprox r2 = svd_rank_k(d, 2);
    CHECK(r2.error == doctest::Approx(1.0));
    CHECK(r2.factors.rank() == 2);

    // exact rank one
    const Eigen::MatrixXd uv = random_rank_k(5, 4, 1, 201);
    const RankKApprox r1 = svd_rank_k(uv, 1);
    CHECK(r1.error < 1e-12 * uv.norm());
    CHECK((r1.approx - uv).norm() < 1e-12 * uv.norm());

    // k beyond the rank returns the matrix exactly
    const RankKApprox rbig = svd_rank_k(uv, 4);
    CHECK(rbig.factors.rank() == 1);
    CHECK(rbig.error < 1e-12 * uv.norm());

    // tail-sum law against a full SVD oracle
    const Eigen::MatrixXd a = oracle::random_matrix(5, 4, 202);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const RankKApprox res = svd_rank_k(a, 2);
    CHECK((a - res.approx).squaredNorm() ==
          doctest::Approx(sv(2) * sv(2) + sv(3) * sv(3)).epsilon(1e-10));
    CHECK(res.error * res.error ==
          doctest::Approx(sv(2) * sv(2) + sv(3) * sv(3)).epsilon(1e-10));

    CHECK_THROWS_AS(svd_rank_k(a, 0), DimensionError);
}

TEST_CASE("svd factors are orthonormal with positive descending values") {
    const Eigen::MatrixXd a = oracle::random_matrix(7, 5, 203);
    const SvdFactors f = svd_rank_k(a, 4).factors;
    CHECK((f.left.transpose() * f.left - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
    CHECK((f.right.transpose() * f.right - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
    for (int i = 0; i < f.rank(); ++i) {
        CHECK(f.values(i) > 0.0);
        if (i > 0) CHECK(f.values(i) <= f.values(i - 1));
    }
}

TEST_CASE("row_sample_refine on an exact rank-k matrix") {
    const Eigen::MatrixXd a = random_rank_k(10, 8, 3, 204);
    const RowSampleResult res = row_sample_refine(a, 3, {0, 2, 5}, 1);
    CHECK(res.trace.errors.front() < 1e-10 * a.norm());
    CHECK((res.approx - a).norm() < 1e-10 * a.norm());
}

TEST_CASE("row_sample_refine produces monotone chains") {
    const Eigen::MatrixXd a = oracle::random_matrix(20, 15, 205);
    const RowSampleResult res = row_sample_refine(a, 3, {1, 4, 7, 11, 16}, 12);
    REQUIRE(res.trace.errors.size() == 12);
    for (std::size_t i = 1; i < res.trace.errors.size(); ++i) {
        CHECK(res.trace.errors[i] <= res.trace.errors[i - 1] + 1e-11);
        CHECK(res.trace.norms[i] >= res.trace.norms[i - 1] - 1e-11);
    }
}

TEST_CASE("row_sample_refine approaches the SVD optimum on a gapped spectrum") {
    // well-separated spectrum: sigma = (10, 7, 5, .5, .3, ...)
    const int m = 12, n = 9, k = 3;
    Eigen::VectorXd sv(n);
    sv << 10, 7, 5, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02;
    const Eigen::MatrixXd u = orthonormalize(oracle::random_matrix(m, n, 206)).basis;
    const Eigen::MatrixXd v = orthonormalize(oracle::random_matrix(n, n, 207)).basis;
    const Eigen::MatrixXd a = u * sv.asDiagonal() * v.transpose();

    const RowSampleResult res = row_sample_refine(a, k, {0, 3, 6, 9}, 60);
    const double best = svd_rank_k(a, k).error;
    CHECK(res.trace.errors.back() == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("row_sample_refine rejects degenerate samples") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 5);
    a.row(0) = Eigen::RowVectorXd::Constant(5, 1.0);
    a.row(1) = 2.0 * a.row(0);
    a.row(5) = Eigen::RowVectorXd::LinSpaced(5, 1.0, 5.0);
    // rows 0 and 1 span one dimension only
    CHECK_THROWS_AS(row_sample_refine(a, 2, {0, 1}, 4), DegenerateInputError);
    CHECK_THROWS_AS(row_sample_refine(a, 3, {0, 5}, 4), DimensionError);
}

TEST_CASE("cur_optimal") {
    const Eigen::MatrixXd a = oracle::random_matrix(8, 6, 208);
    std::vector<int> all_rows(8), all_cols(6);
    for (int i = 0; i < 8; ++i) all_rows[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < 6; ++j) all_cols[static_cast<std::size_t>(j)] = j;

    // full sampling reproduces A
    const MatrixCurFactors full = cur_optimal(a, all_rows, all_cols);
    CHECK((full.approx() - a).norm() < 1e-10 * a.norm());

    // rank-one matrix: any nonzero sample reconstructs exactly
    const Eigen::MatrixXd r1 = random_rank_k(8, 6, 1, 209);
    const MatrixCurFactors f1 = cur_optimal(r1, {2}, {3});
    CHECK((f1.approx() - r1).norm() < 1e-10 * r1.norm());

    // optimality: never worse than the classic core on the same sets
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd b = oracle::random_matrix(12, 10, 300 + seed);
        const std::vector<int> rows{1, 5, 9}, cols{0, 4, 8};
        const double opt = (b - cur_optimal(b, rows, cols).approx()).norm();
        const double classic = (b - cur_classic(b, rows, cols).approx()).norm();
        CHECK(opt <= classic + 1e-10);
    }
}

TEST_CASE("cur_local") {
    const Eigen::MatrixXd a = oracle::random_matrix(9, 7, 210);
    const std::vector<int> rows{1, 4, 7}, cols{0, 3, 6};
    std::vector<int> all_rows(9), all_cols(7);
    for (int i = 0; i < 9; ++i) all_rows[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < 7; ++j) all_cols[static_cast<std::size_t>(j)] = j;

    // fitting everything reduces to the optimal core
    const MatrixCurFactors local_all = cur_local(a, rows, cols, all_rows, all_cols);
    const MatrixCurFactors opt = cur_optimal(a, rows, cols);
    CHECK((local_all.u - opt.u).norm() < 1e-9);

    // fitting only the sampled block reduces to the classic pseudoinverse core
    const MatrixCurFactors local_self = cur_local(a, rows, cols, rows, cols);
    CHECK((local_self.u - pinv(select_block(a, rows, cols))).norm() < 1e-10);

    // small fitted block vs a dense least-squares oracle on that block
    const std::vector<int> fr{0, 2, 5, 8}, fc{1, 2, 5};
    const MatrixCurFactors local = cur_local(a, rows, cols, fr, fc);
    // vec form: minimize || sum_pq U(p,q) C'(:,p) R'(q,:) - A' ||
    const Eigen::MatrixXd cp = select_block(a, fr, cols);
    const Eigen::MatrixXd rp = select_block(a, rows, fc);
    const Eigen::MatrixXd ap = select_block(a, fr, fc);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(fr.size() * fc.size()),
                           static_cast<Eigen::Index>(cols.size() * rows.size()));
    Eigen::VectorXd rhs(design.rows());
    Eigen::Index eq = 0;
    for (std::size_t i = 0; i < fr.size(); ++i)
        for (std::size_t j = 0; j < fc.size(); ++j, ++eq) {
            rhs(eq) = ap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            Eigen::Index var = 0;
            for (std::size_t p = 0; p < cols.size(); ++p)
                for (std::size_t q = 0; q < rows.size(); ++q, ++var)
                    design(eq, var) =
                        cp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) *
                        rp(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j));
        }
    const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXd u_oracle(static_cast<Eigen::Index>(cols.size()),
                             static_cast<Eigen::Index>(rows.size()));
    Eigen::Index var = 0;
    for (std::size_t p = 0; p < cols.size(); ++p)
        for (std::size_t q = 0; q < rows.size(); ++q, ++var)
            u_oracle(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = sol(var);
    CHECK((local.u - u_oracle).norm() < 1e-8);
}

TEST_CASE("cur_classic") {
    // identity: sampling the leading block zeroes everything else
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
    const MatrixCurFactors f = cur_classic(id, {0, 1}, {0, 1});
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(5, 5);
    want(0, 0) = want(1, 1) = 1.0;
    CHECK((f.approx() - want).norm() < 1e-12);

    // exact rank-k reconstruction through a nonsingular pivot
    const Eigen::MatrixXd a = random_rank_k(9, 8, 3, 211);
    const MatrixCurFactors fa = cur_classic(a, {0, 4, 8}, {1, 3, 7});
    CHECK((fa.approx() - a).norm() < 1e-9 * a.norm());

    // interpolation identities on a generic matrix
    const Eigen::MatrixXd b = oracle::random_matrix(7, 6, 212);
    const std::vector<int> rows{1, 3, 5}, cols{0, 2, 4};
    const MatrixCurFactors fb = cur_classic(b, rows, cols);
    const Eigen::MatrixXd approx = fb.approx();
    CHECK((select_block(approx, rows, cols) - select_block(b, rows, cols)).norm() < 1e-10);
    CHECK((select_cols(approx, cols) - select_cols(b, cols)).norm() < 1e-9);
    CHECK((select_rows(approx, rows) - select_rows(b, rows)).norm() < 1e-9);

    // entry evaluator agrees with the assembled matrix
    CHECK(fb.entry(2, 3) == doctest::Approx(approx(2, 3)).epsilon(1e-12));

    // singular pivot: throws unless the pseudoinverse fallback is requested
    Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(4, 4);
    sing(3, 3) = 1.0;
    CHECK_THROWS_AS(cur_classic(sing, {0, 1}, {0, 1}), SingularPivotError);
    const MatrixCurFactors fallback = cur_classic(sing, {0, 1}, {0, 1}, true);
    CHECK(fallback.pseudo_inverse_used);
    CHECK(fallback.approx().norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(cur_classic(b, {0, 1}, {0, 1, 2}), DimensionError);
}

TEST_CASE("pivot_search") {
    // dominant entry of a diagonal matrix
    Eigen::MatrixXd d = Eigen::Vector3d(5, 1, 0.1).asDiagonal();
    const PivotSearchResult best = pivot_search(d, 1, 64, PivotObjective::abs_det, 3);
    CHECK(best.rows == std::vector<int>{0});
    CHECK(best.cols == std::vector<int>{0});
    CHECK(best.score == doctest::Approx(5.0));

    // deterministic per seed, and the reported score is the max over draws
    const Eigen::MatrixXd a = oracle::random_matrix(8, 8, 213);
    const PivotSearchResult r1 = pivot_search(a, 2, 100, PivotObjective::abs_det, 17);
    const PivotSearchResult r2 = pivot_search(a, 2, 100, PivotObjective::abs_det, 17);
    CHECK(r1.rows == r2.rows);
    CHECK(r1.cols == r2.cols);
    CHECK(r1.score == r2.score);
    const PivotSearchResult single = pivot_search(a, 2, 1, PivotObjective::abs_det, 17);
    CHECK(r1.score >= single.score);

    // near-exhaustive quality: the searched score reaches the top few
    // percent of all C(8,2)^2 pivots on most seeds
    const auto subsets = oracle::subsets(8, 2);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::MatrixXd m = oracle::random_matrix(8, 8, 400 + seed);
        std::vector<double> scores;
        for (const auto& rows : subsets)
            for (const auto& cols : subsets)
                scores.push_back(std::abs(
                    Eigen::FullPivLU<Eigen::MatrixXd>(select_block(m, rows, cols))
                        .determinant()));
        std::sort(scores.begin(), scores.end());
        const double q98 = scores[static_cast<std::size_t>(0.98 * (scores.size() - 1))];
        const PivotSearchResult found =
            pivot_search(m, 2, 500, PivotObjective::abs_det, seed);
        if (found.score >= q98) ++hits;
    }
    CHECK(hits >= 9);
}

TEST_CASE("pivot_search sigma-product objective") {
    const Eigen::MatrixXd a = oracle::random_matrix(6, 6, 214);
    const PivotSearchResult r = pivot_search(a, 2, 50, PivotObjective::sigma_product, 5);
    // on well-conditioned blocks the two objectives coincide
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(select_block(a, r.rows, r.cols));
    CHECK(r.score == doctest::Approx(svd.singularValues().prod()).epsilon(1e-10));
}

TEST_CASE("cur_error_bound") {
    const Eigen::MatrixXd a = oracle::random_matrix(6, 6, 215);
    const std::vector<int> rows{0, 2}, cols{1, 4};
    const double det = std::abs(
        Eigen::FullPivLU<Eigen::MatrixXd>(select_block(a, rows, cols)).determinant());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const double sigma3 = svd.singularValues()(2);

    const double bound = cur_error_bound(a, rows, cols, det);
    CHECK(bound == doctest::Approx(3.0 * sigma3).epsilon(1e-12));
    // doubling the volume estimate doubles the bound
    CHECK(cur_error_bound(a, rows, cols, 2 * det) == doctest::Approx(2 * bound));
    // estimates below the actual pivot volume are rejected
    CHECK_THROWS_AS(cur_error_bound(a, rows, cols, 0.5 * det), DimensionError);

    // exact rank-k matrix: sigma_{k+1} = 0, bound 0, achieved
    const Eigen::MatrixXd low = random_rank_k(6, 6, 2, 216);
    const double mu = oracle::exhaustive_mu(low, 2);
    const PivotSearchResult best = pivot_search(low, 2, 400, PivotObjective::abs_det, 77);
    const double zero_bound = cur_error_bound(low, best.rows, best.cols, mu);
    CHECK(zero_bound < 1e-9);
    const Eigen::MatrixXd approx = cur_classic(low, best.rows, best.cols).approx();
    CHECK((low - approx).cwiseAbs().maxCoeff() < 1e-9);

    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
    CHECK_THROWS_AS(cur_error_bound(zero, {0, 1}, {0, 1}, 1.0), SingularPivotError);
}

TEST_CASE("entrywise bound holds at the maximal-volume pivot") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Eigen::MatrixXd a = oracle::random_matrix(6, 6, 500 + seed);
        const int k = 2;
        double mu = 0.0;
        std::vector<int> bi, bj;
        for (const auto& rows : oracle::subsets(6, k))
            for (const auto& cols : oracle::subsets(6, k)) {
                const double d = std::abs(
                    Eigen::FullPivLU<Eigen::MatrixXd>(select_block(a, rows, cols))
                        .determinant());
                if (d > mu) {
                    mu = d;
                    bi = rows;
                    bj = cols;
                }
            }
        const double bound = cur_error_bound(a, bi, bj, mu);
        const double err = (a - cur_classic(a, bi, bj).approx()).cwiseAbs().maxCoeff();
        CHECK(err <= bound * (1 + 1e-12));
    }
}

TEST_CASE("rank dominance: truncated SVD beats sampling and skeletons") {
    const Eigen::MatrixXd a = oracle::random_matrix(10, 9, 217);
    const int k = 3;
    const double best = svd_rank_k(a, k).error;
    const RowSampleResult sampled = row_sample_refine(a, k, {0, 2, 4, 6}, 6);
    CHECK(best <= sampled.trace.errors.back() + 1e-12);
    const std::vector<int> rows{1, 4, 8}, cols{2, 5, 7};
    CHECK(best <= (a - cur_optimal(a, rows, cols).approx()).norm() + 1e-12);
    CHECK(best <= (a - cur_classic(a, rows, cols).approx()).norm() + 1e-12);
}

TEST_CASE("index set validation") {
    CHECK_THROWS_AS(check_index_set({}, 5, "t"), DimensionError);
    CHECK_THROWS_AS(check_index_set({0, 0}, 5, "t"), DimensionError);
    CHECK_THROWS_AS(check_index_set({3, 1}, 5, "t"), DimensionError);
    CHECK_THROWS_AS(check_index_set({0, 5}, 5, "t"), DimensionError);
    CHECK_NOTHROW(check_index_set({0, 2, 4}, 5, "t"));
}
