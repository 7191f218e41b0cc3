#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "tlra/grassmann.hpp"
#include "tlra/tensor.hpp"

namespace tlra {

// Alternating-family stop rule: quit after max_iters outer iterations or
// when the relative objective change drops below fit_tol.  A negative
// fit_tol disables the fit test (used to force an exact sweep count).
struct StopRule {
    int max_iters = 10;
    double fit_tol = 1e-4;
};

enum class StopReason {
    max_iters,
    fit_converged,
    change_converged,
    fixed_point,
    fallback,
};

std::string to_string(StopReason r);

struct RunTrace {
    std::vector<double> objectives;       // after every committed update
    std::vector<double> iter_objectives;  // after each outer iteration
    std::vector<double> displacements;    // Newton iterate displacements
    std::vector<double> residuals;        // Newton-1 singular-tuple residuals
    // candidate objective values per greedy step (MAMM / M2AMM)
    std::vector<std::vector<double>> step_candidates;
    double seconds = 0.0;
    int iterations = 0;
    long subproblems = 0;
    int degenerate_updates = 0;
    bool used_fallback = false;
    StopReason stop_reason = StopReason::max_iters;
};

// Mode-i quadratic form: A_i = sum over the other modes' frame columns
// of v v^T with v = T x (o_k u_{j_k,k}).  Symmetric positive
// semidefinite; invariant under rotations of the other frames' bases.
struct GramMatrix {
    int mode = 0;
    Eigen::MatrixXd matrix;
};

GramMatrix build_gram(const Tensor& t, const SubspaceTuple& tuple, int mode);

struct TopEigenspace {
    OrthoFrame frame;        // spans the r leading eigenvectors
    Eigen::VectorXd values;  // leading eigenvalues, descending
    double gap;              // lambda_r - lambda_{r+1}; +inf when r = n
    bool degenerate;         // gap within tolerance of zero
};

// Ky-Fan optimal frame: trace over the returned frame equals the sum of
// the r largest eigenvalues.  A zero gap is flagged, not fatal.
TopEigenspace top_eigenspace(const GramMatrix& a, int r);

// ||core||^2 = squared Hilbert-Schmidt norm of the projection.
double projection_objective(const Tensor& t, const SubspaceTuple& tuple);

struct TupleResult {
    SubspaceTuple tuple;
    RunTrace trace;
};

// Cyclic alternating maximization: each sweep replaces every mode frame
// by the top eigenspace of its Gram matrix.
TupleResult amm(const Tensor& t, const std::vector<int>& ranks,
                const SubspaceTuple& init, const StopRule& stop);

// Greedy variant: evaluates every mode's candidate update and commits
// the steepest ascent; after a commit only the other modes' candidates
// are recomputed.
TupleResult mamm(const Tensor& t, const std::vector<int>& ranks,
                 const SubspaceTuple& init, const StopRule& stop);

// Pair-block variant: each pair of modes is maximized by an inner AMM
// restricted to the pair, cycling through all pairs per outer iteration.
TupleResult two_ammv(const Tensor& t, const std::vector<int>& ranks,
                     const SubspaceTuple& init, const StopRule& stop,
                     const StopRule& inner_stop);

struct RankOneResult {
    std::vector<Eigen::VectorXd> vectors;  // unit vectors, one per mode
    double lambda = 0.0;                   // multilinear form value at the tuple
    RunTrace trace;
};

// Classic alternating update x_i <- normalized T x (o_{j != i} x_j).
// Throws DegenerateInputError when the start value or an intermediate
// contraction vanishes.
RankOneResult rank_one_amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                           const StopRule& stop);

// Pair update via the top singular triple of the pair contraction
// matrix; each pair update is globally optimal for that pair.
RankOneResult rank_one_2amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                            const StopRule& stop);

// Greedy pair schedule: all pairs evaluated, steepest committed.
RankOneResult rank_one_m2amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                             const StopRule& stop);

// Frame l spans the top-r_l left singular subspace of the mode-l
// unfolding.
SubspaceTuple hosvd_init(const Tensor& t, const std::vector<int>& ranks);

// Orthonormalized standard Gaussian frames, deterministic per seed.
SubspaceTuple random_init(const std::vector<int>& dims, const std::vector<int>& ranks,
                          std::uint64_t seed);

std::vector<Eigen::VectorXd> random_unit_vectors(const std::vector<int>& dims,
                                                 std::uint64_t seed);

// max_i || T x (o_{j != i} u_j) - lambda u_i || over unit vectors u.
double singular_tuple_residual(const Tensor& t,
                               const std::vector<Eigen::VectorXd>& vectors,
                               double lambda);

// Contraction of T with every vector except modes i < j, reshaped as an
// n_i x n_j matrix (the pair-update subproblem operator).
Eigen::MatrixXd pair_contraction_matrix(const Tensor& t,
                                        const std::vector<Eigen::VectorXd>& vectors,
                                        int i, int j);

// Pair sweep order used by the pair-block methods; for d = 3 the order
// is (2,3), (1,3), (1,2) in 1-based mode numbers.
std::vector<std::pair<int, int>> pair_schedule(int d);

}  // namespace tlra
