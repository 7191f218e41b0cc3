#pragma once

#include <Eigen/Core>
#include <vector>

#include "tlra/amm.hpp"
#include "tlra/grassmann.hpp"
#include "tlra/tensor.hpp"

namespace tlra {

// Newton stop rule: quit when the iterate displacement drops below
// change_tol (default exp(-10)) or after max_iters steps.
struct NewtonStop {
    int max_iters = 10;
    double change_tol = 4.5399929762484854e-5;
};

// --- Newton-1: fixed point of the rank-one contraction map -------------

// Jacobian of G(psi) = psi - F(psi) stacked over modes, where
// F_i(psi) = T x (o_{j != i} x_j): identity diagonal blocks and
// -T x (o_{k != i,j} x_k) off diagonal.
Eigen::MatrixXd newton1_jacobian(const Tensor& t,
                                 const std::vector<Eigen::VectorXd>& vectors);

// Newton iteration on the renormalized start f^{-1/(d-2)} * psi.  Needs
// d >= 3 and a positive start value.  Throws SingularJacobianError when
// (I - DF) is numerically singular and DivergenceError when ||G|| grows
// three steps in a row; callers fall back to the alternating update.
RankOneResult newton1(const Tensor& t, const std::vector<Eigen::VectorXd>& start,
                      const NewtonStop& stop);

// warm_sweeps of the alternating update, then Newton-1, falling back to
// the alternating update when Newton signals failure.
RankOneResult hybrid_rank_one(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                              int warm_sweeps, const StopRule& alt_stop,
                              const NewtonStop& newton_stop);

// --- Newton-2: fixed point of the alternating map in chart coordinates -

// All pair contractions C_ij(J) = T x (o_{(k,l) in J} u_{k,l}) for the
// anchor bases, J running over the remaining modes' frame columns.
class ContractionCache {
  public:
    ContractionCache(std::vector<int> dims, std::vector<int> ranks,
                     std::vector<std::vector<Eigen::MatrixXd>> store);

    // C_ij(J): row mode i, column mode j (transposed view when i > j).
    Eigen::MatrixXd c(int i, int j, int j_index) const;
    // R_ij = prod of r_l over l outside {i, j}.
    int pair_count(int i, int j) const;

    const std::vector<int>& dims() const { return dims_; }
    const std::vector<int>& ranks() const { return ranks_; }

  private:
    std::vector<int> dims_, ranks_;
    std::vector<std::vector<Eigen::MatrixXd>> store_;  // pairs (i<j) in lex order
};

ContractionCache build_contraction_cache(const Tensor& t, const SubspaceTuple& anchor);

// A_j assembled from the cached pair contractions through mode i != j;
// equals build_gram(t, anchor, j) for every admissible i.
Eigen::MatrixXd gram_from_cache(const ContractionCache& cache,
                                const SubspaceTuple& anchor, int j, int i);

// Per-mode spectral and chart data at the anchor: full eigensystem of
// A_j (descending), the image frame's coordinates Z = [Y; X] in the
// anchor basis, and Y^{-1}.
struct ChartDecomposition {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
    Eigen::MatrixXd z0, y0, x0;
    Eigen::MatrixXd y0_inv;
};

// Throws DegenerateSpectrumError when the r-th eigen-gap of some mode is
// below 1e-10 * lambda_1, and OutOfChartError when Y_{j,0} is singular.
std::vector<ChartDecomposition> decompose_modes(const SubspaceTuple& anchor,
                                                const ContractionCache& cache);

struct Newton2Derivative {
    ChartPoint f0;        // chart image of the anchor under one sweep
    Eigen::MatrixXd df0;  // L x L, rows = outputs, cols = inputs
};

// Closed-form chart derivative at the anchor (chart point 0): diagonal
// blocks vanish; off-diagonal entries come from first-order eigenvector
// perturbation of the Gram matrices.  Columns are independent and are
// computed in parallel.
Newton2Derivative newton2_derivative(const SubspaceTuple& anchor,
                                     const ContractionCache& cache,
                                     const std::vector<ChartDecomposition>& decomp);

// Newton iteration re-anchored at the current tuple each step: solve
// (I - DF(0)) delta = F(0), move through the chart, re-orthonormalize.
// Failure (degenerate spectrum, chart loss, singular system, objective
// decrease beyond 1e-6) ends the run with StopReason::fallback and the
// last accepted tuple so callers can resume alternating sweeps.
TupleResult newton2(const Tensor& t, const std::vector<int>& ranks,
                    const SubspaceTuple& init, const NewtonStop& stop);

// Default driver: warm_sweeps of amm, then newton2, then amm again when
// Newton signalled fallback.
TupleResult hybrid_best_r(const Tensor& t, const std::vector<int>& ranks,
                          const SubspaceTuple& init, int warm_sweeps,
                          const StopRule& alt_stop, const NewtonStop& newton_stop);

}  // namespace tlra
