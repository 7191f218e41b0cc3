#include "tlra/amm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace tlra {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Relative fit-change convergence test; disabled for negative tolerance.
bool fit_converged(double prev, double cur, double tol) {
    if (tol < 0.0) return false;
    return std::abs(cur - prev) <= tol * std::max(std::abs(cur), 1e-300);
}

constexpr double kTieMargin = 1e-12;

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

void check_tuple(const Tensor& t, const std::vector<int>& ranks,
                 const SubspaceTuple& tuple) {
    if (tuple.order() != t.order() || static_cast<int>(ranks.size()) != t.order())
        throw DimensionError("solver: tuple order must match tensor order");
    for (int i = 0; i < t.order(); ++i) {
        const auto& f = tuple.frames[static_cast<std::size_t>(i)];
        if (f.n() != t.dim(i) || f.rank() != ranks[static_cast<std::size_t>(i)])
            throw DimensionError("solver: frame shape does not match (n, r)");
        if (ranks[static_cast<std::size_t>(i)] < 1 ||
            ranks[static_cast<std::size_t>(i)] > t.dim(i))
            throw DimensionError("solver: rank out of range");
    }
}

}  // namespace

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::max_iters: return "max_iters";
        case StopReason::fit_converged: return "fit_converged";
        case StopReason::change_converged: return "change_converged";
        case StopReason::fixed_point: return "fixed_point";
        case StopReason::fallback: return "fallback";
    }
    return "unknown";
}

GramMatrix build_gram(const Tensor& t, const SubspaceTuple& tuple, int mode) {
    if (tuple.order() != t.order())
        throw DimensionError("build_gram: tuple order mismatch");
    if (mode < 0 || mode >= t.order())
        throw DimensionError("build_gram: mode out of range");
    Tensor w = t;
    for (int m = 0; m < t.order(); ++m) {
        if (m == mode) continue;
        const auto& f = tuple.frames[static_cast<std::size_t>(m)];
        if (f.n() != t.dim(m))
            throw DimensionError("build_gram: frame rows mismatch");
        w = mode_multiply(w, f.basis.transpose(), m);
    }
    const Eigen::MatrixXd wm = unfold(w, mode);
    Eigen::MatrixXd a = wm * wm.transpose();
    a = 0.5 * (a + a.transpose());
    return {mode, std::move(a)};
}

TopEigenspace top_eigenspace(const GramMatrix& a, int r) {
    const int n = static_cast<int>(a.matrix.rows());
    if (r < 1 || r > n) throw DimensionError("top_eigenspace: r out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.matrix);
    if (eig.info() != Eigen::Success)
        throw Error("top_eigenspace: eigendecomposition failed");

    TopEigenspace out;
    out.values.resize(r);
    Eigen::MatrixXd frame(n, r);
    // Eigen sorts ascending; take the trailing r pairs in reverse.
    for (int j = 0; j < r; ++j) {
        out.values(j) = eig.eigenvalues()(n - 1 - j);
        frame.col(j) = eig.eigenvectors().col(n - 1 - j);
    }
    fix_column_signs(frame);
    out.frame = OrthoFrame(std::move(frame));
    out.gap = r < n ? out.values(r - 1) - eig.eigenvalues()(n - 1 - r)
                    : std::numeric_limits<double>::infinity();
    const double scale = std::max(std::abs(eig.eigenvalues()(n - 1)), 1e-300);
    out.degenerate = r < n && out.gap <= 1e-10 * scale;
    return out;
}

double projection_objective(const Tensor& t, const SubspaceTuple& tuple) {
    const Tensor core = core_tensor(t, tuple);
    double s = 0.0;
    for (std::size_t i = 0; i < core.size(); ++i) s += core[i] * core[i];
    return s;
}

// One cyclic sweep of single-mode updates; returns the objective after
// the sweep.  Degenerate eigenspaces keep the previous frame unless the
// Ky-Fan value strictly improves the objective.
namespace {
double amm_sweep(const Tensor& t, SubspaceTuple& tuple, double current,
                 RunTrace& trace) {
    for (int i = 0; i < t.order(); ++i) {
        const GramMatrix a = build_gram(t, tuple, i);
        const int r = tuple.frames[static_cast<std::size_t>(i)].rank();
        TopEigenspace eig = top_eigenspace(a, r);
        ++trace.subproblems;
        const double kyfan = eig.values.sum();
        if (eig.degenerate && kyfan <= current + kTieMargin * std::max(1.0, current)) {
            ++trace.degenerate_updates;
        } else {
            tuple.frames[static_cast<std::size_t>(i)] = std::move(eig.frame);
            current = projection_objective(t, tuple);
        }
        trace.objectives.push_back(current);
    }
    return current;
}
}  // namespace

TupleResult amm(const Tensor& t, const std::vector<int>& ranks,
                const SubspaceTuple& init, const StopRule& stop) {
    check_tuple(t, ranks, init);
    const auto start = Clock::now();
    TupleResult out;
    out.tuple = init;
    double obj = projection_objective(t, out.tuple);
    out.trace.objectives.push_back(obj);
    out.trace.iter_objectives.push_back(obj);

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        const double prev = obj;
        obj = amm_sweep(t, out.tuple, obj, out.trace);
        out.trace.iterations = iter;
        out.trace.iter_objectives.push_back(obj);
        if (fit_converged(prev, obj, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            out.trace.seconds = elapsed_seconds(start);
            return out;
        }
    }
    out.trace.stop_reason = StopReason::max_iters;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

TupleResult mamm(const Tensor& t, const std::vector<int>& ranks,
                 const SubspaceTuple& init, const StopRule& stop) {
    check_tuple(t, ranks, init);
    const auto start = Clock::now();
    const int d = t.order();
    TupleResult out;
    out.tuple = init;
    double obj = projection_objective(t, out.tuple);
    out.trace.objectives.push_back(obj);
    out.trace.iter_objectives.push_back(obj);

    // Candidate update per mode: the Ky-Fan value it would reach.
    std::vector<TopEigenspace> candidates(static_cast<std::size_t>(d));
    std::vector<double> cand_values(static_cast<std::size_t>(d));
    auto solve_candidate = [&](int i) {
        candidates[static_cast<std::size_t>(i)] =
            top_eigenspace(build_gram(t, out.tuple, i), ranks[static_cast<std::size_t>(i)]);
        cand_values[static_cast<std::size_t>(i)] =
            candidates[static_cast<std::size_t>(i)].values.sum();
        ++out.trace.subproblems;
    };
    for (int i = 0; i < d; ++i) solve_candidate(i);

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        int best = 0;
        for (int i = 1; i < d; ++i)
            if (cand_values[static_cast<std::size_t>(i)] >
                cand_values[static_cast<std::size_t>(best)])
                best = i;
        out.trace.step_candidates.push_back(cand_values);

        if (cand_values[static_cast<std::size_t>(best)] <=
            obj + kTieMargin * std::max(1.0, obj)) {
            // no candidate improves: 1-semi maximal point
            out.trace.stop_reason = StopReason::fixed_point;
            out.trace.seconds = elapsed_seconds(start);
            return out;
        }

        const double prev = obj;
        out.tuple.frames[static_cast<std::size_t>(best)] =
            std::move(candidates[static_cast<std::size_t>(best)].frame);
        obj = projection_objective(t, out.tuple);
        out.trace.objectives.push_back(obj);
        out.trace.iter_objectives.push_back(obj);
        out.trace.iterations = iter;

        if (fit_converged(prev, obj, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            out.trace.seconds = elapsed_seconds(start);
            return out;
        }
        // committed mode's candidate is now worth the current objective;
        // the other modes see a changed tuple and are recomputed
        cand_values[static_cast<std::size_t>(best)] = obj;
        for (int i = 0; i < d; ++i)
            if (i != best) solve_candidate(i);
    }
    out.trace.stop_reason = StopReason::max_iters;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

std::vector<std::pair<int, int>> pair_schedule(int d) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = d - 2; i >= 0; --i)
        for (int j = d - 1; j > i; --j) pairs.emplace_back(i, j);
    return pairs;
}

TupleResult two_ammv(const Tensor& t, const std::vector<int>& ranks,
                     const SubspaceTuple& init, const StopRule& stop,
                     const StopRule& inner_stop) {
    check_tuple(t, ranks, init);
    if (t.order() < 3)
        throw DimensionError("two_ammv: needs at least 3 modes");
    const auto start = Clock::now();
    TupleResult out;
    out.tuple = init;
    double obj = projection_objective(t, out.tuple);
    out.trace.objectives.push_back(obj);
    out.trace.iter_objectives.push_back(obj);
    const auto pairs = pair_schedule(t.order());

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        const double outer_prev = obj;
        for (const auto& [i, j] : pairs) {
            // inner AMM over the pair, all other modes fixed
            double pair_prev = obj;
            for (int inner = 0; inner < inner_stop.max_iters; ++inner) {
                for (int m : {i, j}) {
                    TopEigenspace eig = top_eigenspace(
                        build_gram(t, out.tuple, m), ranks[static_cast<std::size_t>(m)]);
                    ++out.trace.subproblems;
                    const double kyfan = eig.values.sum();
                    if (eig.degenerate &&
                        kyfan <= obj + kTieMargin * std::max(1.0, obj)) {
                        ++out.trace.degenerate_updates;
                    } else {
                        out.tuple.frames[static_cast<std::size_t>(m)] = std::move(eig.frame);
                        obj = projection_objective(t, out.tuple);
                    }
                    out.trace.objectives.push_back(obj);
                }
                if (fit_converged(pair_prev, obj, inner_stop.fit_tol)) break;
                pair_prev = obj;
            }
        }
        out.trace.iterations = iter;
        out.trace.iter_objectives.push_back(obj);
        if (fit_converged(outer_prev, obj, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            out.trace.seconds = elapsed_seconds(start);
            return out;
        }
    }
    out.trace.stop_reason = StopReason::max_iters;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

namespace {

std::vector<Eigen::VectorXd> checked_unit_vectors(const Tensor& t,
                                                  const std::vector<Eigen::VectorXd>& init) {
    if (static_cast<int>(init.size()) != t.order())
        throw DimensionError("rank-one solver: need one vector per mode");
    std::vector<Eigen::VectorXd> x = init;
    for (int i = 0; i < t.order(); ++i) {
        if (x[static_cast<std::size_t>(i)].size() != t.dim(i))
            throw DimensionError("rank-one solver: vector length mismatch");
        const double norm = x[static_cast<std::size_t>(i)].norm();
        if (norm == 0.0)
            throw DegenerateInputError("rank-one solver: zero start vector");
        x[static_cast<std::size_t>(i)] /= norm;
    }
    return x;
}

}  // namespace

Eigen::MatrixXd pair_contraction_matrix(const Tensor& t,
                                        const std::vector<Eigen::VectorXd>& vectors,
                                        int i, int j) {
    if (i >= j) throw DimensionError("pair_contraction_matrix: need i < j");
    Tensor cur = t;
    for (int m = t.order() - 1; m >= 0; --m) {
        if (m == i || m == j) continue;
        cur = mode_multiply(cur, vectors[static_cast<std::size_t>(m)].transpose(), m);
    }
    Eigen::MatrixXd out(t.dim(i), t.dim(j));
    for (int p = 0; p < t.dim(i); ++p)
        for (int q = 0; q < t.dim(j); ++q)
            out(p, q) = cur[static_cast<std::size_t>(p * t.dim(j) + q)];
    return out;
}

double singular_tuple_residual(const Tensor& t,
                               const std::vector<Eigen::VectorXd>& vectors,
                               double lambda) {
    double worst = 0.0;
    for (int i = 0; i < t.order(); ++i) {
        const Eigen::VectorXd v = contract_except(t, vectors, i);
        worst = std::max(worst,
                         (v - lambda * vectors[static_cast<std::size_t>(i)]).norm());
    }
    return worst;
}

RankOneResult rank_one_amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                           const StopRule& stop) {
    const auto start = Clock::now();
    RankOneResult out;
    out.vectors = checked_unit_vectors(t, init);
    double f = rank_one_value(t, out.vectors);
    if (f == 0.0)
        throw DegenerateInputError("rank_one_amm: start value f_T is zero");
    out.trace.objectives.push_back(f);
    out.trace.iter_objectives.push_back(f);

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        const double prev = f;
        for (int i = 0; i < t.order(); ++i) {
            Eigen::VectorXd v = contract_except(t, out.vectors, i);
            const double norm = v.norm();
            ++out.trace.subproblems;
            if (norm == 0.0)
                throw DegenerateInputError("rank_one_amm: zero contraction vector");
            out.vectors[static_cast<std::size_t>(i)] = v / norm;
            f = norm;
            out.trace.objectives.push_back(f);
        }
        out.trace.iterations = iter;
        out.trace.iter_objectives.push_back(f);
        if (fit_converged(prev, f, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            break;
        }
        if (iter == stop.max_iters) out.trace.stop_reason = StopReason::max_iters;
    }
    out.lambda = f;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

namespace {

// Apply the optimal pair update (top singular triple) to modes (i, j).
// Returns the new objective value sigma_1.
double apply_pair_update(const Tensor& t, std::vector<Eigen::VectorXd>& x, int i,
                         int j) {
    const Eigen::MatrixXd m = pair_contraction_matrix(t, x, i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    x[static_cast<std::size_t>(i)] = svd.matrixU().col(0);
    x[static_cast<std::size_t>(j)] = svd.matrixV().col(0);
    return svd.singularValues()(0);
}

}  // namespace

RankOneResult rank_one_2amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                            const StopRule& stop) {
    if (t.order() < 3)
        throw DimensionError("rank_one_2amm: needs at least 3 modes");
    const auto start = Clock::now();
    RankOneResult out;
    out.vectors = checked_unit_vectors(t, init);
    double f = rank_one_value(t, out.vectors);
    if (f == 0.0)
        throw DegenerateInputError("rank_one_2amm: start value f_T is zero");
    out.trace.objectives.push_back(f);
    out.trace.iter_objectives.push_back(f);
    const auto pairs = pair_schedule(t.order());

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        const double prev = f;
        for (const auto& [i, j] : pairs) {
            f = apply_pair_update(t, out.vectors, i, j);
            ++out.trace.subproblems;
            out.trace.objectives.push_back(f);
        }
        out.trace.iterations = iter;
        out.trace.iter_objectives.push_back(f);
        if (fit_converged(prev, f, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            break;
        }
        if (iter == stop.max_iters) out.trace.stop_reason = StopReason::max_iters;
    }
    out.lambda = f;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

RankOneResult rank_one_m2amm(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                             const StopRule& stop) {
    if (t.order() < 3)
        throw DimensionError("rank_one_m2amm: needs at least 3 modes");
    const auto start = Clock::now();
    RankOneResult out;
    out.vectors = checked_unit_vectors(t, init);
    double f = rank_one_value(t, out.vectors);
    if (f == 0.0)
        throw DegenerateInputError("rank_one_m2amm: start value f_T is zero");
    out.trace.objectives.push_back(f);
    out.trace.iter_objectives.push_back(f);

    const auto pairs = pair_schedule(t.order());
    const std::size_t npairs = pairs.size();
    std::vector<double> cand_values(npairs);
    auto solve_candidate = [&](std::size_t p) {
        const auto& [i, j] = pairs[p];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(pair_contraction_matrix(t, out.vectors, i, j));
        cand_values[p] = svd.singularValues()(0);
        ++out.trace.subproblems;
    };
    for (std::size_t p = 0; p < npairs; ++p) solve_candidate(p);

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < npairs; ++p)
            if (cand_values[p] > cand_values[best]) best = p;
        out.trace.step_candidates.push_back(cand_values);

        if (cand_values[best] <= f + kTieMargin * std::max(1.0, std::abs(f))) {
            out.trace.stop_reason = StopReason::fixed_point;
            break;
        }
        const double prev = f;
        f = apply_pair_update(t, out.vectors, pairs[best].first, pairs[best].second);
        out.trace.objectives.push_back(f);
        out.trace.iter_objectives.push_back(f);
        out.trace.iterations = iter;
        if (fit_converged(prev, f, stop.fit_tol)) {
            out.trace.stop_reason = StopReason::fit_converged;
            break;
        }
        if (iter == stop.max_iters) {
            out.trace.stop_reason = StopReason::max_iters;
            break;
        }
        cand_values[best] = f;
        for (std::size_t p = 0; p < npairs; ++p)
            if (p != best) solve_candidate(p);
    }
    out.lambda = f;
    out.trace.seconds = elapsed_seconds(start);
    return out;
}

SubspaceTuple hosvd_init(const Tensor& t, const std::vector<int>& ranks) {
    if (static_cast<int>(ranks.size()) != t.order())
        throw DimensionError("hosvd_init: one rank per mode required");
    SubspaceTuple tuple;
    tuple.frames.reserve(ranks.size());
    for (int l = 0; l < t.order(); ++l) {
        const int r = ranks[static_cast<std::size_t>(l)];
        if (r < 1 || r > t.dim(l)) throw DimensionError("hosvd_init: rank out of range");
        const Eigen::MatrixXd tl = unfold(t, l);
        GramMatrix g{l, tl * tl.transpose()};
        g.matrix = 0.5 * (g.matrix + g.matrix.transpose());
        tuple.frames.push_back(top_eigenspace(g, r).frame);
    }
    return tuple;
}

SubspaceTuple random_init(const std::vector<int>& dims, const std::vector<int>& ranks,
                          std::uint64_t seed) {
    if (dims.size() != ranks.size())
        throw DimensionError("random_init: dims/ranks size mismatch");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SubspaceTuple tuple;
    tuple.frames.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (ranks[i] < 1 || ranks[i] > dims[i])
            throw DimensionError("random_init: rank out of range");
        Eigen::MatrixXd m(dims[i], ranks[i]);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = gauss(rng);
        tuple.frames.push_back(orthonormalize(m));
    }
    return tuple;
}

std::vector<Eigen::VectorXd> random_unit_vectors(const std::vector<int>& dims,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(dims.size());
    for (int n : dims) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        out.push_back(v.normalized());
    }
    return out;
}

}  // namespace tlra
