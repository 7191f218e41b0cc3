#include "tlra/newton.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace tlra {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kMaxCondition = 1e12;
constexpr double kGapTol = 1e-10;    // relative eigen-gap floor
constexpr double kChartTol = 1e-10;  // Y_{j,0} singularity threshold

int pair_index(int i, int j, int d) {
    // (0,1),(0,2),...,(d-2,d-1) in lexicographic order
    return i * d - i * (i + 1) / 2 + (j - i - 1);
}

// Solves M x = b with a condition guard.
Eigen::VectorXd guarded_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                              const char* what) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    if (smin <= 0.0 || smax / smin > kMaxCondition)
        throw SingularJacobianError(what);
    return svd.solve(b);
}

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

Eigen::MatrixXd newton1_jacobian(const Tensor& t,
                                 const std::vector<Eigen::VectorXd>& vectors) {
    const int d = t.order();
    if (d < 3) throw DimensionError("newton1_jacobian: needs d >= 3");
    if (static_cast<int>(vectors.size()) != d)
        throw DimensionError("newton1_jacobian: need one vector per mode");
    int total = 0;
    std::vector<int> offset(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        offset[static_cast<std::size_t>(i)] = total;
        total += t.dim(i);
    }
    Eigen::MatrixXd dg = Eigen::MatrixXd::Identity(total, total);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const Eigen::MatrixXd c = pair_contraction_matrix(t, vectors, i, j);
            dg.block(offset[static_cast<std::size_t>(i)], offset[static_cast<std::size_t>(j)],
                     t.dim(i), t.dim(j)) = -c;
            dg.block(offset[static_cast<std::size_t>(j)], offset[static_cast<std::size_t>(i)],
                     t.dim(j), t.dim(i)) = -c.transpose();
        }
    }
    return dg;
}

RankOneResult newton1(const Tensor& t, const std::vector<Eigen::VectorXd>& start,
                      const NewtonStop& stop) {
    const int d = t.order();
    if (d < 3) throw DimensionError("newton1: needs d >= 3");
    if (static_cast<int>(start.size()) != d)
        throw DimensionError("newton1: need one vector per mode");
    const auto t0 = Clock::now();

    const double f_start = rank_one_value(t, start);
    if (f_start <= 0.0)
        throw DegenerateInputError("newton1: start value f_T must be positive");

    // fixed-point normalization: scale every vector by f^{-1/(d-2)}
    const double scale = std::pow(f_start, -1.0 / (d - 2));
    std::vector<Eigen::VectorXd> phi = start;
    for (auto& v : phi) v *= scale;

    RankOneResult out;
    out.trace.objectives.push_back(f_start);

    auto record_residual = [&](const std::vector<Eigen::VectorXd>& p) {
        std::vector<Eigen::VectorXd> units = p;
        for (auto& v : units) {
            const double n = v.norm();
            if (n > 0.0) v /= n;
        }
        const double lambda = rank_one_value(t, units);
        out.trace.residuals.push_back(singular_tuple_residual(t, units, lambda));
        return std::make_pair(units, lambda);
    };
    record_residual(phi);

    int total = 0;
    for (int i = 0; i < d; ++i) total += t.dim(i);

    double prev_gnorm = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        // G(phi) = phi - F(phi)
        Eigen::VectorXd g(total);
        int at = 0;
        for (int i = 0; i < d; ++i) {
            const Eigen::VectorXd fi = contract_except(t, phi, i);
            g.segment(at, t.dim(i)) = phi[static_cast<std::size_t>(i)] - fi;
            at += t.dim(i);
        }
        const double gnorm = g.norm();
        if (gnorm > prev_gnorm) {
            if (++growth_streak >= 3)
                throw DivergenceError("newton1: residual grew three steps in a row");
        } else {
            growth_streak = 0;
        }
        prev_gnorm = gnorm;

        const Eigen::MatrixXd dg = newton1_jacobian(t, phi);
        const Eigen::VectorXd delta =
            guarded_solve(dg, g, "newton1: singular (I - DF)");

        at = 0;
        for (int i = 0; i < d; ++i) {
            phi[static_cast<std::size_t>(i)] -= delta.segment(at, t.dim(i));
            at += t.dim(i);
        }
        out.trace.iterations = iter;
        out.trace.displacements.push_back(delta.norm());
        out.trace.objectives.push_back(record_residual(phi).second);
        if (delta.norm() < stop.change_tol) {
            out.trace.stop_reason = StopReason::change_converged;
            break;
        }
        if (iter == stop.max_iters) out.trace.stop_reason = StopReason::max_iters;
    }

    for (auto& v : phi) {
        const double n = v.norm();
        if (n == 0.0) throw DivergenceError("newton1: iterate collapsed to zero");
        v /= n;
    }
    out.vectors = std::move(phi);
    out.lambda = rank_one_value(t, out.vectors);
    out.trace.seconds = elapsed_seconds(t0);
    return out;
}

RankOneResult hybrid_rank_one(const Tensor& t, const std::vector<Eigen::VectorXd>& init,
                              int warm_sweeps, const StopRule& alt_stop,
                              const NewtonStop& newton_stop) {
    if (warm_sweeps < 1)
        throw DimensionError("hybrid_rank_one: need at least one warm sweep");
    StopRule warm{warm_sweeps, -1.0};  // exact sweep count
    RankOneResult amm_part = rank_one_amm(t, init, warm);
    RankOneResult out;
    try {
        out = newton1(t, amm_part.vectors, newton_stop);
    } catch (const Error&) {
        // Newton failed; continue alternating from the warm tuple.
        out = rank_one_amm(t, amm_part.vectors, alt_stop);
        out.trace.used_fallback = true;
        out.trace.stop_reason = StopReason::fallback;
    }
    // merge traces: warm sweeps first
    RunTrace merged = amm_part.trace;
    merged.objectives.insert(merged.objectives.end(), out.trace.objectives.begin(),
                             out.trace.objectives.end());
    merged.residuals = out.trace.residuals;
    merged.displacements = out.trace.displacements;
    merged.iterations += out.trace.iterations;
    merged.subproblems += out.trace.subproblems;
    merged.seconds += out.trace.seconds;
    merged.used_fallback = out.trace.used_fallback;
    merged.stop_reason = out.trace.stop_reason;
    out.trace = std::move(merged);
    return out;
}

ContractionCache::ContractionCache(std::vector<int> dims, std::vector<int> ranks,
                                   std::vector<std::vector<Eigen::MatrixXd>> store)
    : dims_(std::move(dims)), ranks_(std::move(ranks)), store_(std::move(store)) {}

Eigen::MatrixXd ContractionCache::c(int i, int j, int j_index) const {
    const int d = static_cast<int>(dims_.size());
    if (i == j || i < 0 || j < 0 || i >= d || j >= d)
        throw DimensionError("contraction cache: bad mode pair");
    if (i < j)
        return store_[static_cast<std::size_t>(pair_index(i, j, d))]
                     [static_cast<std::size_t>(j_index)];
    return store_[static_cast<std::size_t>(pair_index(j, i, d))]
                 [static_cast<std::size_t>(j_index)]
        .transpose();
}

int ContractionCache::pair_count(int i, int j) const {
    const int d = static_cast<int>(dims_.size());
    if (i == j || i < 0 || j < 0 || i >= d || j >= d)
        throw DimensionError("contraction cache: bad mode pair");
    int count = 1;
    for (int l = 0; l < d; ++l)
        if (l != i && l != j) count *= ranks_[static_cast<std::size_t>(l)];
    return count;
}

ContractionCache build_contraction_cache(const Tensor& t, const SubspaceTuple& anchor) {
    const int d = t.order();
    if (anchor.order() != d)
        throw DimensionError("build_contraction_cache: order mismatch");
    std::vector<std::vector<Eigen::MatrixXd>> store;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            // modes outside the pair, increasing; their column indices run
            // last-fastest over J
            std::vector<int> rest;
            for (int l = 0; l < d; ++l)
                if (l != i && l != j) rest.push_back(l);
            int count = 1;
            for (int l : rest) count *= anchor.frames[static_cast<std::size_t>(l)].rank();

            std::vector<Eigen::MatrixXd> matrices;
            matrices.reserve(static_cast<std::size_t>(count));
            std::vector<int> k(rest.size(), 0);
            for (int c = 0; c < count; ++c) {
                Tensor cur = t;
                for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
                    const int l = rest[static_cast<std::size_t>(p)];
                    const auto& u = anchor.frames[static_cast<std::size_t>(l)].basis;
                    cur = mode_multiply(
                        cur, u.col(k[static_cast<std::size_t>(p)]).transpose(), l);
                }
                Eigen::MatrixXd cm(t.dim(i), t.dim(j));
                for (int p = 0; p < t.dim(i); ++p)
                    for (int q = 0; q < t.dim(j); ++q)
                        cm(p, q) = cur[static_cast<std::size_t>(p * t.dim(j) + q)];
                matrices.push_back(std::move(cm));
                for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
                    auto up = static_cast<std::size_t>(p);
                    if (++k[up] <
                        anchor.frames[static_cast<std::size_t>(rest[up])].rank())
                        break;
                    k[up] = 0;
                }
            }
            store.push_back(std::move(matrices));
        }
    }
    return ContractionCache(anchor.dims(), anchor.ranks(), std::move(store));
}

Eigen::MatrixXd gram_from_cache(const ContractionCache& cache,
                                const SubspaceTuple& anchor, int j, int i) {
    if (i == j) throw DimensionError("gram_from_cache: mode pair must differ");
    const int nj = cache.dims()[static_cast<std::size_t>(j)];
    const int ri = cache.ranks()[static_cast<std::size_t>(i)];
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nj, nj);
    const int count = cache.pair_count(i, j);
    for (int c = 0; c < count; ++c) {
        const Eigen::MatrixXd cji = cache.c(j, i, c);
        for (int k = 0; k < ri; ++k) {
            const Eigen::VectorXd v =
                cji * anchor.frames[static_cast<std::size_t>(i)].basis.col(k);
            a.noalias() += v * v.transpose();
        }
    }
    return 0.5 * (a + a.transpose());
}

std::vector<ChartDecomposition> decompose_modes(const SubspaceTuple& anchor,
                                                const ContractionCache& cache) {
    const int d = anchor.order();
    std::vector<ChartDecomposition> out(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const int n = anchor.frames[static_cast<std::size_t>(j)].n();
        const int r = anchor.frames[static_cast<std::size_t>(j)].rank();
        const Eigen::MatrixXd a = gram_from_cache(cache, anchor, j, j == 0 ? 1 : 0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
        if (eig.info() != Eigen::Success)
            throw Error("decompose_modes: eigendecomposition failed");

        ChartDecomposition& dec = out[static_cast<std::size_t>(j)];
        dec.eigenvalues.resize(n);
        dec.eigenvectors.resize(n, n);
        for (int p = 0; p < n; ++p) {
            dec.eigenvalues(p) = eig.eigenvalues()(n - 1 - p);
            dec.eigenvectors.col(p) = eig.eigenvectors().col(n - 1 - p);
        }
        fix_column_signs(dec.eigenvectors);

        if (r < n) {
            const double gap = dec.eigenvalues(r - 1) - dec.eigenvalues(r);
            const double top = std::max(std::abs(dec.eigenvalues(0)), 1e-300);
            if (gap <= kGapTol * top)
                throw DegenerateSpectrumError(
                    "decompose_modes: eigen-gap too small at mode " + std::to_string(j));
        }

        dec.z0 = anchor.frames[static_cast<std::size_t>(j)].full_basis().transpose() *
                 dec.eigenvectors.leftCols(r);
        dec.y0 = dec.z0.topRows(r);
        dec.x0 = dec.z0.bottomRows(n - r);
        Eigen::JacobiSVD<Eigen::MatrixXd> ysvd(dec.y0,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = ysvd.singularValues();
        if (sv(0) == 0.0 || sv(sv.size() - 1) < kChartTol * sv(0))
            throw OutOfChartError("decompose_modes: Y_{j,0} singular at mode " +
                                  std::to_string(j));
        dec.y0_inv = ysvd.solve(Eigen::MatrixXd::Identity(r, r));
    }
    return out;
}

Newton2Derivative newton2_derivative(const SubspaceTuple& anchor,
                                     const ContractionCache& cache,
                                     const std::vector<ChartDecomposition>& decomp) {
    const int d = anchor.order();
    const auto dims = anchor.dims();
    const auto ranks = anchor.ranks();

    std::vector<int> offset(static_cast<std::size_t>(d));
    int total = 0;
    for (int m = 0; m < d; ++m) {
        offset[static_cast<std::size_t>(m)] = total;
        total += (dims[static_cast<std::size_t>(m)] - ranks[static_cast<std::size_t>(m)]) *
                 ranks[static_cast<std::size_t>(m)];
    }

    Newton2Derivative out;
    out.f0.blocks.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        out.f0.blocks.push_back(decomp[static_cast<std::size_t>(j)].x0 *
                                decomp[static_cast<std::size_t>(j)].y0_inv);
    out.df0 = Eigen::MatrixXd::Zero(total, total);

    for (const auto& f : anchor.frames)
        if (!f.completion)
            throw Error("newton2_derivative: anchor frames need completions");

    // flattened input coordinates (i, p, q); each owns one column of DF(0)
    struct Coord {
        int i, p, q, col;
    };
    std::vector<Coord> coords;
    for (int i = 0; i < d; ++i) {
        const int ni = dims[static_cast<std::size_t>(i)];
        const int ri = ranks[static_cast<std::size_t>(i)];
        for (int p = 0; p < ni - ri; ++p)
            for (int q = 0; q < ri; ++q)
                coords.push_back({i, p, q, offset[static_cast<std::size_t>(i)] + p * ri + q});
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t cidx = 0; cidx < static_cast<std::ptrdiff_t>(coords.size());
         ++cidx) {
        const auto [i, p, q, col] = coords[static_cast<std::size_t>(cidx)];
        const auto& frame_i = anchor.frames[static_cast<std::size_t>(i)];
        const Eigen::VectorXd u_perp = frame_i.completion->col(p);
        const Eigen::VectorXd u_q = frame_i.basis.col(q);

        for (int j = 0; j < d; ++j) {
            if (j == i) continue;  // D_i F_i = 0
            const int nj = dims[static_cast<std::size_t>(j)];
            const int rj = ranks[static_cast<std::size_t>(j)];
            const auto& dec = decomp[static_cast<std::size_t>(j)];

            // B_{j,i,p,q} = sum_J a b^T + b a^T with a = C_ji(J) u_perp,
            // b = C_ji(J) u_q
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nj, nj);
            const int count = cache.pair_count(i, j);
            for (int c = 0; c < count; ++c) {
                const Eigen::MatrixXd cji = cache.c(j, i, c);
                const Eigen::VectorXd av = cji * u_perp;
                const Eigen::VectorXd bv = cji * u_q;
                b.noalias() += av * bv.transpose();
                b.noalias() += bv * av.transpose();
            }

            // first-order perturbation of the top-r_j eigenvectors,
            // restricted to the trailing eigenvector span
            const Eigen::MatrixXd v_top = dec.eigenvectors.leftCols(rj);
            const Eigen::MatrixXd v_rest = dec.eigenvectors.rightCols(nj - rj);
            Eigen::MatrixXd coeff = v_rest.transpose() * (b * v_top);  // (n-r) x r
            for (int k = 0; k < rj; ++k)
                for (int l = 0; l < nj - rj; ++l)
                    coeff(l, k) /= dec.eigenvalues(k) - dec.eigenvalues(rj + l);
            const Eigen::MatrixXd w_ambient = v_rest * coeff;  // n x r

            // express the perturbation in the anchor basis, split, and
            // push through the chart quotient
            const Eigen::MatrixXd w_anchor =
                anchor.frames[static_cast<std::size_t>(j)].full_basis().transpose() *
                w_ambient;
            const Eigen::MatrixXd vj = w_anchor.topRows(rj);
            const Eigen::MatrixXd uj = w_anchor.bottomRows(nj - rj);
            const Eigen::MatrixXd df_block =
                uj * dec.y0_inv - dec.x0 * dec.y0_inv * vj * dec.y0_inv;

            for (int s = 0; s < nj - rj; ++s)
                for (int tcol = 0; tcol < rj; ++tcol)
                    out.df0(offset[static_cast<std::size_t>(j)] + s * rj + tcol, col) =
                        df_block(s, tcol);
        }
    }
    return out;
}

namespace {

ChartPoint chart_from_vector(const Eigen::VectorXd& v, const std::vector<int>& dims,
                             const std::vector<int>& ranks) {
    ChartPoint x;
    int at = 0;
    for (std::size_t m = 0; m < dims.size(); ++m) {
        const int rows = dims[m] - ranks[m];
        const int cols = ranks[m];
        Eigen::MatrixXd block(rows, cols);
        for (int p = 0; p < rows; ++p)
            for (int q = 0; q < cols; ++q) block(p, q) = v(at + p * cols + q);
        at += rows * cols;
        x.blocks.push_back(std::move(block));
    }
    return x;
}

Eigen::VectorXd vector_from_chart(const ChartPoint& x) {
    Eigen::VectorXd v(x.total_dim());
    int at = 0;
    for (const auto& block : x.blocks) {
        for (int p = 0; p < block.rows(); ++p)
            for (int q = 0; q < block.cols(); ++q) v(at + p * static_cast<int>(block.cols()) + q) = block(p, q);
        at += static_cast<int>(block.size());
    }
    return v;
}

}  // namespace

TupleResult newton2(const Tensor& t, const std::vector<int>& ranks,
                    const SubspaceTuple& init, const NewtonStop& stop) {
    if (init.order() != t.order() || static_cast<int>(ranks.size()) != t.order())
        throw DimensionError("newton2: tuple order must match tensor order");
    for (int i = 0; i < t.order(); ++i) {
        const auto& f = init.frames[static_cast<std::size_t>(i)];
        if (f.n() != t.dim(i) || f.rank() != ranks[static_cast<std::size_t>(i)])
            throw DimensionError("newton2: frame shape does not match (n, r)");
    }
    const auto t0 = Clock::now();
    TupleResult out;
    out.tuple = init;
    double obj = projection_objective(t, out.tuple);
    out.trace.objectives.push_back(obj);

    for (int iter = 1; iter <= stop.max_iters; ++iter) {
        try {
            SubspaceTuple anchor = complete(out.tuple);
            const ContractionCache cache = build_contraction_cache(t, anchor);
            const auto decomp = decompose_modes(anchor, cache);
            const Newton2Derivative der = newton2_derivative(anchor, cache, decomp);
            ++out.trace.subproblems;

            const Eigen::VectorXd f0 = vector_from_chart(der.f0);
            const Eigen::MatrixXd m =
                Eigen::MatrixXd::Identity(f0.size(), f0.size()) - der.df0;
            const Eigen::VectorXd delta =
                guarded_solve(m, f0, "newton2: singular (I - DF(0))");

            const ChartPoint step = chart_from_vector(delta, anchor.dims(), anchor.ranks());
            SubspaceTuple candidate = chart_to_tuple(anchor, step);
            const double cand_obj = projection_objective(t, candidate);
            if (cand_obj < obj - 1e-6)
                throw DivergenceError("newton2: objective decreased, step rejected");

            out.tuple = std::move(candidate);
            obj = cand_obj;
            out.trace.objectives.push_back(obj);
            out.trace.displacements.push_back(step.norm());
            out.trace.iterations = iter;
            if (step.norm() < stop.change_tol) {
                out.trace.stop_reason = StopReason::change_converged;
                out.trace.seconds = elapsed_seconds(t0);
                return out;
            }
        } catch (const DegenerateSpectrumError&) {
            out.trace.stop_reason = StopReason::fallback;
            out.trace.seconds = elapsed_seconds(t0);
            return out;
        } catch (const OutOfChartError&) {
            out.trace.stop_reason = StopReason::fallback;
            out.trace.seconds = elapsed_seconds(t0);
            return out;
        } catch (const SingularJacobianError&) {
            out.trace.stop_reason = StopReason::fallback;
            out.trace.seconds = elapsed_seconds(t0);
            return out;
        } catch (const DivergenceError&) {
            out.trace.stop_reason = StopReason::fallback;
            out.trace.seconds = elapsed_seconds(t0);
            return out;
        }
    }
    out.trace.stop_reason = StopReason::max_iters;
    out.trace.seconds = elapsed_seconds(t0);
    return out;
}

TupleResult hybrid_best_r(const Tensor& t, const std::vector<int>& ranks,
                          const SubspaceTuple& init, int warm_sweeps,
                          const StopRule& alt_stop, const NewtonStop& newton_stop) {
    TupleResult warm;
    if (warm_sweeps > 0) {
        warm = amm(t, ranks, init, StopRule{warm_sweeps, -1.0});
    } else {
        warm.tuple = init;
        warm.trace.objectives.push_back(projection_objective(t, init));
    }

    TupleResult newton_part = newton2(t, ranks, warm.tuple, newton_stop);

    RunTrace merged = warm.trace;
    auto absorb = [&merged](const RunTrace& tr) {
        merged.objectives.insert(merged.objectives.end(), tr.objectives.begin(),
                                 tr.objectives.end());
        merged.iterations += tr.iterations;
        merged.subproblems += tr.subproblems;
        merged.seconds += tr.seconds;
        merged.degenerate_updates += tr.degenerate_updates;
    };
    absorb(newton_part.trace);
    merged.displacements = newton_part.trace.displacements;

    if (newton_part.trace.stop_reason == StopReason::fallback) {
        TupleResult resumed = amm(t, ranks, newton_part.tuple, alt_stop);
        absorb(resumed.trace);
        merged.used_fallback = true;
        merged.stop_reason = resumed.trace.stop_reason;
        resumed.trace = std::move(merged);
        return resumed;
    }
    merged.stop_reason = newton_part.trace.stop_reason;
    newton_part.trace = std::move(merged);
    return newton_part;
}

}  // namespace tlra
