#include "tlra/bench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <set>

#include "tlra/generate.hpp"
#include "tlra/matrix_approx.hpp"
#include "tlra/tensor_cur.hpp"

namespace tlra {

namespace {

const std::set<std::string> kAlgorithms = {
    "amm",     "mamm",    "2ammv",  "rank1-amm", "rank1-asvd", "rank1-masvd",
    "newton1", "newton2", "hybrid", "svd-k",     "cur"};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_seconds(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double residual_from_objective(double t_norm_sq, double objective) {
    return std::sqrt(std::max(0.0, t_norm_sq - objective));
}

struct CellResult {
    int iterations = 0;
    double seconds = 0.0;
    double hs_norm = 0.0;
    double residual = 0.0;
    std::string stop_reason;
    std::vector<double> objectives;
};

// One (algorithm, seed) cell.  Tuple solvers start from seeded random
// frames; Newton runs are warm-started by one alternating sweep.
CellResult run_cell(const std::string& algo, const Tensor& t,
                    const BenchConfig& config, std::uint64_t seed) {
    CellResult cell;
    const double t_norm_sq = inner(t, t);
    const auto& ranks = config.ranks;
    const bool rank_one_ok = t.order() >= 3;

    auto from_tuple = [&](const TupleResult& res) {
        const double obj = res.trace.objectives.empty()
                               ? projection_objective(t, res.tuple)
                               : res.trace.objectives.back();
        cell.iterations = res.trace.iterations;
        cell.seconds = res.trace.seconds;
        cell.hs_norm = std::sqrt(std::max(0.0, obj));
        cell.residual = residual_from_objective(t_norm_sq, obj);
        cell.stop_reason = to_string(res.trace.stop_reason);
        cell.objectives = res.trace.objectives;
    };
    auto from_rank_one = [&](const RankOneResult& res) {
        cell.iterations = res.trace.iterations;
        cell.seconds = res.trace.seconds;
        cell.hs_norm = std::abs(res.lambda);
        cell.residual = residual_from_objective(t_norm_sq, res.lambda * res.lambda);
        cell.stop_reason = to_string(res.trace.stop_reason);
        cell.objectives = res.trace.objectives;
    };
    auto from_matrix = [&](const Eigen::MatrixXd& approx, const Eigen::MatrixXd& a,
                           double seconds, int iterations) {
        cell.iterations = iterations;
        cell.seconds = seconds;
        cell.hs_norm = approx.norm();
        cell.residual = (a - approx).norm();
        cell.stop_reason = "done";
    };

    if (algo == "amm" || algo == "mamm" || algo == "2ammv" || algo == "newton2" ||
        algo == "hybrid") {
        if (static_cast<int>(ranks.size()) != t.order())
            throw DimensionError("bench: ranks do not match input order");
        const SubspaceTuple init = random_init(t.shape(), ranks, seed);
        if (algo == "amm") {
            from_tuple(amm(t, ranks, init, config.alt_stop));
        } else if (algo == "mamm") {
            from_tuple(mamm(t, ranks, init, config.alt_stop));
        } else if (algo == "2ammv") {
            from_tuple(two_ammv(t, ranks, init, config.alt_stop, config.alt_stop));
        } else if (algo == "newton2") {
            from_tuple(hybrid_best_r(t, ranks, init, 1, config.alt_stop,
                                     config.newton_stop));
        } else {
            from_tuple(hybrid_best_r(t, ranks, init, 2, config.alt_stop,
                                     config.newton_stop));
        }
        return cell;
    }

    if (algo == "rank1-amm" || algo == "rank1-asvd" || algo == "rank1-masvd" ||
        algo == "newton1") {
        if (!rank_one_ok && algo != "rank1-amm")
            throw DimensionError("bench: " + algo + " needs a tensor with d >= 3");
        const auto init = random_unit_vectors(t.shape(), seed);
        if (algo == "rank1-amm") {
            from_rank_one(rank_one_amm(t, init, config.alt_stop));
        } else if (algo == "rank1-asvd") {
            from_rank_one(rank_one_2amm(t, init, config.alt_stop));
        } else if (algo == "rank1-masvd") {
            from_rank_one(rank_one_m2amm(t, init, config.alt_stop));
        } else {
            from_rank_one(
                hybrid_rank_one(t, init, 1, config.alt_stop, config.newton_stop));
        }
        return cell;
    }

    if (algo == "svd-k") {
        if (t.order() != 2) throw DimensionError("bench: svd-k needs a matrix input");
        if (ranks.empty()) throw DimensionError("bench: svd-k needs --ranks");
        const Eigen::MatrixXd a = unfold(t, 0);
        const auto start = std::chrono::steady_clock::now();
        const RankKApprox res = svd_rank_k(a, ranks[0]);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        from_matrix(res.approx, a, secs, 1);
        return cell;
    }

    if (algo == "cur") {
        if (ranks.empty()) throw DimensionError("bench: cur needs --ranks");
        const int k = ranks[0];
        const auto start = std::chrono::steady_clock::now();
        if (t.order() == 2) {
            const Eigen::MatrixXd a = unfold(t, 0);
            const auto pivot = pivot_search(a, k, 200, PivotObjective::sigma_product, seed);
            const auto f = cur_classic(a, pivot.rows, pivot.cols, true);
            const double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            from_matrix(f.approx(), a, secs, 1);
        } else if (t.order() == 3) {
            const auto p1 = pivot_search(unfold(t, 0), std::min(k * k, t.dim(0)), 200,
                                         PivotObjective::sigma_product, seed);
            const auto p2 = pivot_search(unfold(t, 1), k, 200,
                                         PivotObjective::sigma_product, seed + 1);
            const auto p3 = pivot_search(unfold(t, 2), k, 200,
                                         PivotObjective::sigma_product, seed + 2);
            const auto f = cur3_build(t, p1.rows, p2.rows, p3.rows, k, true);
            const Tensor b = cur3_dense(f);
            cell.seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            cell.iterations = 1;
            cell.hs_norm = hs_norm(b);
            Tensor diff = t;
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= b[i];
            cell.residual = hs_norm(diff);
            cell.stop_reason = "done";
        } else if (t.order() == 4) {
            const auto p1 = pivot_search(unfold(t, 0), k, 200,
                                         PivotObjective::sigma_product, seed);
            const auto p2 = pivot_search(unfold(t, 1), k, 200,
                                         PivotObjective::sigma_product, seed + 1);
            const auto p3 = pivot_search(unfold(t, 2), k, 200,
                                         PivotObjective::sigma_product, seed + 2);
            const auto p4 = pivot_search(unfold(t, 3), k, 200,
                                         PivotObjective::sigma_product, seed + 3);
            const auto f = cur4_build(t, p1.rows, p2.rows, p3.rows, p4.rows, k, true);
            const Tensor b = cur4_dense(f);
            cell.seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            cell.iterations = 1;
            cell.hs_norm = hs_norm(b);
            Tensor diff = t;
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= b[i];
            cell.residual = hs_norm(diff);
            cell.stop_reason = "done";
        } else {
            throw DimensionError("bench: cur supports 2- to 4-mode inputs");
        }
        return cell;
    }

    throw DimensionError("bench: unknown algorithm '" + algo + "'");
}

}  // namespace

bool algorithm_known(const std::string& name) { return kAlgorithms.count(name) > 0; }

Tensor load_bench_input(const BenchConfig& config) {
    const bool has_input = !config.input_path.empty();
    const bool has_gen = !config.generator_spec.empty();
    if (has_input == has_gen)
        throw DimensionError("bench: exactly one of --input / --generate required");
    return has_input ? read_tensor_file(config.input_path)
                     : generate(config.generator_spec);
}

std::vector<BenchRecord> run_bench(const BenchConfig& config, const Tensor& input) {
    if (config.algorithms.empty())
        throw DimensionError("bench: at least one algorithm required");
    for (const auto& algo : config.algorithms)
        if (!algorithm_known(algo))
            throw DimensionError("bench: unknown algorithm '" + algo + "'");
    if (config.seeds.empty()) throw DimensionError("bench: at least one seed required");

    std::vector<BenchRecord> records;
    for (const auto& algo : config.algorithms) {
        double sum_iters = 0.0, sum_secs = 0.0, sum_norm = 0.0, sum_res = 0.0;
        int completed = 0;
        for (const auto seed : config.seeds) {
            BenchRecord rec;
            rec.algorithm = algo;
            rec.seed = std::to_string(seed);
            try {
                const CellResult cell = run_cell(algo, input, config, seed);
                rec.iterations = cell.iterations;
                rec.seconds = cell.seconds;
                rec.hs_norm = cell.hs_norm;
                rec.residual = cell.residual;
                rec.stop_reason = cell.stop_reason;
                sum_iters += cell.iterations;
                sum_secs += cell.seconds;
                sum_norm += cell.hs_norm;
                sum_res += cell.residual;
                ++completed;
                if (!config.trace_dir.empty() && !cell.objectives.empty()) {
                    std::filesystem::create_directories(config.trace_dir);
                    std::ofstream trace(config.trace_dir + "/" + algo + "_seed" +
                                        std::to_string(seed) + ".trace");
                    for (double v : cell.objectives)
                        trace << format_double(v) << '\n';
                }
            } catch (const DimensionError&) {
                throw;  // configuration problem, not a solver failure
            } catch (const Error&) {
                rec.stop_reason = "failed";
            }
            records.push_back(std::move(rec));
        }
        if (completed > 0) {
            BenchRecord avg;
            avg.algorithm = algo;
            avg.seed = "avg";
            avg.iterations =
                static_cast<int>(std::lround(sum_iters / completed));
            avg.seconds = sum_secs / completed;
            avg.hs_norm = sum_norm / completed;
            avg.residual = sum_res / completed;
            avg.stop_reason = "-";
            records.push_back(std::move(avg));
        }
    }
    return records;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "algorithm,seed,iters,seconds,hs_norm,residual,stop_reason\n";
    for (const auto& r : records)
        out << r.algorithm << ',' << r.seed << ',' << r.iterations << ','
            << format_seconds(r.seconds) << ',' << format_double(r.hs_norm) << ','
            << format_double(r.residual) << ',' << r.stop_reason << '\n';
}

double rank222_discriminant(const Tensor& t) {
    if (t.order() != 3 || t.dim(0) != 2 || t.dim(1) != 2 || t.dim(2) != 2)
        throw DimensionError("rank222_discriminant: tensor must be 2x2x2");
    const double scale = hs_norm(t);
    if (scale == 0.0) return 0.0;

    // slice pencil T(0,:,:) + x T(1,:,:): the discriminant of its
    // determinant separates two real generalized eigenvalues (rank 2)
    // from a complex pair (rank 3)
    auto e = [&](int i, int j, int k) { return t.at({i, j, k}) / scale; };
    const double det0 = e(0, 0, 0) * e(0, 1, 1) - e(0, 0, 1) * e(0, 1, 0);
    const double det1 = e(1, 0, 0) * e(1, 1, 1) - e(1, 0, 1) * e(1, 1, 0);
    const double det01 = (e(0, 0, 0) + e(1, 0, 0)) * (e(0, 1, 1) + e(1, 1, 1)) -
                         (e(0, 0, 1) + e(1, 0, 1)) * (e(0, 1, 0) + e(1, 1, 0));
    const double mixed = det01 - det0 - det1;
    return mixed * mixed - 4.0 * det0 * det1;
}

int classify_rank222(const Tensor& t) {
    const double discriminant = rank222_discriminant(t);
    if (hs_norm(t) == 0.0) return 1;
    if (discriminant > 1e-12) return 2;
    if (discriminant < -1e-12) return 3;
    // degenerate pencil: decide rank one by the unfolding spectra
    for (int mode = 0; mode < 3; ++mode) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(unfold(t, mode));
        const auto& sv = svd.singularValues();
        if (sv(1) > 1e-8 * sv(0)) return 2;
    }
    return 1;
}

Rank222Stats rank222_experiment(long samples, std::uint64_t seed) {
    if (samples < 100)
        throw DimensionError("rank222_experiment: need at least 100 samples");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    long rank2 = 0;
    for (long s = 0; s < samples; ++s) {
        double disc = 0.0;
        do {
            Tensor t({2, 2, 2});
            for (std::size_t i = 0; i < 8; ++i) t[i] = gauss(rng);
            disc = rank222_discriminant(t);
            // vanishing discriminant: measure-zero draw, resample
        } while (std::abs(disc) <= 1e-12);
        if (disc > 0.0) ++rank2;
    }
    Rank222Stats stats;
    stats.samples = samples;
    stats.fraction = static_cast<double>(rank2) / static_cast<double>(samples);
    stats.std_error =
        std::sqrt(stats.fraction * (1.0 - stats.fraction) / static_cast<double>(samples));
    return stats;
}

Best222Result best222_core_rank(const Tensor& t, const StopRule& alt_stop,
                                const NewtonStop& newton_stop) {
    if (t.order() != 3) throw DimensionError("best222_core_rank: tensor must be 3-mode");
    for (int m = 0; m < 3; ++m)
        if (t.dim(m) < 2)
            throw DimensionError("best222_core_rank: every extent must be >= 2");
    const std::vector<int> ranks{2, 2, 2};
    const TupleResult res =
        hybrid_best_r(t, ranks, hosvd_init(t, ranks), 1, alt_stop, newton_stop);
    Best222Result out;
    out.core = core_tensor(t, res.tuple);
    out.core_rank = classify_rank222(out.core);
    return out;
}

}  // namespace tlra
