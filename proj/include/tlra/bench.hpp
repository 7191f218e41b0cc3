#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlra/amm.hpp"
#include "tlra/newton.hpp"
#include "tlra/tensor.hpp"

namespace tlra {

struct BenchConfig {
    std::string input_path;      // exactly one of input_path /
    std::string generator_spec;  // generator_spec must be set
    std::vector<std::string> algorithms;
    std::vector<int> ranks;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    StopRule alt_stop;
    NewtonStop newton_stop;
    std::string out_path;
    std::string trace_dir;  // per-run objective traces when non-empty
};

struct BenchRecord {
    std::string algorithm;
    std::string seed;  // decimal seed, or "avg" for the per-algorithm mean
    int iterations = 0;
    double seconds = 0.0;
    double hs_norm = 0.0;   // Hilbert-Schmidt norm of the approximation
    double residual = 0.0;  // ||T - approximation||
    std::string stop_reason;
};

// Known algorithm names: amm, mamm, 2ammv, rank1-amm, rank1-asvd,
// rank1-masvd, newton1, newton2, hybrid, svd-k, cur.
bool algorithm_known(const std::string& name);

// Runs every (algorithm, seed) cell, appends one average row per
// algorithm, and returns the records in deterministic order.  A cell
// whose solver fails entirely is recorded with stop_reason "failed".
std::vector<BenchRecord> run_bench(const BenchConfig& config, const Tensor& input);

// Loads or generates the input named by the config.
Tensor load_bench_input(const BenchConfig& config);

// UTF-8, header row, '.' decimal separator; timing column at millisecond
// resolution.
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

// --- small-core rank statistics ----------------------------------------

// Discriminant of the slice pencil det(T(0,:,:) + x T(1,:,:)),
// normalized to unit Hilbert-Schmidt scale: positive for rank 2,
// negative for rank 3, zero on the degenerate variety.
double rank222_discriminant(const Tensor& t);

// Rank of a nonzero 2x2x2 tensor (1, 2, or 3), decided by the sign of
// the slice-pencil discriminant; near-zero discriminants fall back to a
// rank-one test on the unfoldings.
int classify_rank222(const Tensor& t);

struct Rank222Stats {
    double fraction = 0.0;   // share of rank <= 2 draws
    double std_error = 0.0;  // sqrt(p(1-p)/samples)
    long samples = 0;
};

// Draws iid standard normal 2x2x2 tensors and classifies each; draws
// with vanishing discriminant are resampled.
Rank222Stats rank222_experiment(long samples, std::uint64_t seed);

struct Best222Result {
    Tensor core;  // 2x2x2
    int core_rank = 0;
};

// Core of the best (2,2,2)-approximation (hybrid solver) and its rank.
Best222Result best222_core_rank(const Tensor& t, const StopRule& alt_stop,
                                const NewtonStop& newton_stop);

}  // namespace tlra
