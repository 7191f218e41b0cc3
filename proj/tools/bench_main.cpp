// Benchmark and experiment harness for the low-rank approximation
// solvers.  Runs an (algorithm x seed) matrix on a file or generated
// tensor and emits one CSV row per run plus per-algorithm averages.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tlra/bench.hpp"
#include "tlra/generate.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int run_rank222(long samples, std::uint64_t seed) {
    const tlra::Rank222Stats stats = tlra::rank222_experiment(samples, seed);
    std::cout << "samples," << stats.samples << "\n"
              << "rank2_fraction," << stats.fraction << "\n"
              << "std_error," << stats.std_error << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank tensor approximation benchmark harness"};

    std::string input_path, generate_spec, algos, ranks_arg, seeds_arg;
    std::string out_path, trace_dir;
    int max_iters = 10;
    double fit_tol = 1e-4;
    double newton_tol = 4.53999e-5;

    app.add_option("--input", input_path, "tensor file (TNSR text or TNSR1 binary)");
    app.add_option("--generate", generate_spec,
                   "generator spec, e.g. gaussian(8x8x8,1), "
                   "lowrank(8x8x8,2x2x2,0.01,1), composite-cur(6x6x6,2,1)");
    app.add_option("--algos", algos,
                   "comma list: amm,mamm,2ammv,rank1-amm,rank1-asvd,rank1-masvd,"
                   "newton1,newton2,hybrid,svd-k,cur");
    app.add_option("--ranks", ranks_arg, "comma list of per-mode target ranks");
    app.add_option("--seeds", seeds_arg, "comma list of seeds (default 1..10)");
    app.add_option("--max-iters", max_iters, "outer iteration cap")->capture_default_str();
    app.add_option("--fit-tol", fit_tol, "relative objective-change tolerance")
        ->capture_default_str();
    app.add_option("--newton-tol", newton_tol, "Newton displacement tolerance")
        ->capture_default_str();
    app.add_option("--out", out_path, "CSV output path (default stdout)");
    app.add_option("--trace-dir", trace_dir, "directory for per-run objective traces");

    auto* rank222 = app.add_subcommand("rank222", "rank statistics of random 2x2x2 tensors");
    long samples = 10000;
    std::uint64_t r222_seed = 1;
    rank222->add_option("--samples", samples, "sample count")->capture_default_str();
    rank222->add_option("--seed", r222_seed, "RNG seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*rank222) return run_rank222(samples, r222_seed);

        tlra::BenchConfig config;
        config.input_path = input_path;
        config.generator_spec = generate_spec;
        config.algorithms = split_list(algos);
        for (const auto& r : split_list(ranks_arg)) config.ranks.push_back(std::stoi(r));
        if (!seeds_arg.empty()) {
            config.seeds.clear();
            for (const auto& s : split_list(seeds_arg))
                config.seeds.push_back(std::stoull(s));
        }
        config.alt_stop = {max_iters, fit_tol};
        config.newton_stop = {max_iters, newton_tol};
        config.out_path = out_path;
        config.trace_dir = trace_dir;

        const tlra::Tensor input = tlra::load_bench_input(config);
        const auto records = tlra::run_bench(config, input);

        if (out_path.empty()) {
            tlra::write_csv(std::cout, records);
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot write " << out_path << "\n";
                return 2;
            }
            tlra::write_csv(out, records);
        }
        for (const auto& rec : records)
            if (rec.stop_reason == "failed") return 3;
        return 0;
    } catch (const tlra::DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tlra::IoError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
