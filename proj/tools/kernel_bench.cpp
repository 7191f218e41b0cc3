// Timing comparison of the OpenMP kernels against their serial
// reference implementations on synthetic workloads.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tlra/kernels.hpp"
#include "tlra/newton.hpp"
#include "tlra/tensor.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_of(int repeats, const std::function<void()>& fn) {
    // one warm-up, then best of `repeats`
    fn();
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        fn();
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        if (dt < best) best = dt;
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %10.4f ms   parallel %10.4f ms   speedup %5.2fx\n",
                name, serial * 1e3, parallel * 1e3,
                parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // dot product
    {
        const std::size_t n = 1 << 22;
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = gauss(rng);
        for (auto& v : b) v = gauss(rng);
        volatile double sink = 0.0;
        const double ts = time_of(5, [&] { sink = tlra::kernels::dot_serial(a.data(), b.data(), n); });
        const double tp = time_of(5, [&] { sink = tlra::kernels::dot(a.data(), b.data(), n); });
        (void)sink;
        report("dot (4M)", ts, tp);
    }

    // mode product on a 96x96x96 tensor, mode 1, rank 24
    {
        const int n = 96, r = 24;
        tlra::Tensor t({n, n, n});
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(rng);
        Eigen::MatrixXd m(r, n);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
        std::vector<double> out(static_cast<std::size_t>(n) * r * n);
        const auto outer = static_cast<std::size_t>(n);
        const auto inner = static_cast<std::size_t>(n);
        const double ts = time_of(5, [&] {
            tlra::kernels::mode_multiply_serial(t.data(), outer, n, inner, m, out.data());
        });
        const double tp = time_of(5, [&] {
            tlra::kernels::mode_multiply(t.data(), outer, n, inner, m, out.data());
        });
        report("mode product (96^3)", ts, tp);
    }

    // full contraction table of a 64x64x64 tensor against a 64x64 operand
    {
        const int n = 64;
        tlra::Tensor t({n, n, n});
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(rng);
        tlra::Tensor x({n, n});
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = gauss(rng);
        std::vector<std::size_t> out_off(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            out_off[static_cast<std::size_t>(i)] =
                static_cast<std::size_t>(i) * n * n;
        std::vector<std::size_t> x_off(static_cast<std::size_t>(n) * n);
        for (std::size_t i = 0; i < x_off.size(); ++i) x_off[i] = i;
        std::vector<double> out(static_cast<std::size_t>(n));
        const double ts = time_of(20, [&] {
            tlra::kernels::contract_serial(t.data(), out_off, x_off, x.data(), out.data());
        });
        const double tp = time_of(20, [&] {
            tlra::kernels::contract(t.data(), out_off, x_off, x.data(), out.data());
        });
        report("contract (64^3 x 64^2)", ts, tp);
    }

    // Newton-2 derivative assembly (parallel over chart columns)
    {
        const int n = 14;
        const std::vector<int> ranks{3, 3, 3};
        std::mt19937_64 lrng(11);
        tlra::Tensor t({n, n, n});
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(lrng);
        auto tuple = tlra::complete(tlra::hosvd_init(t, ranks));
        const auto cache = tlra::build_contraction_cache(t, tuple);
        const auto decomp = tlra::decompose_modes(tuple, cache);
        const double tp = time_of(3, [&] {
            (void)tlra::newton2_derivative(tuple, cache, decomp);
        });
        std::printf("%-22s parallel %10.4f ms (columns fan out across threads)\n",
                    "newton2 DF(0) (14^3)", tp * 1e3);
    }
    return 0;
}
