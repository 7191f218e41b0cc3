#include "tlra/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tlra::kernels {

namespace {
// Fixed accumulation block: partial sums depend only on the block
// boundaries, not on the number of threads.
constexpr std::size_t kBlock = 4096;
constexpr std::size_t kParallelCutoff = 8192;
}  // namespace

double dot_serial(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    if (n < kParallelCutoff) return dot_serial(a, b, n);
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
        const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        partial[static_cast<std::size_t>(blk)] = dot_serial(a + lo, b + lo, hi - lo);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

void mode_multiply_serial(const double* t, std::size_t outer, std::size_t mid,
                          std::size_t inner, const Eigen::MatrixXd& m, double* out) {
    const std::size_t rows = static_cast<std::size_t>(m.rows());
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t j = 0; j < rows; ++j) {
            double* dst = out + (o * rows + j) * inner;
            std::fill(dst, dst + inner, 0.0);
            for (std::size_t i = 0; i < mid; ++i) {
                const double c = m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
                const double* src = t + (o * mid + i) * inner;
                for (std::size_t k = 0; k < inner; ++k) dst[k] += c * src[k];
            }
        }
    }
}

void mode_multiply(const double* t, std::size_t outer, std::size_t mid,
                   std::size_t inner, const Eigen::MatrixXd& m, double* out) {
    const std::size_t rows = static_cast<std::size_t>(m.rows());
    if (outer * rows * inner < kParallelCutoff) {
        mode_multiply_serial(t, outer, mid, inner, m, out);
        return;
    }
#pragma omp parallel for collapse(2) schedule(static)
    for (std::ptrdiff_t o = 0; o < static_cast<std::ptrdiff_t>(outer); ++o) {
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(rows); ++j) {
            double* dst = out + (static_cast<std::size_t>(o) * rows + static_cast<std::size_t>(j)) * inner;
            std::fill(dst, dst + inner, 0.0);
            for (std::size_t i = 0; i < mid; ++i) {
                const double c = m(j, static_cast<Eigen::Index>(i));
                const double* src = t + (static_cast<std::size_t>(o) * mid + i) * inner;
                for (std::size_t k = 0; k < inner; ++k) dst[k] += c * src[k];
            }
        }
    }
}

void contract_serial(const double* t, const std::vector<std::size_t>& out_offsets,
                     const std::vector<std::size_t>& x_offsets,
                     const double* x_values, double* out) {
    const std::size_t nout = out_offsets.size();
    const std::size_t nx = x_offsets.size();
    for (std::size_t o = 0; o < nout; ++o) {
        const double* base = t + out_offsets[o];
        double s = 0.0;
        for (std::size_t x = 0; x < nx; ++x) s += base[x_offsets[x]] * x_values[x];
        out[o] = s;
    }
}

void contract(const double* t, const std::vector<std::size_t>& out_offsets,
              const std::vector<std::size_t>& x_offsets,
              const double* x_values, double* out) {
    const std::size_t nout = out_offsets.size();
    const std::size_t nx = x_offsets.size();
    if (nout * nx < kParallelCutoff) {
        contract_serial(t, out_offsets, x_offsets, x_values, out);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t o = 0; o < static_cast<std::ptrdiff_t>(nout); ++o) {
        const double* base = t + out_offsets[static_cast<std::size_t>(o)];
        double s = 0.0;
        for (std::size_t x = 0; x < nx; ++x) s += base[x_offsets[x]] * x_values[x];
        out[o] = s;
    }
}

}  // namespace tlra::kernels
