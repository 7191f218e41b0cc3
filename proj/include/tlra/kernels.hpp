#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace tlra::kernels {

// Data-parallel inner loops with serial reference implementations.  The
// parallel variants partition work so every output value is accumulated
// in a fixed serial order, which keeps results identical across thread
// counts and run-to-run.

double dot_serial(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// Mode product on the flattened (outer, mid, inner) view of a tensor:
// out[(o*m + j)*inner + c] = sum_i M(j,i) * t[(o*mid + i)*inner + c].
void mode_multiply_serial(const double* t, std::size_t outer, std::size_t mid,
                          std::size_t inner, const Eigen::MatrixXd& m, double* out);
void mode_multiply(const double* t, std::size_t outer, std::size_t mid,
                   std::size_t inner, const Eigen::MatrixXd& m, double* out);

// Generic contraction given precomputed flat offsets:
// out[o] = sum_x t[out_offsets[o] + x_offsets[x]] * x_values[x].
void contract_serial(const double* t, const std::vector<std::size_t>& out_offsets,
                     const std::vector<std::size_t>& x_offsets,
                     const double* x_values, double* out);
void contract(const double* t, const std::vector<std::size_t>& out_offsets,
              const std::vector<std::size_t>& x_offsets,
              const double* x_values, double* out);

}  // namespace tlra::kernels
