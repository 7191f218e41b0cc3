#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tlra/error.hpp"
#include "tlra/grassmann.hpp"

namespace tlra {

// Dense d-mode tensor of doubles with shape (n_1, ..., n_d).  Entries are
// stored flat with the last index varying fastest; every unfolding and
// serialization convention in this library derives from that one layout.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);  // zero-filled
    Tensor(std::vector<int> shape, std::vector<double> data);

    int order() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    int dim(int mode) const { return shape_[static_cast<std::size_t>(mode)]; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    std::size_t flat_index(const std::vector<int>& idx) const;
    double at(const std::vector<int>& idx) const { return data_[flat_index(idx)]; }
    double& at(const std::vector<int>& idx) { return data_[flat_index(idx)]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

// Standard inner product sum_j s_j t_j.  Shapes must match.
double inner(const Tensor& s, const Tensor& t);

// Hilbert-Schmidt norm sqrt(<T,T>).
double hs_norm(const Tensor& t);

// Contraction of T with X over the given strictly increasing list of
// 0-based modes.  X must have shape (n_{m_1}, ..., n_{m_l}); the result
// lives on the remaining modes.  Contracting over all modes yields a
// 0-mode tensor holding the scalar; scalar_value() extracts it.
Tensor contract(const Tensor& t, const Tensor& x, const std::vector<int>& modes);

double scalar_value(const Tensor& t);

// Mode-l unfolding: n_l x (N / n_l) matrix whose row i collects all
// entries with mode-l index i.  Columns run over the remaining modes in
// increasing mode order, last mode fastest.
Eigen::MatrixXd unfold(const Tensor& t, int mode);

// Inverse of unfold for the given target shape.
Tensor fold(const Eigen::MatrixXd& m, int mode, const std::vector<int>& shape);

// Unfolding into two mode groups: rows over row_modes, columns over
// col_modes (both increasing, partitioning [d]), same fastest-last order.
Eigen::MatrixXd unfold_bipartite(const Tensor& t,
                                 const std::vector<int>& row_modes,
                                 const std::vector<int>& col_modes);

// Mode-l product: replaces mode l by the rows of M (M is m x n_l),
// out[..., j, ...] = sum_i M(j, i) T[..., i, ...].
Tensor mode_multiply(const Tensor& t, const Eigen::MatrixXd& m, int mode);

// T x (x_1 o ... o x_d), the full multilinear form.
double rank_one_value(const Tensor& t, const std::vector<Eigen::VectorXd>& vectors);

// scale * x_1 o x_2 o ... o x_d as a dense tensor.
Tensor rank_one_tensor(const std::vector<Eigen::VectorXd>& factors, double scale = 1.0);

// Contraction of T with the rank-one tensor of `vectors` over every mode
// except `skip`; returns the resulting length-n_skip vector.
Eigen::VectorXd contract_except(const Tensor& t,
                                const std::vector<Eigen::VectorXd>& vectors,
                                int skip);

// Core tensor of shape (r_1, ..., r_d): entries <T, o_i u_{j_i,i}>.
Tensor core_tensor(const Tensor& t, const SubspaceTuple& frames);

// Orthogonal projection of T onto the tensor product of the frame spans,
// returned as (core, projection).  ||T||^2 = ||projection||^2 +
// ||T - projection||^2 and ||core|| = ||projection||.
std::pair<Tensor, Tensor> project(const Tensor& t, const SubspaceTuple& frames);

// --- container formats -------------------------------------------------
//
// Text:   header line "TNSR d n1 ... nd", then N whitespace-separated
//         decimal floats in storage order.
// Binary: magic bytes "TNSR1", uint32 d, d uint32 dims, then N
//         little-endian 64-bit floats.
// Both readers validate the entry count against the header.

Tensor read_tensor_text(std::istream& in);
Tensor read_tensor_binary(std::istream& in);
void write_tensor_text(std::ostream& out, const Tensor& t);
void write_tensor_binary(std::ostream& out, const Tensor& t);

// Reads either container, sniffing the magic bytes.
Tensor read_tensor_file(const std::string& path);
void write_tensor_file(const std::string& path, const Tensor& t, bool binary);

}  // namespace tlra
