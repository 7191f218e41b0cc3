#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlra/tensor.hpp"

namespace tlra {

// Sampled skeleton approximation of a 3-mode tensor.  The stored blocks
// (mode-1 fibers over J = I2 x I3, per-slice column/row strips, and the
// two inverse-pivot cores) are all that entry evaluation touches.
struct Cur3Factors {
    int k = 0;
    std::vector<int> shape;                    // (n1, n2, n3)
    std::vector<int> i1, i2, i3;               // |i1| = k^2, |i2| = |i3| = k
    Eigen::MatrixXd fibers1;                   // n1 x k^2, cols over (a2,a3) lex
    std::vector<Eigen::MatrixXd> slice_cols;   // per a1: T(a1, :, I3), n2 x k
    std::vector<Eigen::MatrixXd> slice_rows;   // per a1: T(a1, I2, :), k x n3
    Eigen::MatrixXd f_core;                    // k^2 x k^2, rows (a2,a3), cols a1
    std::vector<Eigen::MatrixXd> g_core;       // per a1: k x k, rows b3, cols b2

    // Number of stored values: k^2 n1 + k^3 (n2 + n3) + 2 k^4.
    std::size_t storage_count() const;
};

// Sampled skeleton approximation of a 4-mode tensor built from the
// bipartite {1,2} x {3,4} unfolding plus per-slice skeletons.
struct Cur4Factors {
    int k = 0;
    std::vector<int> shape;                    // (n1, n2, n3, n4)
    std::vector<int> i1, i2, i3, i4;           // each of size k
    Eigen::MatrixXd fibers1;                   // n1 x k^3, cols over (b2,a3,a4) lex
    Eigen::MatrixXd fibers2;                   // n2 x k^3, cols over (b1,a3,a4) lex
    Eigen::MatrixXd fibers3;                   // n3 x k^3, cols over (a1,a2,b4) lex
    Eigen::MatrixXd fibers4;                   // n4 x k^3, cols over (a1,a2,b3) lex
    Eigen::MatrixXd h_core;                    // k^2 x k^2, rows (a3,a4), cols (a1,a2)
    std::vector<Eigen::MatrixXd> f_core;       // per (a3,a4): k x k, rows b2, cols b1
    std::vector<Eigen::MatrixXd> g_core;       // per (a1,a2): k x k, rows b4, cols b3

    // Number of stored values: k^3 (n1 + n2 + n3 + n4 + 3k).
    std::size_t storage_count() const;
};

// Build factors by inverting the sampled pivot blocks.  Every pivot must
// be well conditioned (condition <= 1e12); a failing block raises
// SingularPivotError naming it, unless allow_pseudo_inverse substitutes
// the Moore-Penrose inverse.
Cur3Factors cur3_build(const Tensor& t, const std::vector<int>& i1,
                       const std::vector<int>& i2, const std::vector<int>& i3,
                       int k, bool allow_pseudo_inverse = false);

// Quintuple-product entry sum over (a1, a2, a3, b2, b3).
double cur3_entry(const Cur3Factors& f, int j1, int j2, int j3);

// All entries as a dense tensor; evaluation is parallel over entries.
Tensor cur3_dense(const Cur3Factors& f);

Cur4Factors cur4_build(const Tensor& t, const std::vector<int>& i1,
                       const std::vector<int>& i2, const std::vector<int>& i3,
                       const std::vector<int>& i4, int k,
                       bool allow_pseudo_inverse = false);

// Seven-factor entry sum over (a1..a4, b1..b4).
double cur4_entry(const Cur4Factors& f, int j1, int j2, int j3, int j4);

Tensor cur4_dense(const Cur4Factors& f);

// Container: one manifest line listing k, shape and index sets, then the
// stored blocks concatenated in the binary tensor format.
void save_cur3(std::ostream& out, const Cur3Factors& f);
Cur3Factors load_cur3(std::istream& in);
void save_cur4(std::ostream& out, const Cur4Factors& f);
Cur4Factors load_cur4(std::istream& in);

}  // namespace tlra
