// Brute-force reference computations used only by tests.  Everything
// here enumerates indices directly and stays independent of the library
// implementation paths it checks.
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "tlra/matrix_approx.hpp"
#include "tlra/tensor.hpp"

namespace oracle {

inline tlra::Tensor random_tensor(const std::vector<int>& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    tlra::Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(rng);
    return t;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    return m;
}

// index enumeration helper: calls fn with every multi-index of `shape`
template <typename Fn>
void for_each_index(const std::vector<int>& shape, Fn&& fn) {
    std::vector<int> idx(shape.size(), 0);
    while (true) {
        fn(idx);
        int m = static_cast<int>(shape.size()) - 1;
        for (; m >= 0; --m) {
            auto um = static_cast<std::size_t>(m);
            if (++idx[um] < shape[um]) break;
            idx[um] = 0;
        }
        if (m < 0) break;
    }
}

inline double inner_loop(const tlra::Tensor& s, const tlra::Tensor& t) {
    double sum = 0.0;
    for_each_index(s.shape(), [&](const std::vector<int>& idx) {
        sum += s.at(idx) * t.at(idx);
    });
    return sum;
}

// contraction by direct summation over the dropped modes
inline tlra::Tensor contract_loop(const tlra::Tensor& t, const tlra::Tensor& x,
                                  const std::vector<int>& modes) {
    std::vector<int> keep;
    for (int m = 0; m < t.order(); ++m)
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) keep.push_back(m);
    std::vector<int> out_shape;
    for (int m : keep) out_shape.push_back(t.dim(m));
    if (out_shape.empty()) out_shape.push_back(1);
    tlra::Tensor out(out_shape);

    for_each_index(t.shape(), [&](const std::vector<int>& idx) {
        std::vector<int> xi, oi;
        for (int m : modes) xi.push_back(idx[static_cast<std::size_t>(m)]);
        for (int m : keep) oi.push_back(idx[static_cast<std::size_t>(m)]);
        if (oi.empty()) oi.push_back(0);
        out.at(oi) += t.at(idx) * x.at(xi);
    });
    return out;
}

inline double rank_one_value_loop(const tlra::Tensor& t,
                                  const std::vector<Eigen::VectorXd>& vectors) {
    double sum = 0.0;
    for_each_index(t.shape(), [&](const std::vector<int>& idx) {
        double p = t.at(idx);
        for (std::size_t m = 0; m < vectors.size(); ++m)
            p *= vectors[m](idx[m]);
        sum += p;
    });
    return sum;
}

// Gram matrix by the double loop over the other modes' frame columns.
inline Eigen::MatrixXd gram_loop(const tlra::Tensor& t,
                                 const std::vector<Eigen::MatrixXd>& bases, int mode) {
    const int d = t.order();
    const int n = t.dim(mode);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> rdims;
    for (int m = 0; m < d; ++m)
        if (m != mode) rdims.push_back(static_cast<int>(bases[static_cast<std::size_t>(m)].cols()));
    for_each_index(rdims, [&](const std::vector<int>& cols) {
        // v = T x (o_k u_{j_k,k}) by direct summation
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for_each_index(t.shape(), [&](const std::vector<int>& idx) {
            double p = t.at(idx);
            int at = 0;
            for (int m = 0; m < d; ++m) {
                if (m == mode) continue;
                p *= bases[static_cast<std::size_t>(m)](
                    idx[static_cast<std::size_t>(m)], cols[static_cast<std::size_t>(at)]);
                ++at;
            }
            v(idx[static_cast<std::size_t>(mode)]) += p;
        });
        a += v * v.transpose();
    });
    return a;
}

// all k-subsets of {0..n-1}
inline std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

// exhaustive maximal k x k pivot volume
inline double exhaustive_mu(const Eigen::MatrixXd& a, int k) {
    double mu = 0.0;
    for (const auto& rows : subsets(static_cast<int>(a.rows()), k))
        for (const auto& cols : subsets(static_cast<int>(a.cols()), k)) {
            const double d = std::abs(
                Eigen::FullPivLU<Eigen::MatrixXd>(tlra::select_block(a, rows, cols))
                    .determinant());
            if (d > mu) mu = d;
        }
    return mu;
}

// Nested two-stage skeleton composition for a 3-mode tensor: the classic
// matrix skeleton of the mode-1 unfolding, with each sampled slice
// replaced by its own skeleton.  Direct composition, no shared code with
// the factored evaluator.
inline tlra::Tensor cur3_composition(const tlra::Tensor& t, const std::vector<int>& i1,
                                     const std::vector<int>& i2,
                                     const std::vector<int>& i3) {
    const int n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    const Eigen::MatrixXd t1 = tlra::unfold(t, 0);
    std::vector<int> j;
    for (int a2 : i2)
        for (int a3 : i3) j.push_back(a2 * n3 + a3);
    const Eigen::MatrixXd pivot = tlra::select_block(t1, i1, j);
    const Eigen::MatrixXd f = pivot.inverse();

    // per-slice skeletons R(a1)
    std::vector<Eigen::MatrixXd> r_slices;
    for (int a1 : i1) {
        Eigen::MatrixXd q(n2, n3);
        for (int p = 0; p < n2; ++p)
            for (int r = 0; r < n3; ++r) q(p, r) = t.at({a1, p, r});
        const Eigen::MatrixXd qp = tlra::select_block(q, i2, i3);
        r_slices.push_back(tlra::select_cols(q, i3) * qp.inverse() *
                           tlra::select_rows(q, i2));
    }

    tlra::Tensor out({n1, n2, n3});
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b)
            for (int c = 0; c < n3; ++c) {
                double sum = 0.0;
                for (std::size_t p1 = 0; p1 < i1.size(); ++p1)
                    for (std::size_t pj = 0; pj < j.size(); ++pj)
                        sum += t1(a, j[pj]) * f(static_cast<Eigen::Index>(pj),
                                                static_cast<Eigen::Index>(p1)) *
                               r_slices[p1](b, c);
                out.at({a, b, c}) = sum;
            }
    return out;
}

}  // namespace oracle
