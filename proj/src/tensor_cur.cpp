#include "tlra/tensor_cur.hpp"

#include <Eigen/Dense>
#include <istream>
#include <ostream>
#include <sstream>

#include "tlra/matrix_approx.hpp"

namespace tlra {

namespace {

constexpr double kMaxPivotCondition = 1e12;

// Inverse of a sampled pivot block, guarded by a condition estimate.
Eigen::MatrixXd invert_pivot(const Eigen::MatrixXd& block, const std::string& name,
                             bool allow_pseudo_inverse) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    if (smin <= 0.0 || smax / smin > kMaxPivotCondition) {
        if (!allow_pseudo_inverse)
            throw SingularPivotError("singular pivot block " + name);
        return pinv(block);
    }
    return block.inverse();
}

Tensor tensor_from_matrix(const Eigen::MatrixXd& m) {
    Tensor t({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            t[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return t;
}

Eigen::MatrixXd matrix_from_tensor(const Tensor& t) {
    if (t.order() != 2) throw DimensionError("expected a 2-mode block");
    Eigen::MatrixXd m(t.dim(0), t.dim(1));
    for (int i = 0; i < t.dim(0); ++i)
        for (int j = 0; j < t.dim(1); ++j)
            m(i, j) = t[static_cast<std::size_t>(i * t.dim(1) + j)];
    return m;
}

void write_index_set(std::ostream& out, const std::vector<int>& set) {
    out << ' ' << set.size();
    for (int v : set) out << ' ' << v;
}

std::vector<int> read_index_set(std::istream& in) {
    std::size_t n = 0;
    if (!(in >> n)) throw IoError("cur container: bad manifest");
    std::vector<int> set(n);
    for (int& v : set)
        if (!(in >> v)) throw IoError("cur container: bad manifest");
    return set;
}

}  // namespace

std::size_t Cur3Factors::storage_count() const {
    std::size_t s = static_cast<std::size_t>(fibers1.size());
    for (const auto& m : slice_cols) s += static_cast<std::size_t>(m.size());
    for (const auto& m : slice_rows) s += static_cast<std::size_t>(m.size());
    s += static_cast<std::size_t>(f_core.size());
    for (const auto& m : g_core) s += static_cast<std::size_t>(m.size());
    return s;
}

Cur3Factors cur3_build(const Tensor& t, const std::vector<int>& i1,
                       const std::vector<int>& i2, const std::vector<int>& i3,
                       int k, bool allow_pseudo_inverse) {
    if (t.order() != 3) throw DimensionError("cur3_build: tensor must be 3-mode");
    if (k < 1) throw DimensionError("cur3_build: k must be positive");
    check_index_set(i1, t.dim(0), "cur3_build I1");
    check_index_set(i2, t.dim(1), "cur3_build I2");
    check_index_set(i3, t.dim(2), "cur3_build I3");
    if (static_cast<int>(i1.size()) != k * k)
        throw DimensionError("cur3_build: |I1| must be k^2");
    if (static_cast<int>(i2.size()) != k || static_cast<int>(i3.size()) != k)
        throw DimensionError("cur3_build: |I2| and |I3| must be k");

    Cur3Factors f;
    f.k = k;
    f.shape = t.shape();
    f.i1 = i1;
    f.i2 = i2;
    f.i3 = i3;

    // Columns of the mode-1 unfolding indexed by J = I2 x I3 (lex order).
    const Eigen::MatrixXd t1 = unfold(t, 0);
    std::vector<int> j_cols;
    j_cols.reserve(i2.size() * i3.size());
    for (int a2 : i2)
        for (int a3 : i3) j_cols.push_back(a2 * t.dim(2) + a3);

    f.fibers1 = select_cols(t1, j_cols);
    f.f_core = invert_pivot(select_block(t1, i1, j_cols), "T1(T)[I1,J]",
                            allow_pseudo_inverse);

    f.slice_cols.reserve(i1.size());
    f.slice_rows.reserve(i1.size());
    f.g_core.reserve(i1.size());
    for (int a1 : i1) {
        // slice Q(a1) = T(a1, :, :)
        Eigen::MatrixXd q(t.dim(1), t.dim(2));
        for (int p = 0; p < t.dim(1); ++p)
            for (int r = 0; r < t.dim(2); ++r) q(p, r) = t.at({a1, p, r});
        f.slice_cols.push_back(select_cols(q, i3));
        f.slice_rows.push_back(select_rows(q, i2));
        f.g_core.push_back(invert_pivot(select_block(q, i2, i3),
                                        "Q(" + std::to_string(a1) + ")[I2,I3]",
                                        allow_pseudo_inverse));
    }
    return f;
}

double cur3_entry(const Cur3Factors& f, int j1, int j2, int j3) {
    if (j1 < 0 || j1 >= f.shape[0] || j2 < 0 || j2 >= f.shape[1] || j3 < 0 ||
        j3 >= f.shape[2])
        throw DimensionError("cur3_entry: index out of range");
    const int k = f.k;
    const int kk = k * k;
    double total = 0.0;
    for (int a1 = 0; a1 < kk; ++a1) {
        // sum over (a2, a3) of T(j1, a2, a3) F(a1, a2, a3)
        double left = 0.0;
        for (int a23 = 0; a23 < kk; ++a23)
            left += f.fibers1(j1, a23) * f.f_core(a23, a1);
        // sum over (b2, b3) of T(a1, j2, b3) G(a1, b2, b3) T(a1, b2, j3)
        double mid = 0.0;
        for (int b2 = 0; b2 < k; ++b2)
            for (int b3 = 0; b3 < k; ++b3)
                mid += f.slice_cols[static_cast<std::size_t>(a1)](j2, b3) *
                       f.g_core[static_cast<std::size_t>(a1)](b3, b2) *
                       f.slice_rows[static_cast<std::size_t>(a1)](b2, j3);
        total += left * mid;
    }
    return total;
}

Tensor cur3_dense(const Cur3Factors& f) {
    Tensor out(f.shape);
    const int n1 = f.shape[0], n2 = f.shape[1], n3 = f.shape[2];
#pragma omp parallel for collapse(2) schedule(static)
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b)
            for (int c = 0; c < n3; ++c)
                out[static_cast<std::size_t>((a * n2 + b) * n3 + c)] =
                    cur3_entry(f, a, b, c);
    return out;
}

std::size_t Cur4Factors::storage_count() const {
    std::size_t s = static_cast<std::size_t>(fibers1.size() + fibers2.size() +
                                             fibers3.size() + fibers4.size() +
                                             h_core.size());
    for (const auto& m : f_core) s += static_cast<std::size_t>(m.size());
    for (const auto& m : g_core) s += static_cast<std::size_t>(m.size());
    return s;
}

Cur4Factors cur4_build(const Tensor& t, const std::vector<int>& i1,
                       const std::vector<int>& i2, const std::vector<int>& i3,
                       const std::vector<int>& i4, int k,
                       bool allow_pseudo_inverse) {
    if (t.order() != 4) throw DimensionError("cur4_build: tensor must be 4-mode");
    if (k < 1) throw DimensionError("cur4_build: k must be positive");
    const std::vector<const std::vector<int>*> sets{&i1, &i2, &i3, &i4};
    for (int m = 0; m < 4; ++m) {
        check_index_set(*sets[static_cast<std::size_t>(m)], t.dim(m), "cur4_build");
        if (static_cast<int>(sets[static_cast<std::size_t>(m)]->size()) != k)
            throw DimensionError("cur4_build: every index set must have size k");
    }

    Cur4Factors f;
    f.k = k;
    f.shape = t.shape();
    f.i1 = i1;
    f.i2 = i2;
    f.i3 = i3;
    f.i4 = i4;

    const int n2 = t.dim(1), n3 = t.dim(2), n4 = t.dim(3);

    // Bipartite unfolding X with rows (i1,i2) and columns (i3,i4).
    const Eigen::MatrixXd x = unfold_bipartite(t, {0, 1}, {2, 3});
    std::vector<int> rows_j1, cols_j2;
    for (int a1 : i1)
        for (int a2 : i2) rows_j1.push_back(a1 * n2 + a2);
    for (int a3 : i3)
        for (int a4 : i4) cols_j2.push_back(a3 * n4 + a4);
    f.h_core = invert_pivot(select_block(x, rows_j1, cols_j2), "X[J1,J2]",
                            allow_pseudo_inverse);

    // Mode fibers restricted to the sampled complements.
    auto fiber_block = [&t](int mode, const std::vector<int>& s1,
                            const std::vector<int>& s2, const std::vector<int>& s3) {
        Eigen::MatrixXd block(t.dim(mode),
                              static_cast<Eigen::Index>(s1.size() * s2.size() * s3.size()));
        Eigen::Index col = 0;
        for (int a : s1)
            for (int b : s2)
                for (int c : s3) {
                    for (int i = 0; i < t.dim(mode); ++i) {
                        std::vector<int> idx;
                        switch (mode) {
                            case 0: idx = {i, a, b, c}; break;
                            case 1: idx = {a, i, b, c}; break;
                            case 2: idx = {a, b, i, c}; break;
                            default: idx = {a, b, c, i}; break;
                        }
                        block(i, col) = t.at(idx);
                    }
                    ++col;
                }
        return block;
    };
    f.fibers1 = fiber_block(0, i2, i3, i4);
    f.fibers2 = fiber_block(1, i1, i3, i4);
    f.fibers3 = fiber_block(2, i1, i2, i4);
    f.fibers4 = fiber_block(3, i1, i2, i3);

    // Per-column slices Y(a3,a4) = T(:,:,a3,a4) and per-row slices
    // Z(a1,a2) = T(a1,a2,:,:).
    for (int a3 : i3)
        for (int a4 : i4) {
            Eigen::MatrixXd y(t.dim(0), t.dim(1));
            for (int p = 0; p < t.dim(0); ++p)
                for (int q = 0; q < t.dim(1); ++q) y(p, q) = t.at({p, q, a3, a4});
            f.f_core.push_back(invert_pivot(
                select_block(y, i1, i2),
                "Y(" + std::to_string(a3) + "," + std::to_string(a4) + ")[I1,I2]",
                allow_pseudo_inverse));
        }
    for (int a1 : i1)
        for (int a2 : i2) {
            Eigen::MatrixXd z(n3, n4);
            for (int p = 0; p < n3; ++p)
                for (int q = 0; q < n4; ++q) z(p, q) = t.at({a1, a2, p, q});
            f.g_core.push_back(invert_pivot(
                select_block(z, i3, i4),
                "Z(" + std::to_string(a1) + "," + std::to_string(a2) + ")[I3,I4]",
                allow_pseudo_inverse));
        }
    return f;
}

double cur4_entry(const Cur4Factors& f, int j1, int j2, int j3, int j4) {
    if (j1 < 0 || j1 >= f.shape[0] || j2 < 0 || j2 >= f.shape[1] || j3 < 0 ||
        j3 >= f.shape[2] || j4 < 0 || j4 >= f.shape[3])
        throw DimensionError("cur4_entry: index out of range");
    const int k = f.k;
    auto idx3 = [k](int a, int b, int c) { return (a * k + b) * k + c; };
    auto idx2 = [k](int a, int b) { return a * k + b; };

    double total = 0.0;
    for (int a1 = 0; a1 < k; ++a1)
        for (int a2 = 0; a2 < k; ++a2)
            for (int a3 = 0; a3 < k; ++a3)
                for (int a4 = 0; a4 < k; ++a4) {
                    const double h = f.h_core(idx2(a3, a4), idx2(a1, a2));
                    // sum over (b1, b2) of T(j1,b2,a3,a4) F(b1,b2,a3,a4) T(b1,j2,a3,a4)
                    double left = 0.0;
                    for (int b1 = 0; b1 < k; ++b1)
                        for (int b2 = 0; b2 < k; ++b2)
                            left += f.fibers1(j1, idx3(b2, a3, a4)) *
                                    f.f_core[static_cast<std::size_t>(idx2(a3, a4))](b2, b1) *
                                    f.fibers2(j2, idx3(b1, a3, a4));
                    // sum over (b3, b4) of T(a1,a2,j3,b4) G(a1,a2,b3,b4) T(a1,a2,b3,j4)
                    double right = 0.0;
                    for (int b3 = 0; b3 < k; ++b3)
                        for (int b4 = 0; b4 < k; ++b4)
                            right += f.fibers3(j3, idx3(a1, a2, b4)) *
                                     f.g_core[static_cast<std::size_t>(idx2(a1, a2))](b4, b3) *
                                     f.fibers4(j4, idx3(a1, a2, b3));
                    total += left * h * right;
                }
    return total;
}

Tensor cur4_dense(const Cur4Factors& f) {
    Tensor out(f.shape);
    const int n1 = f.shape[0], n2 = f.shape[1], n3 = f.shape[2], n4 = f.shape[3];
#pragma omp parallel for collapse(2) schedule(static)
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b)
            for (int c = 0; c < n3; ++c)
                for (int d = 0; d < n4; ++d)
                    out[static_cast<std::size_t>(((a * n2 + b) * n3 + c) * n4 + d)] =
                        cur4_entry(f, a, b, c, d);
    return out;
}

void save_cur3(std::ostream& out, const Cur3Factors& f) {
    out << "CUR3 " << f.k << ' ' << f.shape[0] << ' ' << f.shape[1] << ' '
        << f.shape[2];
    write_index_set(out, f.i1);
    write_index_set(out, f.i2);
    write_index_set(out, f.i3);
    out << '\n';
    write_tensor_binary(out, tensor_from_matrix(f.fibers1));
    for (const auto& m : f.slice_cols) write_tensor_binary(out, tensor_from_matrix(m));
    for (const auto& m : f.slice_rows) write_tensor_binary(out, tensor_from_matrix(m));
    write_tensor_binary(out, tensor_from_matrix(f.f_core));
    for (const auto& m : f.g_core) write_tensor_binary(out, tensor_from_matrix(m));
}

namespace {
Eigen::MatrixXd read_block(std::istream& in) {
    return matrix_from_tensor(read_tensor_binary(in));
}
}  // namespace

Cur3Factors load_cur3(std::istream& in) {
    std::string tag;
    in >> tag;
    if (tag != "CUR3") throw IoError("cur container: expected CUR3 manifest");
    Cur3Factors f;
    int n1, n2, n3;
    if (!(in >> f.k >> n1 >> n2 >> n3)) throw IoError("cur container: bad manifest");
    f.shape = {n1, n2, n3};
    f.i1 = read_index_set(in);
    f.i2 = read_index_set(in);
    f.i3 = read_index_set(in);
    in.ignore(1, '\n');
    f.fibers1 = read_block(in);
    const std::size_t kk = f.i1.size();
    for (std::size_t i = 0; i < kk; ++i) f.slice_cols.push_back(read_block(in));
    for (std::size_t i = 0; i < kk; ++i) f.slice_rows.push_back(read_block(in));
    f.f_core = read_block(in);
    for (std::size_t i = 0; i < kk; ++i) f.g_core.push_back(read_block(in));
    return f;
}

void save_cur4(std::ostream& out, const Cur4Factors& f) {
    out << "CUR4 " << f.k << ' ' << f.shape[0] << ' ' << f.shape[1] << ' '
        << f.shape[2] << ' ' << f.shape[3];
    write_index_set(out, f.i1);
    write_index_set(out, f.i2);
    write_index_set(out, f.i3);
    write_index_set(out, f.i4);
    out << '\n';
    write_tensor_binary(out, tensor_from_matrix(f.fibers1));
    write_tensor_binary(out, tensor_from_matrix(f.fibers2));
    write_tensor_binary(out, tensor_from_matrix(f.fibers3));
    write_tensor_binary(out, tensor_from_matrix(f.fibers4));
    write_tensor_binary(out, tensor_from_matrix(f.h_core));
    for (const auto& m : f.f_core) write_tensor_binary(out, tensor_from_matrix(m));
    for (const auto& m : f.g_core) write_tensor_binary(out, tensor_from_matrix(m));
}

Cur4Factors load_cur4(std::istream& in) {
    std::string tag;
    in >> tag;
    if (tag != "CUR4") throw IoError("cur container: expected CUR4 manifest");
    Cur4Factors f;
    int n1, n2, n3, n4;
    if (!(in >> f.k >> n1 >> n2 >> n3 >> n4))
        throw IoError("cur container: bad manifest");
    f.shape = {n1, n2, n3, n4};
    f.i1 = read_index_set(in);
    f.i2 = read_index_set(in);
    f.i3 = read_index_set(in);
    f.i4 = read_index_set(in);
    in.ignore(1, '\n');
    f.fibers1 = read_block(in);
    f.fibers2 = read_block(in);
    f.fibers3 = read_block(in);
    f.fibers4 = read_block(in);
    f.h_core = read_block(in);
    const std::size_t kk = static_cast<std::size_t>(f.k) * static_cast<std::size_t>(f.k);
    for (std::size_t i = 0; i < kk; ++i) f.f_core.push_back(read_block(in));
    for (std::size_t i = 0; i < kk; ++i) f.g_core.push_back(read_block(in));
    return f;
}

}  // namespace tlra
