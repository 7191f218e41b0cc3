#include "tlra/tensor.hpp"

#include <cmath>
#include <numeric>

#include "tlra/kernels.hpp"

namespace tlra {

namespace {

std::size_t checked_size(const std::vector<int>& shape) {
    if (shape.empty()) throw DimensionError("tensor: order must be at least 1");
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) throw DimensionError("tensor: every extent must be positive");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

// Strides for last-index-fastest layout.
std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
    std::vector<std::size_t> s(shape.size());
    std::size_t acc = 1;
    for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = acc;
        acc *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
    }
    return s;
}

void check_mode_list(const std::vector<int>& modes, int order) {
    if (modes.empty()) throw DimensionError("contract: empty mode list");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] < 0 || modes[i] >= order)
            throw DimensionError("contract: mode out of range");
        if (i > 0 && modes[i] <= modes[i - 1])
            throw DimensionError("contract: modes must be strictly increasing");
    }
}

// Flat offsets of every multi-index of `dims` against the given strides,
// enumerated last-index-fastest.
std::vector<std::size_t> enumerate_offsets(const std::vector<int>& dims,
                                           const std::vector<std::size_t>& strides) {
    std::size_t count = 1;
    for (int d : dims) count *= static_cast<std::size_t>(d);
    std::vector<std::size_t> offsets(count);
    std::vector<int> idx(dims.size(), 0);
    for (std::size_t f = 0; f < count; ++f) {
        std::size_t off = 0;
        for (std::size_t m = 0; m < dims.size(); ++m)
            off += static_cast<std::size_t>(idx[m]) * strides[m];
        offsets[f] = off;
        for (int m = static_cast<int>(dims.size()) - 1; m >= 0; --m) {
            auto um = static_cast<std::size_t>(m);
            if (++idx[um] < dims[um]) break;
            idx[um] = 0;
        }
    }
    return offsets;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_size(shape_) != data_.size())
        throw DimensionError("tensor: data length does not match shape");
}

std::size_t Tensor::flat_index(const std::vector<int>& idx) const {
    if (idx.size() != shape_.size())
        throw DimensionError("tensor: index arity mismatch");
    std::size_t f = 0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
        if (idx[m] < 0 || idx[m] >= shape_[m])
            throw DimensionError("tensor: index out of range");
        f = f * static_cast<std::size_t>(shape_[m]) + static_cast<std::size_t>(idx[m]);
    }
    return f;
}

double inner(const Tensor& s, const Tensor& t) {
    if (!s.same_shape(t)) throw DimensionError("inner: shape mismatch");
    return kernels::dot(s.data(), t.data(), s.size());
}

double hs_norm(const Tensor& t) {
    return std::sqrt(kernels::dot(t.data(), t.data(), t.size()));
}

Tensor contract(const Tensor& t, const Tensor& x, const std::vector<int>& modes) {
    check_mode_list(modes, t.order());
    if (static_cast<int>(modes.size()) != x.order())
        throw DimensionError("contract: operand order does not match mode count");
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (x.dim(static_cast<int>(i)) != t.dim(modes[i]))
            throw DimensionError("contract: operand extent mismatch");

    const auto strides = strides_of(t.shape());
    std::vector<int> keep_dims;
    std::vector<std::size_t> keep_strides, drop_strides;
    std::size_t mpos = 0;
    for (int m = 0; m < t.order(); ++m) {
        if (mpos < modes.size() && modes[mpos] == m) {
            drop_strides.push_back(strides[static_cast<std::size_t>(m)]);
            ++mpos;
        } else {
            keep_dims.push_back(t.dim(m));
            keep_strides.push_back(strides[static_cast<std::size_t>(m)]);
        }
    }

    const auto x_offsets = enumerate_offsets(x.shape(), drop_strides);
    if (keep_dims.empty()) {
        // full contraction: a 0-mode tensor is not representable, return
        // the scalar as a 1-entry tensor of shape (1).
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += t[x_offsets[i]] * x[i];
        Tensor out({1});
        out[0] = s;
        return out;
    }
    const auto out_offsets = enumerate_offsets(keep_dims, keep_strides);
    Tensor out(keep_dims);
    kernels::contract(t.data(), out_offsets, x_offsets, x.data(), out.data());
    return out;
}

double scalar_value(const Tensor& t) {
    if (t.size() != 1) throw DimensionError("scalar_value: tensor is not a scalar");
    return t[0];
}

Eigen::MatrixXd unfold(const Tensor& t, int mode) {
    if (mode < 0 || mode >= t.order()) throw DimensionError("unfold: mode out of range");
    std::size_t outer = 1, inner = 1;
    for (int m = 0; m < mode; ++m) outer *= static_cast<std::size_t>(t.dim(m));
    for (int m = mode + 1; m < t.order(); ++m) inner *= static_cast<std::size_t>(t.dim(m));
    const std::size_t nl = static_cast<std::size_t>(t.dim(mode));

    Eigen::MatrixXd result(static_cast<Eigen::Index>(nl),
                           static_cast<Eigen::Index>(outer * inner));
    // column = o*inner + c: remaining modes in increasing order, last fastest.
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < nl; ++i)
            for (std::size_t c = 0; c < inner; ++c)
                result(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(o * inner + c)) =
                    t[(o * nl + i) * inner + c];
    return result;
}

Tensor fold(const Eigen::MatrixXd& m, int mode, const std::vector<int>& shape) {
    Tensor t(shape);
    if (mode < 0 || mode >= t.order()) throw DimensionError("fold: mode out of range");
    std::size_t outer = 1, inner = 1;
    for (int k = 0; k < mode; ++k) outer *= static_cast<std::size_t>(t.dim(k));
    for (int k = mode + 1; k < t.order(); ++k) inner *= static_cast<std::size_t>(t.dim(k));
    const std::size_t nl = static_cast<std::size_t>(t.dim(mode));
    if (m.rows() != static_cast<Eigen::Index>(nl) ||
        m.cols() != static_cast<Eigen::Index>(outer * inner))
        throw DimensionError("fold: matrix shape does not match target");
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < nl; ++i)
            for (std::size_t c = 0; c < inner; ++c)
                t[(o * nl + i) * inner + c] =
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o * inner + c));
    return t;
}

Eigen::MatrixXd unfold_bipartite(const Tensor& t,
                                 const std::vector<int>& row_modes,
                                 const std::vector<int>& col_modes) {
    check_mode_list(row_modes, t.order());
    check_mode_list(col_modes, t.order());
    std::vector<bool> seen(static_cast<std::size_t>(t.order()), false);
    for (int m : row_modes) seen[static_cast<std::size_t>(m)] = true;
    for (int m : col_modes) {
        if (seen[static_cast<std::size_t>(m)])
            throw DimensionError("unfold_bipartite: mode groups overlap");
        seen[static_cast<std::size_t>(m)] = true;
    }
    for (bool b : seen)
        if (!b) throw DimensionError("unfold_bipartite: mode groups must cover all modes");

    const auto strides = strides_of(t.shape());
    auto group_offsets = [&](const std::vector<int>& modes) {
        std::vector<int> dims;
        std::vector<std::size_t> st;
        for (int m : modes) {
            dims.push_back(t.dim(m));
            st.push_back(strides[static_cast<std::size_t>(m)]);
        }
        return enumerate_offsets(dims, st);
    };
    const auto row_off = group_offsets(row_modes);
    const auto col_off = group_offsets(col_modes);

    Eigen::MatrixXd result(static_cast<Eigen::Index>(row_off.size()),
                           static_cast<Eigen::Index>(col_off.size()));
    for (std::size_t r = 0; r < row_off.size(); ++r)
        for (std::size_t c = 0; c < col_off.size(); ++c)
            result(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                t[row_off[r] + col_off[c]];
    return result;
}

Tensor mode_multiply(const Tensor& t, const Eigen::MatrixXd& m, int mode) {
    if (mode < 0 || mode >= t.order())
        throw DimensionError("mode_multiply: mode out of range");
    if (m.cols() != t.dim(mode))
        throw DimensionError("mode_multiply: matrix columns must match mode extent");
    std::size_t outer = 1, inner = 1;
    for (int k = 0; k < mode; ++k) outer *= static_cast<std::size_t>(t.dim(k));
    for (int k = mode + 1; k < t.order(); ++k) inner *= static_cast<std::size_t>(t.dim(k));

    std::vector<int> out_shape = t.shape();
    out_shape[static_cast<std::size_t>(mode)] = static_cast<int>(m.rows());
    Tensor out(out_shape);
    kernels::mode_multiply(t.data(), outer, static_cast<std::size_t>(t.dim(mode)),
                           inner, m, out.data());
    return out;
}

double rank_one_value(const Tensor& t, const std::vector<Eigen::VectorXd>& vectors) {
    if (static_cast<int>(vectors.size()) != t.order())
        throw DimensionError("rank_one_value: need one vector per mode");
    for (int i = 0; i < t.order(); ++i)
        if (vectors[static_cast<std::size_t>(i)].size() != t.dim(i))
            throw DimensionError("rank_one_value: vector length mismatch");

    // Peel modes from the last: each step contracts the trailing axis.
    std::vector<double> cur(t.data(), t.data() + t.size());
    for (int m = t.order() - 1; m >= 0; --m) {
        const auto& v = vectors[static_cast<std::size_t>(m)];
        const std::size_t n = static_cast<std::size_t>(v.size());
        const std::size_t blocks = cur.size() / n;
        std::vector<double> next(blocks);
        for (std::size_t b = 0; b < blocks; ++b)
            next[b] = kernels::dot_serial(cur.data() + b * n, v.data(), n);
        cur.swap(next);
    }
    return cur[0];
}

Tensor rank_one_tensor(const std::vector<Eigen::VectorXd>& factors, double scale) {
    if (factors.empty()) throw DimensionError("rank_one_tensor: no factors");
    std::vector<int> shape;
    shape.reserve(factors.size());
    for (const auto& f : factors) shape.push_back(static_cast<int>(f.size()));
    Tensor out(shape);
    const std::size_t n = out.size();
    std::vector<int> idx(factors.size(), 0);
    for (std::size_t f = 0; f < n; ++f) {
        double v = scale;
        for (std::size_t m = 0; m < factors.size(); ++m) v *= factors[m](idx[m]);
        out[f] = v;
        for (int m = static_cast<int>(factors.size()) - 1; m >= 0; --m) {
            auto um = static_cast<std::size_t>(m);
            if (++idx[um] < shape[um]) break;
            idx[um] = 0;
        }
    }
    return out;
}

Eigen::VectorXd contract_except(const Tensor& t,
                                const std::vector<Eigen::VectorXd>& vectors,
                                int skip) {
    if (static_cast<int>(vectors.size()) != t.order())
        throw DimensionError("contract_except: need one vector per mode");
    if (skip < 0 || skip >= t.order())
        throw DimensionError("contract_except: mode out of range");
    Tensor cur = t;
    // Contract trailing modes first so mode numbers stay stable.
    for (int m = t.order() - 1; m >= 0; --m) {
        if (m == skip) continue;
        const auto& v = vectors[static_cast<std::size_t>(m)];
        if (v.size() != t.dim(m))
            throw DimensionError("contract_except: vector length mismatch");
        cur = mode_multiply(cur, v.transpose(), m);
    }
    // All remaining extents are 1 except mode `skip`.
    Eigen::VectorXd out(t.dim(skip));
    for (int i = 0; i < t.dim(skip); ++i) out(i) = cur[static_cast<std::size_t>(i)];
    return out;
}

Tensor core_tensor(const Tensor& t, const SubspaceTuple& frames) {
    if (frames.order() != t.order())
        throw DimensionError("project: need one frame per mode");
    Tensor cur = t;
    for (int m = 0; m < t.order(); ++m) {
        const auto& f = frames.frames[static_cast<std::size_t>(m)];
        if (f.n() != t.dim(m))
            throw DimensionError("project: frame rows must match mode extent");
        cur = mode_multiply(cur, f.basis.transpose(), m);
    }
    return cur;
}

std::pair<Tensor, Tensor> project(const Tensor& t, const SubspaceTuple& frames) {
    Tensor core = core_tensor(t, frames);
    Tensor proj = core;
    for (int m = 0; m < t.order(); ++m)
        proj = mode_multiply(proj, frames.frames[static_cast<std::size_t>(m)].basis, m);
    return {std::move(core), std::move(proj)};
}

}  // namespace tlra
