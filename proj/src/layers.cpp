#include "ncf/layers.hpp"

#include <algorithm>
#include <cmath>

namespace ncf {

namespace {

void glorot_uniform(Matrix& m, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / double(m.rows + m.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : m.data) v = dist(rng);
}

}  // namespace

void EmbeddingTable::init_uniform(std::mt19937_64& rng) {
    glorot_uniform(weights, rng);
}

Matrix EmbeddingTable::forward(std::span<const int> indices) const {
    Matrix out(indices.size(), dim);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int idx = indices[i];
        if (idx < 0 || std::size_t(idx) >= num_entries)
            throw std::out_of_range("embedding index " + std::to_string(idx) +
                                    " out of range [0, " + std::to_string(num_entries) + ")");
        const double* src = weights.row(std::size_t(idx));
        std::copy(src, src + dim, out.row(i));
    }
    return out;
}

void EmbeddingTable::backward(std::span<const int> indices, const Matrix& upstream) {
    if (upstream.rows != indices.size() || upstream.cols != dim)
        throw std::invalid_argument("embedding backward: upstream shape mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        double* g = grad.row(std::size_t(indices[i]));
        const double* u = upstream.row(i);
        for (std::size_t j = 0; j < dim; ++j) g[j] += u[j];
    }
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation a)
    : in_dim(in),
      out_dim(out),
      act(a),
      W(in, out),
      b(1, out),
      dW(in, out),
      db(1, out),
      mW(in, out),
      vW(in, out),
      mb(1, out),
      vb(1, out) {}

void DenseLayer::init_uniform(std::mt19937_64& rng) {
    glorot_uniform(W, rng);
    b.fill(0.0);
}

namespace {

void apply_activation(Matrix& m, Activation act) {
    switch (act) {
        case Activation::linear:
            break;
        case Activation::relu:
            for (double& v : m.data) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (double& v : m.data) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::softmax:
            for (std::size_t i = 0; i < m.rows; ++i) {
                double* row = m.row(i);
                double mx = row[0];
                for (std::size_t j = 1; j < m.cols; ++j) mx = std::max(mx, row[j]);
                double sum = 0.0;
                for (std::size_t j = 0; j < m.cols; ++j) {
                    row[j] = std::exp(row[j] - mx);
                    sum += row[j];
                }
                for (std::size_t j = 0; j < m.cols; ++j) row[j] /= sum;
            }
            break;
    }
}

}  // namespace

Matrix DenseLayer::forward(const Matrix& x) {
    if (x.cols != in_dim)
        throw std::invalid_argument("dense forward: expected " + std::to_string(in_dim) +
                                    " columns, got " + std::to_string(x.cols));
    cached_input = x;
    Matrix pre = matmul(x, W);
    for (std::size_t i = 0; i < pre.rows; ++i) {
        double* row = pre.row(i);
        for (std::size_t j = 0; j < out_dim; ++j) row[j] += b.data[j];
    }
    cached_preact = pre;
    has_cache = true;
    apply_activation(pre, act);
    check_finite(pre, "dense forward");
    return pre;
}

Matrix DenseLayer::forward_nocache(const Matrix& x) const {
    if (x.cols != in_dim)
        throw std::invalid_argument("dense forward: shape mismatch");
    Matrix pre = matmul(x, W);
    for (std::size_t i = 0; i < pre.rows; ++i) {
        double* row = pre.row(i);
        for (std::size_t j = 0; j < out_dim; ++j) row[j] += b.data[j];
    }
    apply_activation(pre, act);
    check_finite(pre, "dense forward");
    return pre;
}

Matrix DenseLayer::backward(const Matrix& upstream) {
    if (!has_cache) throw std::logic_error("dense backward called without forward");
    if (upstream.rows != cached_preact.rows || upstream.cols != out_dim)
        throw std::invalid_argument("dense backward: upstream shape mismatch");

    Matrix delta = upstream;
    switch (act) {
        case Activation::linear:
            break;
        case Activation::relu:
            for (std::size_t k = 0; k < delta.size(); ++k)
                if (cached_preact.data[k] <= 0.0) delta.data[k] = 0.0;
            break;
        // Softmax and sigmoid heads are paired with their losses; the loss
        // already hands back the gradient at the logits.
        case Activation::softmax:
        case Activation::sigmoid:
            break;
    }

    Matrix dw = matmul_trans_a(cached_input, delta);
    for (std::size_t k = 0; k < dW.size(); ++k) dW.data[k] += dw.data[k];
    for (std::size_t i = 0; i < delta.rows; ++i) {
        const double* row = delta.row(i);
        for (std::size_t j = 0; j < out_dim; ++j) db.data[j] += row[j];
    }

    has_cache = false;
    if (!input_grad_needed) return Matrix();
    return matmul_trans_b(delta, W);
}

DropoutLayer::DropoutLayer(double r) : rate(r) {
    if (r < 0.0 || r >= 1.0)
        throw std::invalid_argument("dropout rate must be in [0, 1)");
}

Matrix DropoutLayer::forward(const Matrix& x, bool train, std::mt19937_64& rng) {
    if (!train || rate == 0.0) {
        has_cache = false;
        return x;
    }
    mask = Matrix(x.rows, x.cols);
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Matrix out(x.rows, x.cols);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double m = dist(rng) < rate ? 0.0 : scale;
        mask.data[k] = m;
        out.data[k] = x.data[k] * m;
    }
    has_cache = true;
    return out;
}

Matrix DropoutLayer::backward(const Matrix& upstream) const {
    if (!has_cache) return upstream;  // identity forward => identity backward
    Matrix out(upstream.rows, upstream.cols);
    for (std::size_t k = 0; k < upstream.size(); ++k)
        out.data[k] = upstream.data[k] * mask.data[k];
    return out;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows)
        throw std::invalid_argument("concat: batch size mismatch");
    Matrix out(a.rows, a.cols + b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::copy(a.row(i), a.row(i) + a.cols, out.row(i));
        std::copy(b.row(i), b.row(i) + b.cols, out.row(i) + a.cols);
    }
    return out;
}

void split_cols(const Matrix& g, std::size_t p, Matrix& ga, Matrix& gb) {
    if (p > g.cols) throw std::invalid_argument("split_cols: bad split point");
    ga = Matrix(g.rows, p);
    gb = Matrix(g.rows, g.cols - p);
    for (std::size_t i = 0; i < g.rows; ++i) {
        std::copy(g.row(i), g.row(i) + p, ga.row(i));
        std::copy(g.row(i) + p, g.row(i) + g.cols, gb.row(i));
    }
}

Matrix dot_merge(const Matrix& u, const Matrix& v) {
    if (u.rows != v.rows || u.cols != v.cols)
        throw std::invalid_argument("dot_merge: shape mismatch");
    Matrix out(u.rows, 1);
    for (std::size_t i = 0; i < u.rows; ++i) {
        const double* ur = u.row(i);
        const double* vr = v.row(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < u.cols; ++k) acc += ur[k] * vr[k];
        out.data[i] = acc;
    }
    return out;
}

void dot_merge_backward(const Matrix& upstream, const Matrix& u, const Matrix& v,
                        Matrix& du, Matrix& dv) {
    if (upstream.rows != u.rows || upstream.cols != 1)
        throw std::invalid_argument("dot_merge backward: upstream must be batch x 1");
    du = Matrix(u.rows, u.cols);
    dv = Matrix(v.rows, v.cols);
    for (std::size_t i = 0; i < u.rows; ++i) {
        const double g = upstream.data[i];
        const double* ur = u.row(i);
        const double* vr = v.row(i);
        double* dur = du.row(i);
        double* dvr = dv.row(i);
        for (std::size_t k = 0; k < u.cols; ++k) {
            dur[k] = g * vr[k];
            dvr[k] = g * ur[k];
        }
    }
}

}  // namespace ncf
