#pragma once

#include <random>
#include <span>
#include <vector>

#include "ncf/matrix.hpp"

namespace ncf {

enum class Activation { linear, relu, softmax, sigmoid };

// Lookup table mapping dense ids to F-dimensional vectors. Sized one row
// larger than the id range (rows 0..num_entries-2 addressable, the spare
// last row stays untouched).
struct EmbeddingTable {
    std::size_t num_entries = 0;
    std::size_t dim = 0;
    Matrix weights, grad, adam_m, adam_v;

    EmbeddingTable() = default;
    EmbeddingTable(std::size_t entries, std::size_t d)
        : num_entries(entries),
          dim(d),
          weights(entries, d),
          grad(entries, d),
          adam_m(entries, d),
          adam_v(entries, d) {}

    void init_uniform(std::mt19937_64& rng);

    // Pure lookup; out-of-range indices throw, never clamp.
    Matrix forward(std::span<const int> indices) const;

    // Accumulates upstream rows into grad rows addressed by the forward batch.
    void backward(std::span<const int> indices, const Matrix& upstream);
};

struct DenseLayer {
    std::size_t in_dim = 0, out_dim = 0;
    Activation act = Activation::linear;
    Matrix W;           // in_dim x out_dim
    Matrix b;           // 1 x out_dim
    Matrix dW, db;
    Matrix mW, vW, mb, vb;

    // Input-layer towers feed raw data, so no input gradient is needed there.
    bool input_grad_needed = true;

    Matrix cached_input, cached_preact;
    bool has_cache = false;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation a);

    void init_uniform(std::mt19937_64& rng);

    // activation(x*W + b); caches x and the pre-activation for backward.
    Matrix forward(const Matrix& x);
    // Inference path, no caching.
    Matrix forward_nocache(const Matrix& x) const;

    // Returns the input gradient (empty matrix when input_grad_needed is
    // false) and accumulates dW/db. For softmax and sigmoid heads the
    // upstream must already be the combined loss gradient at the logits.
    Matrix backward(const Matrix& upstream);

    std::size_t param_count() const { return W.size() + b.size(); }
};

struct DropoutLayer {
    double rate = 0.0;
    Matrix mask;  // entries in {0, 1/(1-rate)}
    bool has_cache = false;

    explicit DropoutLayer(double r = 0.0);

    // Inverted dropout in train mode, exact identity in infer mode.
    Matrix forward(const Matrix& x, bool train, std::mt19937_64& rng);
    Matrix backward(const Matrix& upstream) const;
};

// Row-wise [a | b].
Matrix concat_cols(const Matrix& a, const Matrix& b);
// Splits an upstream gradient of concat_cols back at column p.
void split_cols(const Matrix& g, std::size_t p, Matrix& ga, Matrix& gb);

// Per-row inner product; returns batch x 1.
Matrix dot_merge(const Matrix& u, const Matrix& v);
void dot_merge_backward(const Matrix& upstream, const Matrix& u, const Matrix& v,
                        Matrix& du, Matrix& dv);

}  // namespace ncf
