#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncf {

// Row-major dense matrix of doubles. The whole engine runs in 64-bit.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool empty() const { return rows == 0 || cols == 0; }
    std::size_t size() const { return data.size(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// out = a * b. Skips zero entries of `a`, which makes the sparse rating-row
// inputs of the DeepMF towers cheap without a separate code path.
Matrix matmul(const Matrix& a, const Matrix& b);

// out = a^T * b (used for dW = x^T * delta; same zero-skip on `a`).
Matrix matmul_trans_a(const Matrix& a, const Matrix& b);

// out = a * b^T (used for input gradients delta * W^T).
Matrix matmul_trans_b(const Matrix& a, const Matrix& b);

// Throws if any entry is NaN or infinite.
void check_finite(const Matrix& m, const std::string& where);

}  // namespace ncf
