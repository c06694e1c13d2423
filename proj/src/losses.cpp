#include "ncf/losses.hpp"

#include <algorithm>
#include <cmath>

namespace ncf {

namespace {
constexpr double kClip = 1e-12;
}

LossResult categorical_crossentropy(const Matrix& probs, const Matrix& targets) {
    if (probs.rows != targets.rows || probs.cols != targets.cols)
        throw std::invalid_argument("crossentropy: shape mismatch");
    if (probs.rows == 0) throw std::invalid_argument("crossentropy: empty batch");

    LossResult res;
    res.grad = Matrix(probs.rows, probs.cols);
    const double inv_batch = 1.0 / double(probs.rows);
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        const double* prow = probs.row(i);
        const double* trow = targets.row(i);
        double psum = 0.0, tsum = 0.0;
        int ones = 0;
        for (std::size_t j = 0; j < probs.cols; ++j) {
            psum += prow[j];
            tsum += trow[j];
            if (trow[j] == 1.0) ++ones;
            else if (trow[j] != 0.0)
                throw std::invalid_argument("crossentropy: target is not one-hot");
        }
        if (ones != 1 || tsum != 1.0)
            throw std::invalid_argument("crossentropy: target is not one-hot");
        if (std::abs(psum - 1.0) > 1e-9)
            throw std::invalid_argument("crossentropy: probabilities do not sum to 1");

        double* grow = res.grad.row(i);
        for (std::size_t j = 0; j < probs.cols; ++j) {
            if (trow[j] == 1.0) {
                const double p = std::clamp(prow[j], kClip, 1.0);
                total -= std::log(p);
            }
            grow[j] = (prow[j] - trow[j]) * inv_batch;
        }
    }
    res.loss = total * inv_batch;
    return res;
}

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw std::invalid_argument("mse: shape mismatch");
    if (pred.size() == 0) throw std::invalid_argument("mse: empty batch");

    LossResult res;
    res.grad = Matrix(pred.rows, pred.cols);
    const double inv_n = 1.0 / double(pred.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred.data[k] - target.data[k];
        total += d * d;
        res.grad.data[k] = 2.0 * d * inv_n;
    }
    res.loss = total * inv_n;
    return res;
}

LossResult binary_crossentropy(const Matrix& p, const Matrix& y) {
    if (p.rows != y.rows || p.cols != y.cols)
        throw std::invalid_argument("bce: shape mismatch");
    if (p.size() == 0) throw std::invalid_argument("bce: empty batch");

    LossResult res;
    res.grad = Matrix(p.rows, p.cols);
    const double inv_n = 1.0 / double(p.size());
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double yk = y.data[k];
        if (yk != 0.0 && yk != 1.0)
            throw std::invalid_argument("bce: labels must be 0 or 1");
        const double pk = std::clamp(p.data[k], kClip, 1.0 - kClip);
        total -= yk * std::log(pk) + (1.0 - yk) * std::log(1.0 - pk);
        res.grad.data[k] = (p.data[k] - yk) * inv_n;
    }
    res.loss = total * inv_n;
    return res;
}

}  // namespace ncf
