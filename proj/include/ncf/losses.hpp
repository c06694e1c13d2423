#pragma once

#include "ncf/matrix.hpp"

namespace ncf {

struct LossResult {
    double loss = 0.0;
    Matrix grad;  // gradient at the logits, already divided by batch size
};

// Mean -log p_true over the batch. `probs` must be softmax rows (sum 1 within
// 1e-9), `targets` one-hot. The returned gradient is the combined
// softmax+cross-entropy gradient (p - y) / batch.
LossResult categorical_crossentropy(const Matrix& probs, const Matrix& targets);

// Mean squared error over batch x 1 columns; grad = 2(pred - target)/batch.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

// Mean binary cross-entropy; `p` are sigmoid outputs, `y` in {0,1}. The
// returned gradient is the combined sigmoid+BCE gradient (p - y)/batch.
LossResult binary_crossentropy(const Matrix& p, const Matrix& y);

}  // namespace ncf
