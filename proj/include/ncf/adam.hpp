#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ncf {

struct AdamState {
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double lr = 0.001;
};

// Flat view over one parameter tensor and its gradient / moment buffers.
struct ParamRef {
    double* w = nullptr;
    double* g = nullptr;
    double* m = nullptr;
    double* v = nullptr;
    std::size_t n = 0;
};

// Standard Adam with bias correction. Increments state.t exactly once for
// the whole parameter set and zeroes gradients after the update.
void adam_step(AdamState& state, std::span<ParamRef> params);

}  // namespace ncf
