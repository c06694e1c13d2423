#include "ncf/adam.hpp"

#include <cmath>

namespace ncf {

void adam_step(AdamState& state, std::span<ParamRef> params) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
    for (ParamRef& p : params) {
        for (std::size_t k = 0; k < p.n; ++k) {
            const double g = p.g[k];
            p.m[k] = state.beta1 * p.m[k] + (1.0 - state.beta1) * g;
            p.v[k] = state.beta2 * p.v[k] + (1.0 - state.beta2) * g * g;
            const double mhat = p.m[k] / bc1;
            const double vhat = p.v[k] / bc2;
            p.w[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
            p.g[k] = 0.0;
        }
    }
}

}  // namespace ncf
