#include "ncf/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ncf {

double gradient_check(std::span<ParamRef> params,
                      const std::function<double()>& loss_fn, double h) {
    // Snapshot analytic grads first; loss_fn re-runs forwards which must not
    // disturb them, but a stray backward would.
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const ParamRef& p : params)
        analytic.emplace_back(p.g, p.g + p.n);

    double max_err = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        ParamRef& p = params[pi];
        for (std::size_t k = 0; k < p.n; ++k) {
            const double saved = p.w[k];
            p.w[k] = saved + h;
            const double lp = loss_fn();
            p.w[k] = saved - h;
            const double lm = loss_fn();
            p.w[k] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double a = analytic[pi][k];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_err = std::max(max_err, std::abs(a - numeric) / denom);
        }
    }
    return max_err;
}

}  // namespace ncf
