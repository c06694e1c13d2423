#pragma once

#include <functional>
#include <span>

#include "ncf/adam.hpp"

namespace ncf {

// Central finite differences against the analytic gradients already stored in
// `params` (caller runs forward+backward first). `loss_fn` must recompute the
// loss from the current parameter values without touching the gradients.
// Returns the max relative error with denominator max(|analytic|, |numeric|, 1e-8).
double gradient_check(std::span<ParamRef> params,
                      const std::function<double()>& loss_fn, double h = 1e-5);

}  // namespace ncf
