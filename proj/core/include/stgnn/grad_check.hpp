#pragma once

#include "stgnn/parameter.hpp"

#include <functional>
#include <span>

namespace stgnn {

/// Compares the analytic gradients already stored in `params` against
/// central differences of `f`.
///
/// Each entry is perturbed by ±eps in place and restored afterwards. The
/// per-entry error is |analytic - numeric| / max(1e-8, |analytic| + |numeric|);
/// the maximum over all entries is returned. Throws numeric_error if f
/// returns a non-finite value and config_error if eps <= 0.
double grad_check(const std::function<double()>& f, std::span<Parameter* const> params,
                  double eps);

} // namespace stgnn
