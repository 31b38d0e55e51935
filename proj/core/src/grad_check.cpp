#include "stgnn/grad_check.hpp"

#include "stgnn/error.hpp"

#include <algorithm>
#include <cmath>

namespace stgnn {

namespace {

double evaluate(const std::function<double()>& f) {
    const double v = f();
    if (!std::isfinite(v)) {
        throw numeric_error("grad_check: objective returned a non-finite value");
    }
    return v;
}

} // namespace

double grad_check(const std::function<double()>& f, std::span<Parameter* const> params,
                  double eps) {
    if (!(eps > 0.0)) {
        throw config_error("grad_check: eps must be positive");
    }
    double worst = 0.0;
    for (Parameter* p : params) {
        auto values = p->value.values();
        auto grads = p->grad.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + eps;
            const double up = evaluate(f);
            values[i] = saved - eps;
            const double down = evaluate(f);
            values[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = grads[i];
            const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
            worst = std::max(worst, std::abs(analytic - numeric) / denom);
        }
    }
    return worst;
}

} // namespace stgnn
