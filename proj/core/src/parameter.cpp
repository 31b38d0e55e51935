#include "stgnn/parameter.hpp"

#include <cmath>

namespace stgnn {

Parameter::Parameter(Matrix initial)
    : value(std::move(initial)),
      grad(value.rows(), value.cols()),
      adam_m(value.rows(), value.cols()),
      adam_v(value.rows(), value.cols()) {}

void Parameter::assign(Matrix v) { *this = Parameter(std::move(v)); }

Matrix glorot_uniform(std::size_t rows, std::size_t cols, RngStream& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = rng.uniform(-s, s);
    }
    return m;
}

void zero_grads(const std::vector<NamedParameter>& params) {
    for (const auto& p : params) {
        p.param->zero_grad();
    }
}

} // namespace stgnn
