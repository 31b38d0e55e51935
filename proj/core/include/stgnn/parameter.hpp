#pragma once

#include "stgnn/matrix.hpp"
#include "stgnn/rng.hpp"

#include <string>
#include <vector>

namespace stgnn {

/// A learnable matrix with its gradient and Adam moment estimates.
struct Parameter {
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;

    Parameter() = default;
    explicit Parameter(Matrix initial);

    std::size_t rows() const noexcept { return value.rows(); }
    std::size_t cols() const noexcept { return value.cols(); }

    void zero_grad() { grad.fill(0.0); }
    /// Replaces the value and resets gradient and optimizer state.
    void assign(Matrix v);
};

/// Parameter handle tagged with the stable name used in checkpoints.
struct NamedParameter {
    std::string name;
    Parameter* param;
};

/// Uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)), fan_in = rows, fan_out = cols.
Matrix glorot_uniform(std::size_t rows, std::size_t cols, RngStream& rng);

void zero_grads(const std::vector<NamedParameter>& params);

} // namespace stgnn
