#pragma once

#include "stgnn/graph.hpp"
#include "stgnn/matrix.hpp"
#include "stgnn/parameter.hpp"
#include "stgnn/rng.hpp"

namespace stgnn {

// Node features are stored one row per node, so a graph convolution is
// act(Ã · H · W) and a recurrent step multiplies inputs on the right.
// Backward functions accumulate into the parameter grads (+=) and return
// gradients with respect to their inputs.

/// act(Ã · H · W); no bias.
struct GcnLayer {
    Parameter w;
    Activation activation = Activation::relu;

    static GcnLayer init(std::size_t d_in, std::size_t d_out, Activation activation, RngStream& rng);
    std::size_t d_in() const noexcept { return w.rows(); }
    std::size_t d_out() const noexcept { return w.cols(); }
};

struct GcnCache {
    Matrix propagated; // Ã · H_in
    Matrix output;     // act(pre-activation)
};

struct GcnResult {
    Matrix out;
    GcnCache cache;
};

GcnResult gcn_forward(const NormalizedAdjacency& adj, const Matrix& h_in, const GcnLayer& layer);
Matrix gcn_backward(const NormalizedAdjacency& adj, const GcnCache& cache, const Matrix& grad_out,
                    GcnLayer& layer);

/// Gated recurrent cell, weights shared across rows (nodes):
///   z  = logistic(x·W_z + h·U_z)
///   r  = logistic(x·W_r + h·U_r)
///   h' = z ⊗ h + (1 − z) ⊗ tanh(x·W_h + (r ⊗ h)·U_h)
/// The update gate z weights the previous state, not the candidate.
struct GruCell {
    Parameter w_z, w_r, w_h;
    Parameter u_z, u_r, u_h;

    static GruCell init(std::size_t d_in, std::size_t d_hidden, RngStream& rng);
    std::size_t d_in() const noexcept { return w_z.rows(); }
    std::size_t d_hidden() const noexcept { return w_z.cols(); }
};

struct GruCache {
    Matrix x;
    Matrix h_prev;
    Matrix z;
    Matrix r;
    Matrix reset_hidden; // r ⊗ h_prev
    Matrix candidate;    // tanh(...)
};

struct GruResult {
    Matrix h;
    GruCache cache;
};

struct GruGrads {
    Matrix x;
    Matrix h_prev;
};

GruResult gru_step(const Matrix& x, const Matrix& h_prev, const GruCell& cell);
GruGrads gru_backward(const GruCache& cache, const Matrix& grad_h, GruCell& cell);

/// x · W + b with b broadcast over rows.
Matrix affine_forward(const Matrix& x, const Parameter& w, const Parameter& b);
Matrix affine_backward(const Matrix& x, const Matrix& grad_out, Parameter& w, Parameter& b);

/// Affine map from the fused hidden state to all horizon steps at once.
/// Output column j * d_out + f holds feature f of horizon step j.
struct Decoder {
    Parameter w;
    Parameter b;
    std::size_t horizon = 1;
    std::size_t d_out = 1;

    static Decoder init(std::size_t d_in, std::size_t horizon, std::size_t d_out, RngStream& rng);
    std::size_t d_in() const noexcept { return w.rows(); }
};

Matrix decode(const Matrix& h_fused, const Decoder& dec);
Matrix decode_backward(const Matrix& h_fused, const Matrix& grad_out, Decoder& dec);

} // namespace stgnn
