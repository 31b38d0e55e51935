#include "stgnn/layers.hpp"

#include "stgnn/error.hpp"

namespace stgnn {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw dimension_error(msg);
    }
}

Matrix one_minus(const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    auto o = out.values();
    auto v = a.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = 1.0 - v[i];
    }
    return out;
}

// grad ⊙ y ⊙ (1 − y) for a logistic output y
Matrix logistic_backprop(const Matrix& grad, const Matrix& y) {
    Matrix out(y.rows(), y.cols());
    auto o = out.values();
    auto g = grad.values();
    auto v = y.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = g[i] * v[i] * (1.0 - v[i]);
    }
    return out;
}

} // namespace

GcnLayer GcnLayer::init(std::size_t d_in, std::size_t d_out, Activation activation,
                        RngStream& rng) {
    if (d_in == 0 || d_out == 0) {
        throw config_error("GcnLayer: dimensions must be at least 1");
    }
    if (activation == Activation::logistic) {
        throw config_error("GcnLayer: activation must be relu or tanh");
    }
    return GcnLayer{Parameter(glorot_uniform(d_in, d_out, rng)), activation};
}

GcnResult gcn_forward(const NormalizedAdjacency& adj, const Matrix& h_in, const GcnLayer& layer) {
    require(adj.n_nodes == h_in.rows(), "gcn_forward: adjacency is " + adj.matrix.shape_string() +
                                            " but features are " + h_in.shape_string());
    require(h_in.cols() == layer.d_in(), "gcn_forward: features " + h_in.shape_string() +
                                             " do not match weight " + layer.w.value.shape_string());
    GcnResult r;
    r.cache.propagated = matmul(adj.matrix, h_in);
    r.out = activate(layer.activation, matmul(r.cache.propagated, layer.w.value));
    r.cache.output = r.out;
    return r;
}

Matrix gcn_backward(const NormalizedAdjacency& adj, const GcnCache& cache, const Matrix& grad_out,
                    GcnLayer& layer) {
    require(grad_out.same_shape(cache.output), "gcn_backward: gradient " +
                                                   grad_out.shape_string() + " vs output " +
                                                   cache.output.shape_string());
    const Matrix g = hadamard(grad_out, activation_derivative(layer.activation, cache.output));
    layer.w.grad.add_in_place(matmul_tn(cache.propagated, g));
    return matmul_tn(adj.matrix, matmul_nt(g, layer.w.value));
}

GruCell GruCell::init(std::size_t d_in, std::size_t d_hidden, RngStream& rng) {
    if (d_in == 0 || d_hidden == 0) {
        throw config_error("GruCell: dimensions must be at least 1");
    }
    GruCell c;
    c.w_z = Parameter(glorot_uniform(d_in, d_hidden, rng));
    c.w_r = Parameter(glorot_uniform(d_in, d_hidden, rng));
    c.w_h = Parameter(glorot_uniform(d_in, d_hidden, rng));
    c.u_z = Parameter(glorot_uniform(d_hidden, d_hidden, rng));
    c.u_r = Parameter(glorot_uniform(d_hidden, d_hidden, rng));
    c.u_h = Parameter(glorot_uniform(d_hidden, d_hidden, rng));
    return c;
}

GruResult gru_step(const Matrix& x, const Matrix& h_prev, const GruCell& cell) {
    require(x.cols() == cell.d_in(), "gru_step: input " + x.shape_string() +
                                         " does not match W " + cell.w_z.value.shape_string());
    require(h_prev.cols() == cell.d_hidden() && h_prev.rows() == x.rows(),
            "gru_step: hidden state " + h_prev.shape_string() + " does not match input " +
                x.shape_string() + " and U " + cell.u_z.value.shape_string());
    GruResult r;
    GruCache& c = r.cache;
    c.x = x;
    c.h_prev = h_prev;
    c.z = activate(Activation::logistic,
                   add(matmul(x, cell.w_z.value), matmul(h_prev, cell.u_z.value)));
    c.r = activate(Activation::logistic,
                   add(matmul(x, cell.w_r.value), matmul(h_prev, cell.u_r.value)));
    c.reset_hidden = hadamard(c.r, h_prev);
    c.candidate = activate(Activation::tanh,
                           add(matmul(x, cell.w_h.value), matmul(c.reset_hidden, cell.u_h.value)));
    r.h = add(hadamard(c.z, h_prev), hadamard(one_minus(c.z), c.candidate));
    return r;
}

GruGrads gru_backward(const GruCache& c, const Matrix& grad_h, GruCell& cell) {
    require(grad_h.same_shape(c.h_prev), "gru_backward: gradient " + grad_h.shape_string() +
                                             " vs hidden " + c.h_prev.shape_string());
    // h = z ⊗ h_prev + (1 − z) ⊗ cand
    const Matrix grad_z = hadamard(grad_h, sub(c.h_prev, c.candidate));
    const Matrix grad_cand = hadamard(grad_h, one_minus(c.z));
    Matrix grad_h_prev = hadamard(grad_h, c.z);

    const Matrix pre_cand = hadamard(grad_cand, activation_derivative(Activation::tanh, c.candidate));
    cell.w_h.grad.add_in_place(matmul_tn(c.x, pre_cand));
    cell.u_h.grad.add_in_place(matmul_tn(c.reset_hidden, pre_cand));
    Matrix grad_x = matmul_nt(pre_cand, cell.w_h.value);
    const Matrix grad_reset_hidden = matmul_nt(pre_cand, cell.u_h.value);
    const Matrix grad_r = hadamard(grad_reset_hidden, c.h_prev);
    grad_h_prev.add_in_place(hadamard(grad_reset_hidden, c.r));

    const Matrix pre_z = logistic_backprop(grad_z, c.z);
    cell.w_z.grad.add_in_place(matmul_tn(c.x, pre_z));
    cell.u_z.grad.add_in_place(matmul_tn(c.h_prev, pre_z));
    grad_x.add_in_place(matmul_nt(pre_z, cell.w_z.value));
    grad_h_prev.add_in_place(matmul_nt(pre_z, cell.u_z.value));

    const Matrix pre_r = logistic_backprop(grad_r, c.r);
    cell.w_r.grad.add_in_place(matmul_tn(c.x, pre_r));
    cell.u_r.grad.add_in_place(matmul_tn(c.h_prev, pre_r));
    grad_x.add_in_place(matmul_nt(pre_r, cell.w_r.value));
    grad_h_prev.add_in_place(matmul_nt(pre_r, cell.u_r.value));

    return {std::move(grad_x), std::move(grad_h_prev)};
}

Matrix affine_forward(const Matrix& x, const Parameter& w, const Parameter& b) {
    require(b.rows() == 1 && b.cols() == w.cols(),
            "affine: bias " + b.value.shape_string() + " does not match weight " +
                w.value.shape_string());
    Matrix out = matmul(x, w.value);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            out(i, j) += b.value(0, j);
        }
    }
    require_finite(out, "affine");
    return out;
}

Matrix affine_backward(const Matrix& x, const Matrix& grad_out, Parameter& w, Parameter& b) {
    require(grad_out.rows() == x.rows() && grad_out.cols() == w.cols(),
            "affine_backward: gradient " + grad_out.shape_string() + " does not match");
    w.grad.add_in_place(matmul_tn(x, grad_out));
    for (std::size_t i = 0; i < grad_out.rows(); ++i) {
        for (std::size_t j = 0; j < grad_out.cols(); ++j) {
            b.grad(0, j) += grad_out(i, j);
        }
    }
    return matmul_nt(grad_out, w.value);
}

Decoder Decoder::init(std::size_t d_in, std::size_t horizon, std::size_t d_out, RngStream& rng) {
    if (d_in == 0 || horizon == 0 || d_out == 0) {
        throw config_error("Decoder: dimensions and horizon must be at least 1");
    }
    Decoder d;
    d.w = Parameter(glorot_uniform(d_in, horizon * d_out, rng));
    d.b = Parameter(Matrix(1, horizon * d_out));
    d.horizon = horizon;
    d.d_out = d_out;
    return d;
}

Matrix decode(const Matrix& h_fused, const Decoder& dec) {
    require(h_fused.cols() == dec.d_in(), "decode: hidden " + h_fused.shape_string() +
                                              " does not match W_dec " + dec.w.value.shape_string());
    require(dec.w.cols() == dec.horizon * dec.d_out, "decode: W_dec width is not horizon * d_out");
    return affine_forward(h_fused, dec.w, dec.b);
}

Matrix decode_backward(const Matrix& h_fused, const Matrix& grad_out, Decoder& dec) {
    return affine_backward(h_fused, grad_out, dec.w, dec.b);
}

} // namespace stgnn
