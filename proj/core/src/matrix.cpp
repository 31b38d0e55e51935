#include "stgnn/matrix.hpp"

#include "stgnn/error.hpp"

#include <algorithm>
#include <cmath>

namespace stgnn {

namespace {

[[noreturn]] void shape_mismatch(const char* op, const Matrix& a, const Matrix& b) {
    throw dimension_error(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                          b.shape_string());
}

double logistic(double x) {
    // split by sign so exp never overflows
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) {
        throw dimension_error("Matrix: " + std::to_string(data_.size()) +
                              " values do not fill shape (" + std::to_string(rows) + "x" +
                              std::to_string(cols) + ")");
    }
    require_finite(*this, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw dimension_error("Matrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(*this, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Matrix::add_in_place(const Matrix& other) {
    if (!same_shape(other)) {
        shape_mismatch("add_in_place", *this, other);
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
}

void Matrix::scale_in_place(double factor) {
    for (double& v : data_) {
        v *= factor;
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        shape_mismatch("matmul", a, b);
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* orow = o.data() + i * n;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            const double* brow = bv.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    require_finite(out, "matmul");
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        shape_mismatch("matmul_tn", a, b);
    }
    Matrix out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* brow = bv.data() + k * n;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) {
                continue;
            }
            double* orow = o.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                orow[j] += aki * brow[j];
            }
        }
    }
    require_finite(out, "matmul_tn");
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        shape_mismatch("matmul_nt", a, b);
    }
    Matrix out(a.rows(), b.rows());
    const std::size_t inner = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const auto brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < inner; ++k) {
                acc += arow[k] * brow[k];
            }
            out(i, j) = acc;
        }
    }
    require_finite(out, "matmul_nt");
    return out;
}

Matrix elementwise(Elementwise op, const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        shape_mismatch("elementwise", a, b);
    }
    Matrix out(a.rows(), a.cols());
    auto o = out.values();
    auto av = a.values();
    auto bv = b.values();
    switch (op) {
    case Elementwise::add:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
        break;
    case Elementwise::sub:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] - bv[i];
        break;
    case Elementwise::hadamard:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
        break;
    }
    require_finite(out, "elementwise");
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) { return elementwise(Elementwise::add, a, b); }
Matrix sub(const Matrix& a, const Matrix& b) { return elementwise(Elementwise::sub, a, b); }
Matrix hadamard(const Matrix& a, const Matrix& b) {
    return elementwise(Elementwise::hadamard, a, b);
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    out.scale_in_place(factor);
    require_finite(out, "scale");
    return out;
}

Matrix activate(Activation kind, const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    auto o = out.values();
    auto av = a.values();
    switch (kind) {
    case Activation::logistic:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = logistic(av[i]);
        break;
    case Activation::tanh:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(av[i]);
        break;
    case Activation::relu:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] > 0.0 ? av[i] : 0.0;
        break;
    }
    require_finite(out, "activate");
    return out;
}

Matrix activation_derivative(Activation kind, const Matrix& output) {
    Matrix out(output.rows(), output.cols());
    auto o = out.values();
    auto y = output.values();
    switch (kind) {
    case Activation::logistic:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = y[i] * (1.0 - y[i]);
        break;
    case Activation::tanh:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = 1.0 - y[i] * y[i];
        break;
    case Activation::relu:
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = y[i] > 0.0 ? 1.0 : 0.0;
        break;
    }
    return out;
}

double squared_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.values()) {
        s += v * v;
    }
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        shape_mismatch("max_abs_diff", a, b);
    }
    double m = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) {
        m = std::max(m, std::abs(av[i] - bv[i]));
    }
    return m;
}

void require_finite(const Matrix& a, const char* what) {
    for (double v : a.values()) {
        if (!std::isfinite(v)) {
            throw numeric_error(std::string(what) + ": non-finite value in result " +
                                a.shape_string());
        }
    }
}

std::string to_string(Activation kind) {
    switch (kind) {
    case Activation::logistic: return "logistic";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    }
    return "unknown";
}

Activation activation_from_string(const std::string& name) {
    if (name == "logistic") return Activation::logistic;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw config_error("unknown activation '" + name + "' (expected logistic, tanh or relu)");
}

} // namespace stgnn
