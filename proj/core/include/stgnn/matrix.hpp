#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stgnn {

/// Dense row-major matrix of doubles.
///
/// Every public operation that produces a matrix checks that the result is
/// finite and throws numeric_error otherwise, so a Matrix handed out by the
/// library never holds NaN or Inf.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::span<const double> row(std::size_t r) const noexcept {
        return std::span<const double>(data_).subspan(r * cols_, cols_);
    }

    Matrix transpose() const;
    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_string() const;

    void fill(double v);
    void add_in_place(const Matrix& other);
    void scale_in_place(double factor);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Elementwise { add, sub, hadamard };
enum class Activation { logistic, tanh, relu };

Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ · b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a · bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix elementwise(Elementwise op, const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

Matrix activate(Activation kind, const Matrix& a);
/// Derivative of the activation expressed through its output y = act(x).
/// relu′ uses y > 0, so the derivative at exactly zero is taken as 0.
Matrix activation_derivative(Activation kind, const Matrix& output);

/// Sum of squares of all entries.
double squared_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Throws numeric_error naming `what` if any entry is non-finite.
void require_finite(const Matrix& a, const char* what);

std::string to_string(Activation kind);
Activation activation_from_string(const std::string& name);

} // namespace stgnn
