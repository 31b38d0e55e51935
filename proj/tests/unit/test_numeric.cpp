#include "stgnn/error.hpp"
#include "stgnn/grad_check.hpp"
#include "stgnn/matrix.hpp"
#include "stgnn/parameter.hpp"
#include "stgnn/rng.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

using namespace stgnn;
using stgnn::testing::random_matrix;

namespace {

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

} // namespace

TEST_SUITE("matrix") {

TEST_CASE("matmul identity, zero and hand cases") {
    const Matrix b{{5, 6}, {7, 8}};
    CHECK(matmul(Matrix::identity(2), b) == b);

    RngStream rng(1);
    const Matrix any = random_matrix(2, 5, rng);
    CHECK(matmul(Matrix::zeros(2, 2), any) == Matrix::zeros(2, 5));

    const Matrix a{{1, 2}, {3, 4}};
    CHECK(matmul(a, b) == Matrix{{19, 22}, {43, 50}});
}

TEST_CASE("matmul agrees with a triple loop on random shapes") {
    RngStream rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t r = 1 + rng.below(6), k = 1 + rng.below(6), c = 1 + rng.below(6);
        const Matrix a = random_matrix(r, k, rng), b = random_matrix(k, c, rng);
        CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) < 1e-12);
        CHECK(max_abs_diff(matmul_tn(a.transpose(), b), naive_matmul(a, b)) < 1e-12);
        CHECK(max_abs_diff(matmul_nt(a, b.transpose()), naive_matmul(a, b)) < 1e-12);
    }
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), dimension_error);
    CHECK_THROWS_AS(matmul_tn(Matrix(2, 3), Matrix(3, 3)), dimension_error);
    CHECK_THROWS_AS(matmul_nt(Matrix(2, 3), Matrix(3, 2)), dimension_error);
}

TEST_CASE("elementwise ops") {
    RngStream rng(3);
    const Matrix a = random_matrix(3, 4, rng);
    CHECK(hadamard(a, Matrix::ones(3, 4)) == a);
    CHECK(sub(a, a) == Matrix::zeros(3, 4));
    CHECK(hadamard(Matrix{{2, 3}}, Matrix{{4, 5}}) == Matrix{{8, 15}});
    CHECK(elementwise(Elementwise::add, Matrix{{1, 2}}, Matrix{{3, 4}}) == Matrix{{4, 6}});
    CHECK_THROWS_AS(add(Matrix(2, 2), Matrix(2, 3)), dimension_error);
}

TEST_CASE("activations") {
    CHECK(activate(Activation::logistic, Matrix{{0}})(0, 0) == 0.5);
    CHECK(activate(Activation::tanh, Matrix{{0}})(0, 0) == 0.0);
    CHECK(activate(Activation::relu, Matrix{{-1, 2}}) == Matrix{{0, 2}});

    RngStream rng(4);
    const Matrix x = random_matrix(5, 5, rng, -40.0, 40.0);
    const Matrix s = add(activate(Activation::logistic, x), activate(Activation::logistic, scale(x, -1.0)));
    for (double v : s.values()) CHECK(std::abs(v - 1.0) <= 1e-12);
}

TEST_CASE("activation derivative from outputs") {
    const Matrix y = activate(Activation::logistic, Matrix{{0.3}});
    CHECK(activation_derivative(Activation::logistic, y)(0, 0) ==
          doctest::Approx(y(0, 0) * (1 - y(0, 0))));
    const Matrix t = activate(Activation::tanh, Matrix{{0.3}});
    CHECK(activation_derivative(Activation::tanh, t)(0, 0) == doctest::Approx(1 - t(0, 0) * t(0, 0)));
    CHECK(activation_derivative(Activation::relu, Matrix{{0.0, 2.0}}) == Matrix{{0, 1}});
}

TEST_CASE("associativity and transpose identities") {
    RngStream rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = random_matrix(4, 4, rng), b = random_matrix(4, 4, rng),
                     c = random_matrix(4, 4, rng);
        CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) <= 1e-9);
        CHECK(add(a, b).transpose() == add(a.transpose(), b.transpose()));
        CHECK(max_abs_diff(matmul(a, b).transpose(), matmul(b.transpose(), a.transpose())) <= 1e-9);
    }
}

TEST_CASE("non-finite values are rejected") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Matrix(1, 1, std::vector<double>{std::nan("")}), numeric_error);
    CHECK_THROWS_AS(scale(Matrix{{1e308}}, 10.0), numeric_error);
    CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1.0, inf}), numeric_error);
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0}), dimension_error);
}

TEST_CASE("activation names") {
    for (auto a : {Activation::logistic, Activation::tanh, Activation::relu}) {
        CHECK(activation_from_string(to_string(a)) == a);
    }
    CHECK_THROWS_AS(activation_from_string("gelu"), config_error);
}

} // TEST_SUITE

TEST_SUITE("rng") {

TEST_CASE("seed 42 matches the golden sequence") {
    std::ifstream in(STGNN_FIXTURE_DIR "/rng_seed42.txt");
    REQUIRE(in.good());
    RngStream rng(42);
    std::size_t n = 0;
    std::uint64_t expected = 0;
    while (in >> expected) {
        CHECK(rng.next_u64() == expected);
        ++n;
    }
    CHECK(n == 100);
}

TEST_CASE("uniform, normal and below stay in range") {
    RngStream rng(9);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.05);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("seeds give distinct deterministic streams") {
    RngStream a(1), b(1), c(2);
    for (int i = 0; i < 10; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
    RngStream zero(0);
    CHECK(zero.state() != 0);
}

} // TEST_SUITE

TEST_SUITE("parameter") {

TEST_CASE("glorot uniform respects its bound") {
    RngStream rng(3);
    const Matrix w = glorot_uniform(30, 10, rng);
    const double s = std::sqrt(6.0 / 40.0);
    double max_abs = 0.0;
    for (double v : w.values()) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs <= s);
    CHECK(max_abs > 0.8 * s);
}

TEST_CASE("assign resets gradient and moments") {
    Parameter p(Matrix{{1, 2}});
    p.grad = Matrix{{3, 4}};
    p.adam_m = Matrix{{5, 6}};
    p.assign(Matrix{{7, 8}});
    CHECK(p.value == Matrix{{7, 8}});
    CHECK(p.grad == Matrix::zeros(1, 2));
    CHECK(p.adam_m == Matrix::zeros(1, 2));
    CHECK(p.adam_v == Matrix::zeros(1, 2));
}

} // TEST_SUITE

TEST_SUITE("grad_check") {

TEST_CASE("quadratic is exact") {
    Parameter theta(Matrix{{3.0}});
    theta.grad = Matrix{{6.0}};
    Parameter* ps[] = {&theta};
    const double err = grad_check([&] { return theta.value(0, 0) * theta.value(0, 0); }, ps, 1e-5);
    CHECK(err < 1e-10);
    CHECK(theta.value(0, 0) == 3.0);
}

TEST_CASE("constant function with zero gradients") {
    Parameter a(Matrix{{1.0, -2.0}, {0.5, 4.0}});
    Parameter* ps[] = {&a};
    CHECK(grad_check([] { return 7.0; }, ps, 1e-5) < 1e-10);
}

TEST_CASE("a wrong gradient is detected") {
    Parameter theta(Matrix{{3.0}});
    theta.grad = Matrix{{5.0}};
    Parameter* ps[] = {&theta};
    CHECK(grad_check([&] { return theta.value(0, 0) * theta.value(0, 0); }, ps, 1e-5) > 1e-2);
}

TEST_CASE("invalid eps and non-finite objective") {
    Parameter theta(Matrix{{1.0}});
    Parameter* ps[] = {&theta};
    CHECK_THROWS_AS(grad_check([] { return 0.0; }, ps, 0.0), config_error);
    CHECK_THROWS_AS(grad_check([] { return std::nan(""); }, ps, 1e-5), numeric_error);
}

} // TEST_SUITE
