#include <doctest.h>

#include <Eigen/Dense>

#include <cstring>
#include <random>

#include "tdfc/linalg.hpp"
#include "tdfc/systems.hpp"
#include "test_util.hpp"

using namespace tdfc;

namespace {

Matrix double_scroll_A2() {
    return chua({9.3515, 14.79, 0.0, -1.138, -0.722}).jacobian(Vector::Zero(3));
}

// Taylor-series exponential, the independent oracle for small norms.
Matrix taylor_expm(const Matrix& B, int terms = 40) {
    Matrix sum = Matrix::Identity(B.rows(), B.cols());
    Matrix term = sum;
    for (int k = 1; k <= terms; ++k) {
        term = (term * B / static_cast<double>(k)).eval();
        sum += term;
    }
    return sum;
}

} // namespace

TEST_CASE("eig: double scroll origin eigenvalues") {
    const Spectrum s = eig(double_scroll_A2());
    REQUIRE(s.values.size() == 3);
    CHECK(std::abs(s.values[0] - Complex(2.2407, 0.0)) < 1e-3);
    CHECK(std::abs(s.values[1] - Complex(-0.9751, 2.7508)) < 1e-3);
    CHECK(std::abs(s.values[2] - Complex(-0.9751, -2.7508)) < 1e-3);
    CHECK(s.pairing[0] == 0);
    CHECK(s.pairing[1] == 2);
    CHECK(s.pairing[2] == 1);
}

TEST_CASE("eig: double hook origin eigenvalues") {
    const Matrix A = chua({-6.0, -4.442, 0.0, -2.265, -0.93}).jacobian(Vector::Zero(3));
    const Spectrum s = eig(A);
    CHECK(std::abs(s.values[0] - Complex(1.4336, 0.0)) < 1e-3);
    CHECK(std::abs(s.values[1] - Complex(-3.7467, 0.0)) < 1e-3);
    CHECK(std::abs(s.values[2] - Complex(-6.2768, 0.0)) < 1e-3);
}

TEST_CASE("eig: identity") {
    const Spectrum s = eig(Matrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) {
        CHECK(s.values[i] == Complex(1.0, 0.0));
        CHECK(s.multiplicities[i] == 3);
        CHECK(s.pairing[i] == i);
    }
}

TEST_CASE("eig: deterministic ordering and conjugate pairing") {
    std::mt19937 rng(7101);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix A = testutil::random_matrix(rng, n);
        Spectrum a, b;
        try {
            a = eig(A);
            b = eig(A);
        } catch (const std::runtime_error&) {
            continue;
        }
        CHECK(std::memcmp(a.values.data(), b.values.data(), sizeof(Complex) * a.values.size()) == 0);
        for (int i = 0; i + 1 < n; ++i) {
            const Complex &x = a.values[i], &y = a.values[i + 1];
            const bool ordered = x.real() > y.real() ||
                                 (x.real() == y.real() &&
                                  (std::abs(x.imag()) < std::abs(y.imag()) ||
                                   (std::abs(x.imag()) == std::abs(y.imag()) &&
                                    x.imag() >= y.imag())));
            CHECK(ordered);
        }
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(std::conj(a.values[i]) - a.values[a.pairing[i]]) <= 1e-12);
    }
}

TEST_CASE("eig: rejects non-square input") {
    CHECK_THROWS_AS(eig(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("real_block_form: canonical matrix is a fixed point") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 2.2407;
    A(1, 1) = A(2, 2) = -0.9751;
    A(1, 2) = -2.7508;
    A(2, 1) = 2.7508;
    const RealBlockForm bf = real_block_form(A);
    CHECK(bf.V == Matrix::Identity(3, 3));
    CHECK(bf.D == A);
    REQUIRE(bf.layout.size() == 2);
    CHECK(bf.layout[0].kind == BlockKind::Real);
    CHECK(bf.layout[1].kind == BlockKind::Complex);
}

TEST_CASE("real_block_form: double scroll block form") {
    const RealBlockForm bf = real_block_form(double_scroll_A2());
    CHECK(std::abs(bf.D(0, 0) - 2.2407) < 1e-3);
    CHECK(std::abs(bf.D(1, 1) + 0.9751) < 1e-3);
    CHECK(std::abs(bf.D(1, 2) + 2.7508) < 1e-3);
    CHECK(std::abs(bf.D(2, 1) - 2.7508) < 1e-3);
    CHECK(bf.D(2, 1) > 0.0);
}

TEST_CASE("real_block_form: reconstruction residual on random matrices") {
    std::mt19937 rng(40224);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix A = testutil::random_hyperbolic(rng, n);
        const RealBlockForm bf = real_block_form(A);
        const Matrix reconstructed = bf.V.partialPivLu().solve(bf.D * bf.V);
        CHECK(frobenius(A - reconstructed) <= 1e-8 * frobenius(A));
        CHECK(frobenius(bf.V * A * bf.V.partialPivLu().inverse() - bf.D) <=
              1e-10 * std::max(1.0, frobenius(A)));
    }
}

TEST_CASE("real_block_form: defective matrix refused without the Jordan flag") {
    Matrix A(2, 2);
    A << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(real_block_form(A), std::runtime_error);

    BlockFormOptions opts;
    opts.assume_exact_jordan = true;
    const RealBlockForm bf = real_block_form(A, opts);
    CHECK(bf.V == Matrix::Identity(2, 2));
    CHECK(bf.D == Matrix::Identity(2, 2));
    REQUIRE(bf.layout.size() == 2);
    CHECK(bf.spectrum.values[0] == Complex(1.0, 0.0));
}

TEST_CASE("real_block_form: malformed exact Jordan input") {
    Matrix A(2, 2);
    A << 1.0, 2.0, 0.0, 1.0; // superdiagonal entry must be 0 or 1
    BlockFormOptions opts;
    opts.assume_exact_jordan = true;
    CHECK_THROWS_AS(real_block_form(A, opts), std::invalid_argument);
}

TEST_CASE("expm: zero matrix") {
    const Matrix E = expm(Matrix::Zero(4, 4), 3.7);
    CHECK(frobenius(E - Matrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("expm: diagonal case") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << -2.0, 0.5, 1.7;
    const double t = 1.3;
    const Matrix E = expm(A, t);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(E(i, i) - std::exp(A(i, i) * t)) < 1e-13 * std::exp(A(i, i) * t));
    CHECK(std::abs(E(0, 1)) + std::abs(E(1, 2)) + std::abs(E(2, 0)) < 1e-14);
}

TEST_CASE("expm: agrees with the Taylor oracle at small norm") {
    std::mt19937 rng(90125);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = testutil::random_matrix(rng, 4, 0.4);
        CHECK(frobenius(expm(A, 1.0) - taylor_expm(A)) < 1e-13);
    }
}

TEST_CASE("expm: semigroup property") {
    std::mt19937 rng(777);
    const Matrix A = testutil::random_matrix(rng, 4, 2.0);
    const double s = 0.7, t = 1.9;
    const Matrix lhs = expm(A, s + t);
    const Matrix rhs = expm(A, s) * expm(A, t);
    CHECK(frobenius(lhs - rhs) < 1e-10 * frobenius(lhs));
}

TEST_CASE("expm: inverse pairing up to ||At|| = 20") {
    // normal matrices keep the exponential well conditioned, so the
    // inverse-pairing tolerance is meaningful all the way to ||At|| = 20
    std::mt19937 rng(4242);
    Eigen::HouseholderQR<Matrix> qr(testutil::random_matrix(rng, 5));
    const Matrix Q = qr.householderQ();
    Matrix D = Matrix::Zero(5, 5);
    D(0, 0) = -1.1;
    D(1, 1) = D(2, 2) = 0.4;
    D(1, 2) = -1.9;
    D(2, 1) = 1.9;
    D(3, 3) = 0.9;
    D(4, 4) = -0.3;
    const Matrix A = Q.transpose() * D * Q;
    for (double norm_target : {5.0, 10.0, 20.0}) {
        const double t = norm_target / frobenius(A);
        CHECK(frobenius(expm(A, t) * expm(-A, t) - Matrix::Identity(5, 5)) < 1e-10);
    }
}

TEST_CASE("expm: overflow is reported") {
    Matrix A(1, 1);
    A << 1000.0;
    CHECK_THROWS_AS(expm(A, 1.0), std::runtime_error);
}

TEST_CASE("integrate_matrix: constant integrand") {
    const Matrix C = Matrix::Constant(2, 2, 3.25);
    const Matrix I1 = integrate_matrix([&](double) { return C; }, -1.0, 2.5, 1e-12);
    CHECK(frobenius(I1 - 3.5 * C) < 1e-12);
}

TEST_CASE("integrate_matrix: closed-form antiderivative for a diagonal exponential") {
    Matrix A = Matrix::Zero(2, 2);
    A.diagonal() << -1.2, 0.8;
    const double a = 0.0, b = 2.0, tol = 1e-11;
    const Matrix got = integrate_matrix([&](double s) { return expm(A, s); }, a, b, tol);
    Matrix want = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        want(i, i) = (std::exp(A(i, i) * b) - std::exp(A(i, i) * a)) / A(i, i);
    CHECK(frobenius(got - want) < tol * 10);
}

TEST_CASE("integrate_matrix: tolerance tightening is self-consistent") {
    std::mt19937 rng(5150);
    const Matrix A = testutil::random_matrix(rng, 3);
    auto f = [&](double s) { return expm(A, s); };
    const Matrix loose = integrate_matrix(f, 0.0, 1.5, 1e-8);
    const Matrix tight = integrate_matrix(f, 0.0, 1.5, 1e-10);
    CHECK((loose - tight).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("integrate_matrix: degenerate and invalid intervals") {
    auto f = [](double) { return Matrix::Identity(2, 2).eval(); };
    CHECK(integrate_matrix(f, 1.0, 1.0, 1e-10) == Matrix::Zero(2, 2));
    CHECK_THROWS_AS(integrate_matrix(f, 1.0, 0.0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(integrate_matrix(f, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("integrate_matrix: reports non-convergence within the panel cap") {
    // kink at an irrational point keeps panel doubling from ever settling
    // at an unreachable tolerance
    auto f = [](double s) {
        return (std::abs(s - 1.0 / M_PI) * Matrix::Identity(1, 1)).eval();
    };
    CHECK_THROWS_AS(integrate_matrix(f, 0.0, 1.0, 1e-18), std::runtime_error);
}
