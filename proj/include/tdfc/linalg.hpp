#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace tdfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Eigenvalues of a real matrix in a deterministic order: descending real
/// part, then ascending |Im|, with the +omega member of a conjugate pair
/// listed before its conjugate. Values whose imaginary part is below
/// tol_imag * ||A||_F are snapped to the real axis.
struct Spectrum {
    std::vector<Complex> values;     // n entries, counted with multiplicity
    std::vector<int> multiplicities; // cluster size per entry
    std::vector<int> pairing;        // index of the conjugate; self for real
};

enum class BlockKind { Real, Complex };

struct Block {
    BlockKind kind;
    int start; // index of the first coordinate of the block
    int size;  // 1 or 2
};

/// Real block-diagonalization A = V^-1 D V with 1x1 blocks for real
/// eigenvalues and [[mu, -omega], [omega, mu]] blocks (omega > 0) for
/// complex pairs. V maps original coordinates to block coordinates.
struct RealBlockForm {
    Matrix V;
    Matrix D;
    std::vector<Block> layout;
    Spectrum spectrum;
};

struct EigOptions {
    double tol_imag = 1e-9;    // relative to ||A||_F
    double tol_cluster = 1e-8; // relative, for multiplicity counting
};

Spectrum eig(const Matrix& A, const EigOptions& opts = {});

struct BlockFormOptions {
    EigOptions eig;
    double cond_cap = 1e8;          // eigenvector conditioning cap
    bool assume_exact_jordan = false; // trust A as an exact real Jordan form
};

RealBlockForm real_block_form(const Matrix& A, const BlockFormOptions& opts = {});

/// e^{A t} by scaling-and-squaring with a degree-13 Pade approximant.
Matrix expm(const Matrix& A, double t = 1.0);

/// Composite 4-point Gauss-Legendre integration of a matrix-valued
/// integrand over [a, b], panel-doubling until the entrywise change is
/// below tol. Starts at 64 panels.
Matrix integrate_matrix(const std::function<Matrix(double)>& f, double a, double b,
                        double tol);

double frobenius(const Matrix& A);

} // namespace tdfc
