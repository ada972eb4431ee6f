#pragma once

#include <optional>
#include <vector>

#include "tdfc/linalg.hpp"

namespace tdfc {

/// Target closed-loop multiplier for one unstable mode: a real zeta for a
/// real eigenvalue (or a repeated one in exact Jordan form), or a modulus
/// rho and angle theta for a complex pair. theta left empty means
/// arctan(omega/mu) is filled in at synthesis time.
struct ModeTarget {
    enum class Kind { Real, Complex, Jordan };
    int mode = 0; // block index in RealBlockForm::layout
    Kind kind = Kind::Real;
    double zeta = 0.0;
    double rho = 0.0;
    std::optional<double> theta;
};

struct ControllerDesign {
    Matrix A;
    double tau = 0.0;
    RealBlockForm blockForm;
    std::vector<ModeTarget> targets; // theta resolved, one per unstable block
    Matrix Ktilde;
    Matrix K;
};

/// Gain for a scalar unstable rate lambda > 0 placing the period-3tau
/// multiplier at zeta: eps = e^{-lambda tau} (e^{3 lambda tau} - zeta)
/// / (tau (e^{lambda tau} - 1)).
double scalar_gain(double lambda, double tau, double zeta);

/// Complex extension of the scalar formula with lambda = mu + i omega and
/// zeta = rho e^{i theta}; returns (Re eps, Im eps).
std::pair<double, double> complex_gain(double mu, double omega, double tau, double rho,
                                       double theta);

/// Jordan-case gain: same formula as scalar_gain, applied as eps * I on the
/// whole chain.
double jordan_gain(double lambda, double tau, double zeta);

/// Exact derivative of the period-3tau map for the 2x2 Jordan block
/// [[lambda, 1], [0, lambda]] under the gain eps * I.
Matrix jordan_period_map(double lambda, double tau, double eps);

struct SynthesisOptions {
    BlockFormOptions blockForm;
    double tol_hyp = 1e-7; // relative hyperbolicity margin
};

/// Assemble the block gain Ktilde (zero on stable blocks, eps on unstable
/// real blocks, [[e1, -e2], [e2, e1]] on unstable pairs) and recover
/// K = V^-1 Ktilde V in original coordinates.
ControllerDesign synthesize(const Matrix& A, double tau, std::vector<ModeTarget> targets,
                            const SynthesisOptions& opts = {});

/// Closed-loop multipliers the design is certified against: targets on
/// unstable blocks, e^{3 lambda tau} on stable ones.
std::vector<Complex> expected_multipliers(const ControllerDesign& design);

} // namespace tdfc
