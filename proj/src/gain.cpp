#include "tdfc/gain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace tdfc {

double scalar_gain(double lambda, double tau, double zeta) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("scalar_gain: lambda must be positive (stable modes get "
                                    "zero gain, not this formula)");
    if (!(tau > 0.0)) throw std::invalid_argument("scalar_gain: tau must be positive");
    const double elt = std::exp(lambda * tau);
    return std::exp(-lambda * tau) * (std::exp(3.0 * lambda * tau) - zeta) /
           (tau * (elt - 1.0));
}

std::pair<double, double> complex_gain(double mu, double omega, double tau, double rho,
                                       double theta) {
    if (!(mu > 0.0)) throw std::invalid_argument("complex_gain: mu must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("complex_gain: tau must be positive");
    const Complex lam(mu, omega);
    const Complex zeta = rho * std::polar(1.0, theta);
    const Complex elt = std::exp(lam * tau);
    const Complex eps = std::exp(-lam * tau) * (std::exp(3.0 * lam * tau) - zeta) /
                        (tau * (elt - 1.0));
    return {eps.real(), eps.imag()};
}

double jordan_gain(double lambda, double tau, double zeta) {
    return scalar_gain(lambda, tau, zeta);
}

Matrix jordan_period_map(double lambda, double tau, double eps) {
    const double elt = std::exp(lambda * tau);
    const double e2 = elt * elt, e3 = e2 * elt;
    Matrix P(2, 2);
    P(0, 0) = P(1, 1) = e3 + eps * tau * elt * (1.0 - elt);
    P(0, 1) = 3.0 * tau * e3 + eps * tau * tau * (elt - 2.0 * e2);
    P(1, 0) = 0.0;
    return P;
}

namespace {

Complex block_eigenvalue(const RealBlockForm& bf, const Block& b) {
    if (b.kind == BlockKind::Real) return Complex(bf.D(b.start, b.start), 0.0);
    return Complex(bf.D(b.start, b.start), bf.D(b.start + 1, b.start));
}

} // namespace

ControllerDesign synthesize(const Matrix& A, double tau, std::vector<ModeTarget> targets,
                            const SynthesisOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("synthesize: tau must be positive");
    ControllerDesign design;
    design.A = A;
    design.tau = tau;
    design.blockForm = real_block_form(A, opts.blockForm);
    const RealBlockForm& bf = design.blockForm;
    const int n = static_cast<int>(A.rows());

    const double margin = opts.tol_hyp * frobenius(A);
    for (const Block& b : bf.layout) {
        if (std::abs(block_eigenvalue(bf, b).real()) < margin)
            throw std::invalid_argument("synthesize: matrix is not hyperbolic (|Re lambda| "
                                        "below tolerance)");
    }

    std::vector<int> target_of_block(bf.layout.size(), -1);
    for (size_t t = 0; t < targets.size(); ++t) {
        const ModeTarget& mt = targets[t];
        if (mt.mode < 0 || mt.mode >= static_cast<int>(bf.layout.size()))
            throw std::invalid_argument("synthesize: target mode index out of range");
        if (target_of_block[mt.mode] >= 0)
            throw std::invalid_argument("synthesize: duplicate target for one mode");
        const Block& b = bf.layout[mt.mode];
        const Complex lam = block_eigenvalue(bf, b);
        if (lam.real() < 0.0)
            throw std::invalid_argument("synthesize: target supplied for a stable mode");
        const bool real_kind = mt.kind == ModeTarget::Kind::Real ||
                               mt.kind == ModeTarget::Kind::Jordan;
        if (real_kind != (b.kind == BlockKind::Real))
            throw std::invalid_argument("synthesize: target kind does not match the mode");
        if (real_kind) {
            if (!(std::abs(mt.zeta) < 1.0))
                throw std::invalid_argument("synthesize: |zeta| must be < 1");
        } else {
            if (!(mt.rho >= 0.0 && mt.rho < 1.0))
                throw std::invalid_argument("synthesize: rho must lie in [0, 1)");
            if (mt.theta && !(*mt.theta >= 0.0 && *mt.theta < 2.0 * M_PI))
                throw std::invalid_argument("synthesize: theta must lie in [0, 2*pi)");
        }
        target_of_block[mt.mode] = static_cast<int>(t);
    }
    for (size_t bi = 0; bi < bf.layout.size(); ++bi) {
        const bool unstable = block_eigenvalue(bf, bf.layout[bi]).real() > 0.0;
        if (unstable && target_of_block[bi] < 0)
            throw std::invalid_argument("synthesize: missing target for unstable mode " +
                                        std::to_string(bi));
    }

    Matrix Kt = Matrix::Zero(n, n);
    for (size_t bi = 0; bi < bf.layout.size(); ++bi) {
        if (target_of_block[bi] < 0) continue;
        ModeTarget& mt = targets[target_of_block[bi]];
        const Block& b = bf.layout[bi];
        const Complex lam = block_eigenvalue(bf, b);
        if (b.kind == BlockKind::Real) {
            Kt(b.start, b.start) = scalar_gain(lam.real(), tau, mt.zeta);
        } else {
            if (!mt.theta) mt.theta = std::atan(lam.imag() / lam.real());
            auto [e1, e2] = complex_gain(lam.real(), lam.imag(), tau, mt.rho, *mt.theta);
            Kt(b.start, b.start) = e1;
            Kt(b.start, b.start + 1) = -e2;
            Kt(b.start + 1, b.start) = e2;
            Kt(b.start + 1, b.start + 1) = e1;
        }
    }

    std::sort(targets.begin(), targets.end(),
              [](const ModeTarget& a, const ModeTarget& b) { return a.mode < b.mode; });
    design.targets = std::move(targets);
    design.Ktilde = Kt;
    design.K = bf.V.partialPivLu().solve(Kt * bf.V);
    return design;
}

std::vector<Complex> expected_multipliers(const ControllerDesign& design) {
    const RealBlockForm& bf = design.blockForm;
    std::vector<Complex> expected;
    for (size_t bi = 0; bi < bf.layout.size(); ++bi) {
        const Block& b = bf.layout[bi];
        const Complex lam = block_eigenvalue(bf, b);
        const ModeTarget* mt = nullptr;
        for (const ModeTarget& t : design.targets)
            if (t.mode == static_cast<int>(bi)) mt = &t;
        if (b.kind == BlockKind::Real) {
            expected.push_back(lam.real() > 0.0 && mt
                                   ? Complex(mt->zeta, 0.0)
                                   : std::exp(3.0 * lam.real() * design.tau));
        } else {
            if (lam.real() > 0.0 && mt) {
                const Complex z = mt->rho * std::polar(1.0, mt->theta.value_or(0.0));
                expected.push_back(z);
                expected.push_back(std::conj(z));
            } else {
                expected.push_back(std::exp(3.0 * lam * design.tau));
                expected.push_back(std::exp(3.0 * std::conj(lam) * design.tau));
            }
        }
    }
    return expected;
}

} // namespace tdfc
