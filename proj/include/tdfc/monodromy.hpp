#pragma once

#include <string>

#include "tdfc/gain.hpp"
#include "tdfc/linalg.hpp"

namespace tdfc {

/// Derivative of the period-3tau return map of the linearized closed loop,
/// taken at phase 0 of the gain schedule (start of the off window).
struct MonodromyReport {
    Matrix M;
    Spectrum multipliers;
    double spectralRadius = 0.0;
    bool stable = false;
};

/// M = e^{3 A tau} + int_0^tau e^{A(tau-u)} K (e^{A u} - e^{A(u+tau)}) du.
/// Exact in finite dimensions: during the active window [2tau, 3tau) the
/// delayed arguments fall inside the free phase of the same period, so no
/// history before the period start is ever consulted.
MonodromyReport monodromy_matrix(const Matrix& A, const Matrix& K, double tau,
                                 double quad_tol = 1e-10);

struct CertifyResult {
    MonodromyReport report;
    std::vector<double> deviations; // |multiplier - expected| per mode slot
    double max_deviation = 0.0;
    bool certified = false; // max deviation <= 1e-7
};

CertifyResult certify(const ControllerDesign& design);

/// Structured text summary (multipliers, radius, certified flag).
std::string summary(const CertifyResult& result);

} // namespace tdfc
