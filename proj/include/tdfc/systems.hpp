#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tdfc/linalg.hpp"

namespace tdfc {

/// Chua oscillator parameters (dimensionless form). gamma = 0 gives the
/// circuit family that hosts the double scroll and double hook attractors.
struct ChuaParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double m0 = 0.0;
    double m1 = 0.0;
};

struct SystemModel {
    int dim = 0;
    std::string name;
    std::function<Vector(const Vector&)> rhs;
    std::function<Matrix(const Vector&)> jacobian;
    std::vector<Vector> equilibria;
    std::string diagnostics; // e.g. excluded outer equilibria
};

/// Piecewise-linear Chua system. rhs uses the regional matrices
///   A2 x              on |x1| <= 1 (boundary points take this branch),
///   A1 x - d          on x1 > 1,
///   A1 x + d          on x1 < -1,
/// with d = (alpha (m0 - m1), 0, 0)^T. Equilibria: origin, then the
/// D_-1 solution -A1^{-1} d, then the D_1 solution A1^{-1} d, each kept
/// only if it lies in its region.
SystemModel chua(const ChuaParams& params);

struct RosslerParams {
    double a = 0.2;
    double b = 0.2;
    double c = 5.7;
};

/// Rossler system; the inner equilibrium is listed first.
SystemModel rossler(const RosslerParams& params = {});

/// Linear system xdot = A x with equilibrium at the origin.
SystemModel linear_system(const Matrix& A);

} // namespace tdfc
