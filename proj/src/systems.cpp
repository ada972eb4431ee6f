#include "tdfc/systems.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace tdfc {

SystemModel chua(const ChuaParams& p) {
    if (!(std::isfinite(p.alpha) && std::isfinite(p.beta) && std::isfinite(p.gamma) &&
          std::isfinite(p.m0) && std::isfinite(p.m1)))
        throw std::invalid_argument("chua: parameters must be finite");
    if (p.m0 == p.m1) throw std::invalid_argument("chua: m0 == m1 is not piecewise linear");

    Matrix A1(3, 3), A2(3, 3);
    A1 << -p.alpha * (1.0 + p.m1), p.alpha, 0.0,
           1.0, -1.0, 1.0,
           0.0, -p.beta, -p.gamma;
    A2 << -p.alpha * (1.0 + p.m0), p.alpha, 0.0,
           1.0, -1.0, 1.0,
           0.0, -p.beta, -p.gamma;
    Vector d(3);
    d << p.alpha * (p.m0 - p.m1), 0.0, 0.0;

    SystemModel sys;
    sys.dim = 3;
    sys.name = "chua";
    sys.rhs = [A1, A2, d](const Vector& x) -> Vector {
        if (std::abs(x(0)) <= 1.0) return A2 * x;
        return x(0) > 1.0 ? Vector(A1 * x - d) : Vector(A1 * x + d);
    };
    sys.jacobian = [A1, A2](const Vector& x) -> Matrix {
        return std::abs(x(0)) <= 1.0 ? A2 : A1;
    };

    sys.equilibria.push_back(Vector::Zero(3));
    Eigen::FullPivLU<Matrix> lu(A1);
    if (!lu.isInvertible()) {
        sys.diagnostics = "A1 singular: no outer equilibria";
    } else {
        const Vector xp = lu.solve(d); // D_1 candidate, A1 x = d
        const Vector xm = -xp;         // D_-1 candidate
        if (xm(0) <= -1.0)
            sys.equilibria.push_back(xm);
        else
            sys.diagnostics += "D_-1 candidate outside its region; ";
        if (xp(0) >= 1.0)
            sys.equilibria.push_back(xp);
        else
            sys.diagnostics += "D_1 candidate outside its region; ";
    }
    return sys;
}

SystemModel rossler(const RosslerParams& p) {
    SystemModel sys;
    sys.dim = 3;
    sys.name = "rossler";
    const double a = p.a, b = p.b, c = p.c;
    sys.rhs = [a, b, c](const Vector& x) -> Vector {
        Vector v(3);
        v << -x(1) - x(2), x(0) + a * x(1), b + x(2) * (x(0) - c);
        return v;
    };
    sys.jacobian = [a, c](const Vector& x) -> Matrix {
        Matrix J(3, 3);
        J << 0.0, -1.0, -1.0,
             1.0, a, 0.0,
             x(2), 0.0, x(0) - c;
        return J;
    };

    // equilibria: y solves a y^2 + c y + b = 0, x = -a y, z = -y
    const double disc = c * c - 4.0 * a * b;
    if (disc >= 0.0 && a != 0.0) {
        const double root = std::sqrt(disc);
        for (double y : {(-c + root) / (2.0 * a), (-c - root) / (2.0 * a)}) {
            Vector e(3);
            e << -a * y, y, -y;
            sys.equilibria.push_back(e);
        }
    } else {
        sys.diagnostics = "no real equilibria";
    }
    return sys;
}

SystemModel linear_system(const Matrix& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw std::invalid_argument("linear_system: A must be square");
    SystemModel sys;
    sys.dim = static_cast<int>(A.rows());
    sys.name = "linear";
    sys.rhs = [A](const Vector& x) -> Vector { return A * x; };
    sys.jacobian = [A](const Vector&) -> Matrix { return A; };
    sys.equilibria.push_back(Vector::Zero(A.rows()));
    return sys;
}

} // namespace tdfc
