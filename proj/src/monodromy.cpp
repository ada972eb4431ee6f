#include "tdfc/monodromy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tdfc {

MonodromyReport monodromy_matrix(const Matrix& A, const Matrix& K, double tau,
                                 double quad_tol) {
    if (A.rows() != A.cols() || K.rows() != K.cols() || A.rows() != K.rows())
        throw std::invalid_argument("monodromy_matrix: A and K must be square of equal size");
    if (!(tau > 0.0)) throw std::invalid_argument("monodromy_matrix: tau must be positive");

    const Matrix Etau = expm(A, tau);
    const Matrix I = Matrix::Identity(A.rows(), A.cols());
    const Matrix C = I - Etau; // e^{Au} - e^{A(u+tau)} = e^{Au} (I - e^{A tau})
    auto integrand = [&](double u) -> Matrix {
        return expm(A, tau - u) * K * (expm(A, u) * C);
    };

    MonodromyReport report;
    report.M = expm(A, 3.0 * tau) + integrate_matrix(integrand, 0.0, tau, quad_tol);
    report.multipliers = eig(report.M);
    report.spectralRadius = 0.0;
    for (const Complex& m : report.multipliers.values)
        report.spectralRadius = std::max(report.spectralRadius, std::abs(m));
    report.stable = report.spectralRadius < 1.0;
    return report;
}

CertifyResult certify(const ControllerDesign& design) {
    CertifyResult result;
    result.report = monodromy_matrix(design.A, design.K, design.tau);

    const std::vector<Complex> expected = expected_multipliers(design);
    std::vector<bool> used(result.report.multipliers.values.size(), false);
    result.deviations.reserve(expected.size());
    for (const Complex& want : expected) {
        double best = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (size_t i = 0; i < result.report.multipliers.values.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(result.report.multipliers.values[i] - want);
            if (d < best) { best = d; best_idx = static_cast<int>(i); }
        }
        if (best_idx >= 0) used[best_idx] = true;
        result.deviations.push_back(best);
        result.max_deviation = std::max(result.max_deviation, best);
    }
    result.certified = result.max_deviation <= 1e-7;
    return result;
}

std::string summary(const CertifyResult& result) {
    std::string out;
    char line[128];
    out += "multipliers:\n";
    for (const Complex& m : result.report.multipliers.values) {
        std::snprintf(line, sizeof line, "  % .10f %+.10fi   |.| = %.10f\n", m.real(), m.imag(),
                      std::abs(m));
        out += line;
    }
    std::snprintf(line, sizeof line, "spectral radius: %.10f\n", result.report.spectralRadius);
    out += line;
    std::snprintf(line, sizeof line, "max deviation from targets: %.3e\n", result.max_deviation);
    out += line;
    out += result.certified ? "certified: yes\n" : "certified: NO\n";
    return out;
}

} // namespace tdfc
