#include "tdfc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace tdfc {

double frobenius(const Matrix& A) { return A.norm(); }

namespace {

void require_square(const Matrix& A, const char* who) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
    if (!A.allFinite())
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
}

// Deterministic ordering: descending Re, ascending |Im|, +Im before -Im.
bool spectral_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    double ai = std::abs(a.imag()), bi = std::abs(b.imag());
    if (ai != bi) return ai < bi;
    return a.imag() > b.imag();
}

} // namespace

Spectrum eig(const Matrix& A, const EigOptions& opts) {
    require_square(A, "eig");
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig: QR iteration failed to converge");

    const double scale = frobenius(A);
    std::vector<Complex> vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex z = solver.eigenvalues()(i);
        if (std::abs(z.imag()) < opts.tol_imag * scale) z = Complex(z.real(), 0.0);
        vals[i] = z;
    }
    std::stable_sort(vals.begin(), vals.end(), spectral_less);

    Spectrum s;
    s.values = std::move(vals);
    s.pairing.assign(n, 0);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        if (s.values[i].imag() == 0.0) {
            s.pairing[i] = i;
            continue;
        }
        if (used[i]) continue;
        if (s.values[i].imag() < 0.0)
            throw std::runtime_error("eig: unpaired negative-imaginary eigenvalue");
        int partner = -1;
        for (int j = i + 1; j < n; ++j) {
            if (!used[j] && s.values[j] == std::conj(s.values[i])) { partner = j; break; }
        }
        if (partner < 0)
            throw std::runtime_error("eig: missing conjugate partner");
        s.pairing[i] = partner;
        s.pairing[partner] = i;
        used[i] = used[partner] = true;
    }
    s.multiplicities.assign(n, 0);
    const double ctol = opts.tol_cluster * std::max(1.0, scale);
    for (int i = 0; i < n; ++i) {
        int count = 0;
        for (int j = 0; j < n; ++j)
            if (std::abs(s.values[i] - s.values[j]) <= ctol) ++count;
        s.multiplicities[i] = count;
    }
    return s;
}

namespace {

// Recognize a matrix already in canonical block-diagonal form with the
// blocks ordered like the sorted spectrum; exact zero off-block entries.
bool detect_canonical(const Matrix& A, RealBlockForm& out) {
    const int n = static_cast<int>(A.rows());
    std::vector<Block> layout;
    std::vector<Complex> vals;
    int i = 0;
    while (i < n) {
        if (i + 1 < n && A(i + 1, i) != 0.0) {
            const double mu = A(i, i), om = A(i + 1, i);
            if (om <= 0.0 || A(i + 1, i + 1) != mu || A(i, i + 1) != -om) return false;
            layout.push_back({BlockKind::Complex, i, 2});
            vals.emplace_back(mu, om);
            vals.emplace_back(mu, -om);
            i += 2;
        } else {
            layout.push_back({BlockKind::Real, i, 1});
            vals.emplace_back(A(i, i), 0.0);
            i += 1;
        }
    }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            bool inside = false;
            for (const Block& b : layout)
                if (r >= b.start && r < b.start + b.size && c >= b.start && c < b.start + b.size)
                    inside = true;
            if (!inside && A(r, c) != 0.0) return false;
        }
    // ordering must match the canonical sort
    std::vector<Complex> sorted = vals;
    std::stable_sort(sorted.begin(), sorted.end(), spectral_less);
    if (sorted != vals) return false;

    out.V = Matrix::Identity(n, n);
    out.D = A;
    out.layout = std::move(layout);
    out.spectrum.values = std::move(vals);
    out.spectrum.pairing.assign(n, 0);
    for (const Block& b : out.layout) {
        if (b.kind == BlockKind::Real) out.spectrum.pairing[b.start] = b.start;
        else {
            out.spectrum.pairing[b.start] = b.start + 1;
            out.spectrum.pairing[b.start + 1] = b.start;
        }
    }
    out.spectrum.multiplicities.assign(n, 1);
    const double ctol = 1e-8 * std::max(1.0, frobenius(A));
    for (int a = 0; a < n; ++a) {
        int count = 0;
        for (int b = 0; b < n; ++b)
            if (std::abs(out.spectrum.values[a] - out.spectrum.values[b]) <= ctol) ++count;
        out.spectrum.multiplicities[a] = count;
    }
    return true;
}

// Parse a caller-supplied exact real Jordan form: block diagonal as in
// detect_canonical plus 0/1 superdiagonal entries between adjacent slots.
RealBlockForm parse_exact_jordan(const Matrix& A) {
    const int n = static_cast<int>(A.rows());
    RealBlockForm out;
    int i = 0;
    while (i < n) {
        if (i + 1 < n && A(i + 1, i) != 0.0) {
            const double mu = A(i, i), om = A(i + 1, i);
            if (om <= 0.0 || A(i + 1, i + 1) != mu || A(i, i + 1) != -om)
                throw std::invalid_argument("real_block_form: malformed 2x2 block in exact Jordan input");
            out.layout.push_back({BlockKind::Complex, i, 2});
            out.spectrum.values.emplace_back(mu, om);
            out.spectrum.values.emplace_back(mu, -om);
            i += 2;
        } else {
            out.layout.push_back({BlockKind::Real, i, 1});
            out.spectrum.values.emplace_back(A(i, i), 0.0);
            i += 1;
        }
    }
    out.D = Matrix::Zero(n, n);
    for (const Block& b : out.layout)
        out.D.block(b.start, b.start, b.size, b.size) = A.block(b.start, b.start, b.size, b.size);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (out.D(r, c) != 0.0 || A(r, c) == 0.0) continue;
            const bool superdiag = (c == r + 1) && A(r, c) == 1.0;
            if (!superdiag)
                throw std::invalid_argument("real_block_form: exact Jordan input has an entry "
                                            "outside the blocks that is not a 0/1 superdiagonal");
        }
    out.V = Matrix::Identity(n, n);
    out.spectrum.pairing.assign(n, 0);
    for (const Block& b : out.layout) {
        if (b.kind == BlockKind::Real) out.spectrum.pairing[b.start] = b.start;
        else {
            out.spectrum.pairing[b.start] = b.start + 1;
            out.spectrum.pairing[b.start + 1] = b.start;
        }
    }
    out.spectrum.multiplicities.assign(n, 1);
    const double ctol = 1e-8 * std::max(1.0, frobenius(A));
    for (int a = 0; a < n; ++a) {
        int count = 0;
        for (int b = 0; b < n; ++b)
            if (std::abs(out.spectrum.values[a] - out.spectrum.values[b]) <= ctol) ++count;
        out.spectrum.multiplicities[a] = count;
    }
    return out;
}

} // namespace

RealBlockForm real_block_form(const Matrix& A, const BlockFormOptions& opts) {
    require_square(A, "real_block_form");
    const int n = static_cast<int>(A.rows());

    if (opts.assume_exact_jordan) return parse_exact_jordan(A);

    RealBlockForm canonical;
    if (detect_canonical(A, canonical)) return canonical;

    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("real_block_form: QR iteration failed to converge");

    const double scale = frobenius(A);
    std::vector<Complex> vals(n);
    for (int i = 0; i < n; ++i) {
        Complex z = solver.eigenvalues()(i);
        if (std::abs(z.imag()) < opts.eig.tol_imag * scale) z = Complex(z.real(), 0.0);
        vals[i] = z;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return spectral_less(vals[a], vals[b]); });

    RealBlockForm out;
    out.spectrum.values.resize(n);
    for (int i = 0; i < n; ++i) out.spectrum.values[i] = vals[order[i]];
    out.spectrum.pairing.assign(n, 0);
    out.spectrum.multiplicities.assign(n, 1);
    const double ctol = opts.eig.tol_cluster * std::max(1.0, scale);
    for (int a = 0; a < n; ++a) {
        int count = 0;
        for (int b = 0; b < n; ++b)
            if (std::abs(out.spectrum.values[a] - out.spectrum.values[b]) <= ctol) ++count;
        out.spectrum.multiplicities[a] = count;
    }

    Matrix T = Matrix::Zero(n, n);
    out.D = Matrix::Zero(n, n);
    std::vector<bool> used(n, false);
    int col = 0;
    for (int si = 0; si < n; ++si) {
        if (used[si]) continue;
        const Complex lam = out.spectrum.values[si];
        const int src = order[si];
        if (lam.imag() == 0.0) {
            Eigen::VectorXcd w = solver.eigenvectors().col(src);
            // make the essentially-real vector exactly real with a fixed phase
            int k = 0;
            for (int r = 1; r < n; ++r)
                if (std::abs(w(r)) > std::abs(w(k))) k = r;
            w *= std::polar(1.0, -std::arg(w(k)));
            Vector v = w.real();
            v /= v.norm();
            T.col(col) = v;
            out.D(col, col) = lam.real();
            out.layout.push_back({BlockKind::Real, col, 1});
            out.spectrum.pairing[si] = si;
            used[si] = true;
            col += 1;
        } else {
            if (lam.imag() < 0.0)
                throw std::runtime_error("real_block_form: conjugate ordering violated");
            int partner = -1;
            for (int sj = si + 1; sj < n; ++sj)
                if (!used[sj] && out.spectrum.values[sj] == std::conj(lam)) { partner = sj; break; }
            if (partner < 0) throw std::runtime_error("real_block_form: missing conjugate partner");
            out.spectrum.pairing[si] = partner;
            out.spectrum.pairing[partner] = si;
            used[si] = used[partner] = true;

            Eigen::VectorXcd w = solver.eigenvectors().col(src);
            int k = 0;
            for (int r = 1; r < n; ++r)
                if (std::abs(w(r)) > std::abs(w(k))) k = r;
            w *= std::polar(1.0, -std::arg(w(k)));
            w /= w.norm();
            // A [v u] = [v u] [[mu, -om], [om, mu]] for w = u + i v
            T.col(col) = w.imag();
            T.col(col + 1) = w.real();
            const double mu = lam.real(), om = lam.imag();
            out.D(col, col) = mu;
            out.D(col, col + 1) = -om;
            out.D(col + 1, col) = om;
            out.D(col + 1, col + 1) = mu;
            out.layout.push_back({BlockKind::Complex, col, 2});
            col += 2;
        }
    }

    Eigen::JacobiSVD<Matrix> svd(T);
    const double smin = svd.singularValues()(n - 1);
    const double cond = smin > 0.0 ? svd.singularValues()(0) / smin
                                   : std::numeric_limits<double>::infinity();
    if (!(cond < opts.cond_cap))
        throw std::runtime_error("real_block_form: defective matrix detected (eigenvector "
                                 "condition " + std::to_string(cond) + " exceeds cap); supply an "
                                 "exact Jordan form with assume_exact_jordan if intended");
    out.V = T.partialPivLu().inverse();
    return out;
}

Matrix expm(const Matrix& A, double t) {
    require_square(A, "expm");
    if (!std::isfinite(t)) throw std::invalid_argument("expm: non-finite time");
    const int n = static_cast<int>(A.rows());
    Matrix B = A * t;

    // Higham's scaling-and-squaring, degree-13 Pade approximant
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    const double norm1 = B.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        B /= std::ldexp(1.0, squarings);
    }
    const Matrix I = Matrix::Identity(n, n);
    const Matrix B2 = B * B;
    const Matrix B4 = B2 * B2;
    const Matrix B6 = B2 * B4;
    Matrix U = B * (B6 * (b[13] * B6 + b[11] * B4 + b[9] * B2) +
                    b[7] * B6 + b[5] * B4 + b[3] * B2 + b[1] * I);
    Matrix V = B6 * (b[12] * B6 + b[10] * B4 + b[8] * B2) +
               b[6] * B6 + b[4] * B4 + b[2] * B2 + b[0] * I;
    Matrix R = (V - U).partialPivLu().solve(V + U);
    for (int s = 0; s < squarings; ++s) R = R * R;
    if (!R.allFinite())
        throw std::runtime_error("expm: overflow for ||A t|| = " + std::to_string(norm1));
    return R;
}

Matrix integrate_matrix(const std::function<Matrix(double)>& f, double a, double b, double tol) {
    if (!(a <= b)) throw std::invalid_argument("integrate_matrix: requires a <= b");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_matrix: tolerance must be positive");

    // 4-point Gauss-Legendre nodes/weights on [-1, 1]
    static const double node[2] = {0.3399810435848563, 0.8611363115940526};
    static const double wght[2] = {0.6521451548625461, 0.3478548451374538};

    Matrix probe = f(a);
    if (a == b) return Matrix::Zero(probe.rows(), probe.cols());

    auto composite = [&](int panels) {
        Matrix sum = Matrix::Zero(probe.rows(), probe.cols());
        const double w = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * w;
            for (int q = 0; q < 2; ++q) {
                sum += wght[q] * f(mid - 0.5 * w * node[q]);
                sum += wght[q] * f(mid + 0.5 * w * node[q]);
            }
        }
        return (0.5 * w * sum).eval();
    };

    const int panel_cap = 8192;
    Matrix prev = composite(64);
    for (int panels = 128; panels <= panel_cap; panels *= 2) {
        Matrix next = composite(panels);
        if ((next - prev).cwiseAbs().maxCoeff() < tol) return next;
        prev = std::move(next);
    }
    throw std::runtime_error("integrate_matrix: no convergence within panel cap");
}

} // namespace tdfc
