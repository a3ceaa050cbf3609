#include "dig/linode.hpp"

#include <cmath>
#include <limits>

namespace dig {

bool is_metzler(const Matrix& a, double tol) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j && a(i, j) < -tol) return false;
    return true;
}

namespace {

void require_finite(const Matrix& a, const char* who) {
    if (!a.allFinite()) throw ValidationError(std::string(who) + ": non-finite matrix entry");
}

// Pade-13 numerator coefficients (Higham 2005).
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

Matrix pade13(const Matrix& a) {
    const Eigen::Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
                          kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 + kPade13[1] * ident);
    const Matrix v = a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
                     kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

} // namespace

Matrix expm(const Matrix& a, double t) {
    if (a.rows() != a.cols()) throw ValidationError("expm: matrix not square");
    if (a.rows() == 0) throw ValidationError("expm: empty matrix");
    require_finite(a, "expm");
    if (!std::isfinite(t)) throw ValidationError("expm: non-finite time");

    Matrix scaled = t * a;
    const double theta13 = 5.371920351148152;
    const double norm = scaled.cwiseAbs().colwise().sum().maxCoeff(); // 1-norm
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        scaled /= std::ldexp(1.0, squarings);
    }
    Matrix result = pade13(scaled);
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Vector propagate(const std::vector<Segment>& schedule, const Vector& x0) {
    if ((x0.array() < 0).any()) throw ValidationError("propagate: negative initial population");
    Vector x = x0;
    for (const Segment& seg : schedule) {
        if (seg.gen.rows() != seg.gen.cols() || seg.gen.rows() != x.size())
            throw ValidationError("propagate: generator dimension mismatch");
        if (!(seg.duration >= 0.0)) throw ValidationError("propagate: negative segment duration");
        if (!is_metzler(seg.gen)) throw ValidationError("propagate: generator is not Metzler");
        x = expm(seg.gen, seg.duration) * x;
    }
    // e^{tA} of a Metzler matrix is nonnegative; clamp roundoff dust.
    return x.cwiseMax(0.0);
}

Vector propagate(const SwitchedLinearSystem& sys, const Vector& x0) {
    return propagate(sys.segments, x0);
}

SpectralResult spectral_radius(const Matrix& m, const SpectralOptions& opts) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("spectral_radius: matrix not square");
    require_finite(m, "spectral_radius");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) < 0.0) throw ValidationError("spectral_radius: negative entry");

    const Eigen::Index n = m.rows();
    Matrix a = m;
    if (opts.regularization > 0.0)
        a.array() += opts.regularization / static_cast<double>(n);

    if (n == 1) return {a(0, 0), Vector::Ones(1), 0};

    Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double shift = 0.0;
    double last = std::numeric_limits<double>::quiet_NaN();
    double rq = 0.0;
    int hits = 0;
    for (int k = 1; k <= opts.max_iterations; ++k) {
        Vector y = a * x + shift * x;
        const double ny = y.norm();
        if (ny == 0.0) return {0.0, x, k}; // nilpotent direction; rho 0 attained
        x = y / ny;
        rq = x.dot(a * x);
        shift = std::max(rq, 0.0);
        if (std::isfinite(last) &&
            std::abs(rq - last) <= opts.tol * std::max(std::abs(rq), 1e-300)) {
            if (++hits >= opts.stall_hits) return {rq, x, k};
        } else {
            hits = 0;
        }
        last = rq;
    }
    throw NumericFailure("spectral_radius: no convergence within iteration cap", rq);
}

namespace {

struct Quadrature {
    const std::function<double(double)>& f;
    long evals = 0;
    double last = 0.0;

    double eval(double x) {
        if (++evals > 2'000'000)
            throw NumericFailure("scalar_linear_solution: quadrature did not converge", last);
        return f(x);
    }

    double adaptive(double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
        const double m = 0.5 * (a + b);
        const double flm = eval(0.5 * (a + m));
        const double frm = eval(0.5 * (m + b));
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        last = left + right;
        if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        return adaptive(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               adaptive(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }

    double run(double a, double b, double rel, double floor) {
        if (a == b) return 0.0;
        // coarse composite pass fixes the error scale before refining
        const int n = 64;
        const double h = (b - a) / n;
        std::vector<double> fx(n + 1);
        for (int i = 0; i <= n; ++i) fx[i] = eval(a + h * i);
        double coarse = 0.0;
        for (int i = 0; i < n; i += 2)
            coarse += h / 3.0 * (fx[i] + 4.0 * fx[i + 1] + fx[i + 2]);
        const double tol = rel * std::max(std::abs(coarse), floor);

        double total = 0.0;
        for (int i = 0; i < n; i += 2) {
            const double lo = a + h * i, hi = a + h * (i + 2);
            const double whole = h / 3.0 * (fx[i] + 4.0 * fx[i + 1] + fx[i + 2]);
            total += adaptive(lo, hi, fx[i], fx[i + 1], fx[i + 2], whole, 2.0 * tol / n, 40);
        }
        return total;
    }
};

} // namespace

double scalar_linear_solution(double a, const std::function<double(double)>& b, double t, double x0) {
    if (!std::isfinite(a) || !std::isfinite(t) || !std::isfinite(x0))
        throw ValidationError("scalar_linear_solution: non-finite input");
    const auto integrand = [&](double s) { return std::exp(-s * a) * b(s); };
    Quadrature quad{integrand};
    const double floor = std::max(std::abs(x0), 1e-12);
    const double integral = t >= 0.0 ? quad.run(0.0, t, 1e-12, floor)
                                     : -quad.run(t, 0.0, 1e-12, floor);
    return std::exp(t * a) * (x0 + integral);
}

} // namespace dig
