#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dig/errors.hpp"

namespace dig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One piece of a switched linear system: dx/dt = gen * x held for `duration`
/// time units. gen(i,j) multiplies x_j in dx_i/dt.
struct Segment {
    double duration = 0.0;
    Matrix gen;
};

/// Ordered switching schedule covering one period.
struct SwitchedLinearSystem {
    std::vector<Segment> segments;

    int dim() const { return segments.empty() ? 0 : static_cast<int>(segments.front().gen.rows()); }
};

/// True when all off-diagonal entries are >= -tol.
bool is_metzler(const Matrix& a, double tol = 0.0);

/**
 * Matrix exponential e^{tA} by Pade-13 scaling and squaring.
 *
 * Relative error is at machine level for ||tA|| up to ~100 in any
 * submultiplicative norm; n is expected small (sites).
 */
Matrix expm(const Matrix& a, double t = 1.0);

/**
 * Exact piecewise propagation: applies e^{duration_k * A_k} in schedule
 * order to x0. Every generator must be Metzler and every duration >= 0,
 * so a nonnegative x0 stays nonnegative.
 */
Vector propagate(const std::vector<Segment>& schedule, const Vector& x0);
Vector propagate(const SwitchedLinearSystem& sys, const Vector& x0);

struct SpectralOptions {
    /// Stop when successive Rayleigh quotients differ by less than this,
    /// relatively, on `stall_hits` consecutive iterations.
    double tol = 1e-12;
    int stall_hits = 4;
    int max_iterations = 100000;
    /// When > 0, eps*(all-ones)/n is added before iterating (caller opt-in
    /// for reducible/tied matrices). Default 0: ties surface as
    /// NumericFailure with the last estimate.
    double regularization = 0.0;
};

struct SpectralResult {
    double rho = 0.0;
    Vector witness;
    int iterations = 0;
};

/**
 * Perron root of a nonnegative matrix by power iteration with an adaptive
 * nonnegative diagonal shift (iterates M + cI with c tracking the current
 * Rayleigh quotient; the shift leaves the dominant eigenvector unchanged
 * and separates complex or negative subdominant eigenvalues of nearly
 * dominant modulus).
 *
 * Throws ValidationError on negative entries, NumericFailure (carrying the
 * last estimate) when the iteration cap is reached.
 */
SpectralResult spectral_radius(const Matrix& m, const SpectralOptions& opts = {});

/**
 * Solution at time t of dx/dt = a x + b(t), x(0) = x0, for constant a:
 * e^{ta} (x0 + integral_0^t e^{-sa} b(s) ds), by adaptive quadrature.
 */
double scalar_linear_solution(double a, const std::function<double(double)>& b, double t, double x0);

} // namespace dig
