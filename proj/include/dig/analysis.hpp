#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dig/bounds.hpp"
#include "dig/circuits.hpp"
#include "dig/network.hpp"

namespace dig {

enum class Verdict { source, sink, marginal };

std::string to_string(Verdict v);

struct GrowthReport {
    SystemParams params;
    double lambda = 0.0;   // Perron root of the monodromy
    double Lyapunov = 0.0; // log(lambda)/T
    Verdict verdict = Verdict::marginal;
    double chi = 0.0; // system growth index

    struct CircuitEntry {
        QTCircuit circuit;
        double index = 0.0;
        CircuitBound bound;
        double H = 0.0; // H(m, T), 0 when T <= T_star
    };
    std::vector<CircuitEntry> circuits; // filled when circuits were requested

    int spectral_iterations = 0;
    bool numeric_ok = true;
    std::string note;
};

struct AnalysisOptions {
    double verdict_tol = 1e-9; // marginal band around lambda = 1
    SpectralOptions spectral;
    bool with_circuits = false;
    int q_max = 0;        // 0: seasons count
    int max_walk_len = 0; // 0: 2n
    double theta = 0.0;   // 0: default_theta(net, T)
};

/// Product of the per-season propagators over one period, later seasons on
/// the left; nonnegative since each factor is the exponential of a Metzler
/// matrix.
Matrix monodromy(const DynamicNetwork& net, const SystemParams& params);

/// Lambda(m,T) = log(rho(monodromy))/T plus the source/sink verdict. A
/// spectral-radius failure is reported in the (partial) result rather than
/// thrown.
GrowthReport lyapunov(const DynamicNetwork& net, const SystemParams& params,
                      const AnalysisOptions& opts = {});

/// Monodromy entry (i, j); [M]_{ii} > 1 already certifies growth.
double entry_growth(const DynamicNetwork& net, const SystemParams& params, int i, int j);

/// Slope of log||x(jT)|| over periods j0..j1 under repeated monodromy
/// application with per-period renormalization.
double long_run_rate(const Matrix& monodromy_matrix, double T, int j0 = 50, int j1 = 100);

struct ThresholdResult {
    double m_star = 0.0;
    std::optional<double> upper_edge; // where growth disappears again, if seen
};

struct ThresholdOptions {
    int grid_points = 64; // coarse log-spaced scan
    double rel_width = 1e-4;
    AnalysisOptions analysis;
};

/**
 * Smallest m in [m_lo, m_hi] with lambda(m,T) > 1: log-grid scan for the
 * first sign change of log(lambda), then bisection to relative width
 * rel_width. Empty when no grid point is a source. The growth region can
 * be an interval; the upper edge (when the scan sees growth disappear
 * again) is reported alongside.
 */
std::optional<ThresholdResult> threshold_search(const DynamicNetwork& net, double T, double m_lo,
                                                double m_hi, const ThresholdOptions& opts = {});

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    bool log_spaced = false;

    std::vector<double> values() const;
};

struct SweepGrid {
    std::vector<double> m_values;
    std::vector<double> T_values;
    // Row per T, column per m; NaN marks a per-cell numeric failure.
    Matrix Lambda;
    Matrix lambda;
    std::vector<std::optional<ThresholdResult>> threshold_curve; // per T when requested
    double verdict_tol = 1e-9;
};

SweepGrid sweep(const DynamicNetwork& net, const Range& m_range, const Range& T_range,
                bool with_threshold = false, const AnalysisOptions& opts = {});

/// CSV with header "T,m,Lambda,lambda,verdict", T-major order, 17
/// significant digits.
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);

/// CSV with header "T,m_star,upper_edge"; empty fields when absent.
void write_threshold_csv(std::ostream& os, const SweepGrid& grid);

} // namespace dig
