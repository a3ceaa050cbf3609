#include "dig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dig {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::source: return "source";
        case Verdict::sink: return "sink";
        default: return "marginal";
    }
}

Matrix monodromy(const DynamicNetwork& net, const SystemParams& params) {
    const SwitchedLinearSystem sys = assemble(net, params);
    Matrix m = Matrix::Identity(net.n, net.n);
    for (const Segment& seg : sys.segments) m = expm(seg.gen, seg.duration) * m;
    return m.cwiseMax(0.0);
}

namespace {

Verdict classify(double lambda, double tol) {
    if (lambda > 1.0 + tol) return Verdict::source;
    if (lambda < 1.0 - tol) return Verdict::sink;
    return Verdict::marginal;
}

void attach_circuits(GrowthReport& report, const DynamicNetwork& net, const SystemParams& params,
                     const AnalysisOptions& opts) {
    const int q_max = opts.q_max > 0 ? opts.q_max : net.seasons();
    const int walk_len = opts.max_walk_len > 0 ? opts.max_walk_len : 2 * net.n;
    const double theta = opts.theta > 0.0 ? opts.theta : default_theta(net, params.T);

    const auto add = [&](QTCircuit circuit) {
        GrowthReport::CircuitEntry entry;
        entry.index = growth_index_qcircuit(net, circuit);
        entry.circuit = std::move(circuit);
        entry.bound = circuit_bound(net, entry.circuit, theta);
        entry.H = params.T > entry.bound.T_star
                      ? minimizing_function(params.m, params.T, entry.bound)
                      : 0.0;
        report.circuits.push_back(std::move(entry));
    };

    for (const TCircuit& c : enumerate_tcircuits(net).circuits) add(as_qtcircuit(c));
    for (int q = 2; q <= q_max; ++q)
        for (QTCircuit& c : enumerate_qtcircuits(net, q, walk_len).circuits) add(std::move(c));
    std::stable_sort(report.circuits.begin(), report.circuits.end(),
                     [](const auto& a, const auto& b) { return a.index > b.index; });
}

} // namespace

GrowthReport lyapunov(const DynamicNetwork& net, const SystemParams& params,
                      const AnalysisOptions& opts) {
    GrowthReport report;
    report.params = params;
    report.chi = growth_index_system(net);
    const Matrix m = monodromy(net, params);
    try {
        const SpectralResult spectral = spectral_radius(m, opts.spectral);
        report.lambda = spectral.rho;
        report.spectral_iterations = spectral.iterations;
        report.Lyapunov = std::log(spectral.rho) / params.T;
        report.verdict = classify(spectral.rho, opts.verdict_tol);
    } catch (const NumericFailure& failure) {
        report.numeric_ok = false;
        report.lambda = failure.last_estimate();
        report.Lyapunov = std::numeric_limits<double>::quiet_NaN();
        report.note = failure.what();
    }
    if (opts.with_circuits) attach_circuits(report, net, params, opts);
    return report;
}

double entry_growth(const DynamicNetwork& net, const SystemParams& params, int i, int j) {
    if (i < 0 || i >= net.n || j < 0 || j >= net.n)
        throw ValidationError("entry_growth: site index out of range");
    return monodromy(net, params)(i, j);
}

double long_run_rate(const Matrix& monodromy_matrix, double T, int j0, int j1) {
    if (j1 <= j0 || j0 < 1) throw ValidationError("long_run_rate: bad period window");
    const Eigen::Index n = monodromy_matrix.rows();
    Vector x = Vector::Ones(n);
    double log_scale = 0.0;
    // Least-squares slope of log||x(jT)|| against j over j0..j1.
    double sj = 0.0, sy = 0.0, sjj = 0.0, sjy = 0.0;
    int count = 0;
    for (int j = 1; j <= j1; ++j) {
        x = monodromy_matrix * x;
        const double norm = x.norm();
        if (norm <= 0.0 || !std::isfinite(norm))
            throw NumericFailure("long_run_rate: trajectory collapsed", 0.0);
        log_scale += std::log(norm);
        x /= norm;
        if (j >= j0) {
            const double jj = static_cast<double>(j);
            sj += jj;
            sy += log_scale;
            sjj += jj * jj;
            sjy += jj * log_scale;
            ++count;
        }
    }
    const double slope = (count * sjy - sj * sy) / (count * sjj - sj * sj);
    return slope / T;
}

std::optional<ThresholdResult> threshold_search(const DynamicNetwork& net, double T, double m_lo,
                                                double m_hi, const ThresholdOptions& opts) {
    if (!(m_lo > 0.0 && m_hi > m_lo)) throw ValidationError("threshold_search: invalid bracket");

    const auto log_lambda = [&](double m) {
        const GrowthReport r = lyapunov(net, {m, T}, opts.analysis);
        if (!r.numeric_ok) throw NumericFailure("threshold_search: " + r.note, r.lambda);
        return std::log(r.lambda);
    };

    const int grid = std::max(2, opts.grid_points);
    std::vector<double> ms(grid);
    const double step = std::log(m_hi / m_lo) / (grid - 1);
    for (int i = 0; i < grid; ++i) ms[i] = m_lo * std::exp(step * i);
    ms.back() = m_hi;

    std::vector<double> vals(grid);
    for (int i = 0; i < grid; ++i) vals[i] = log_lambda(ms[i]);

    int first = -1;
    for (int i = 0; i < grid; ++i)
        if (vals[i] > 0.0) {
            first = i;
            break;
        }
    if (first < 0) return std::nullopt;

    const auto bisect = [&](double lo, double hi, bool rising) {
        while (hi / lo - 1.0 > opts.rel_width) {
            const double mid = std::sqrt(lo * hi);
            const bool growing = log_lambda(mid) > 0.0;
            if (growing == rising)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    ThresholdResult result;
    result.m_star = first == 0 ? m_lo : bisect(ms[first - 1], ms[first], true);

    // Upper edge: first return to decay after the growth window, if the
    // scan sees one.
    for (int i = first + 1; i < grid; ++i) {
        if (vals[i - 1] > 0.0 && vals[i] <= 0.0) {
            result.upper_edge = bisect(ms[i - 1], ms[i], false);
            break;
        }
    }
    return result;
}

std::vector<double> Range::values() const {
    std::vector<double> out;
    if (count <= 0) return out;
    if (log_spaced && !(lo > 0.0)) throw ValidationError("range: log spacing needs lo > 0");
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    out.resize(count);
    if (log_spaced) {
        const double step = std::log(hi / lo) / (count - 1);
        for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
    } else {
        const double step = (hi - lo) / (count - 1);
        for (int i = 0; i < count; ++i) out[i] = lo + step * i;
    }
    out.back() = hi;
    return out;
}

SweepGrid sweep(const DynamicNetwork& net, const Range& m_range, const Range& T_range,
                bool with_threshold, const AnalysisOptions& opts) {
    SweepGrid grid;
    grid.m_values = m_range.values();
    grid.T_values = T_range.values();
    if (grid.m_values.empty() || grid.T_values.empty())
        throw ValidationError("sweep: empty range");
    grid.verdict_tol = opts.verdict_tol;
    const int rows = static_cast<int>(grid.T_values.size());
    const int cols = static_cast<int>(grid.m_values.size());
    grid.Lambda.setConstant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    grid.lambda.setConstant(rows, cols, std::numeric_limits<double>::quiet_NaN());

    for (int row = 0; row < rows; ++row) {
        for (int col = 0; col < cols; ++col) {
            const GrowthReport r = lyapunov(net, {grid.m_values[col], grid.T_values[row]}, opts);
            if (r.numeric_ok) {
                grid.Lambda(row, col) = r.Lyapunov;
                grid.lambda(row, col) = r.lambda;
            }
        }
        if (with_threshold) {
            std::optional<ThresholdResult> edge;
            try {
                edge = threshold_search(net, grid.T_values[row], grid.m_values.front(),
                                        grid.m_values.back());
            } catch (const NumericFailure&) {
                edge = std::nullopt;
            }
            grid.threshold_curve.push_back(edge);
        }
    }
    return grid;
}

namespace {

std::string fmt17(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
    os << "T,m,Lambda,lambda,verdict\n";
    for (std::size_t row = 0; row < grid.T_values.size(); ++row) {
        for (std::size_t col = 0; col < grid.m_values.size(); ++col) {
            const double lam = grid.lambda(row, col);
            os << fmt17(grid.T_values[row]) << ',' << fmt17(grid.m_values[col]) << ','
               << fmt17(grid.Lambda(row, col)) << ',' << fmt17(lam) << ',';
            if (std::isnan(lam))
                os << "failed";
            else
                os << to_string(classify(lam, grid.verdict_tol));
            os << '\n';
        }
    }
}

void write_threshold_csv(std::ostream& os, const SweepGrid& grid) {
    os << "T,m_star,upper_edge\n";
    for (std::size_t row = 0; row < grid.threshold_curve.size(); ++row) {
        os << fmt17(grid.T_values[row]) << ',';
        const auto& edge = grid.threshold_curve[row];
        if (edge) {
            os << fmt17(edge->m_star) << ',';
            if (edge->upper_edge) os << fmt17(*edge->upper_edge);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

} // namespace dig
