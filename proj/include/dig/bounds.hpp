#pragma once

#include "dig/circuits.hpp"
#include "dig/network.hpp"

namespace dig {

/**
 * Constants of the chain minorization lemma. The chain has l links with the
 * dominant rate r at position d (0-based) and floor rate s at every other
 * site; theta is the warm-up time after which the bound holds and mu the
 * out-degree budget charged at -mu*m.
 */
struct PathBoundConstants {
    double r = 0.0;
    double s = -1.0;
    int d = 0;
    int l = 0;
    double theta = 1.0;
    double mu = 1.0;
};

/// integral_0^t e^{-tau(r-s)} tau^{d-1}/(d-1)! dtau, d >= 1, r > s.
/// Evaluated through the regularized incomplete gamma (exact, stable).
double v_rsd(double r, double s, int d, double t);

/// (1 - e^{-t(r-s)}) / (r-s), r > s.
double w_rs(double r, double s, double t);

/// C(theta) of the chain lemma: the d-dependent prefix times
/// w^{l-d}, all evaluated at theta/(l-d+1). Independent of m.
double c_theta(const PathBoundConstants& c);

/// Lower bound C(theta) m^l e^{t(r - mu m)} on y_l(t)/y_0(0), valid for
/// t >= theta. Throws std::domain_error below theta.
double path_bound(const PathBoundConstants& c, double m, double t);

/// Closed-form minorization data for one circuit.
struct CircuitBound {
    double chi_c = 0.0; // growth index (per period)
    int L = 0;          // total links
    double C = 0.0;     // product of per-leg C(theta)
    double mu = 0.0;    // rate penalty multiplier
    double T_star = 0.0;
    int q = 1;
};

/**
 * Per-leg lemma constants combined over the circuit: C multiplies every
 * leg's C(theta) built from the leg's dominant rate and floor
 * (min leg rate - 1); legs that revisit a site are cut at dominant-site
 * occurrences into simple pieces that share theta evenly (beta = 1/2 for
 * one loop). mu is n-1 for simple legs, the maximum out-degree along the
 * walk for loop legs, plus the largest self-drain on relaxed networks.
 * Valid for T > T_star = max_k theta / (t_k - t_{k-1}).
 */
CircuitBound circuit_bound(const DynamicNetwork& net, const QTCircuit& c, double theta);
CircuitBound circuit_bound(const DynamicNetwork& net, const TCircuit& c, double theta);

/// Per-leg default warm-up: half the shortest season duration at this T,
/// which keeps T_star = T/2 < T.
double default_theta(const DynamicNetwork& net, double T);

/// H(m,T) = C m^L e^{qT(chi^C - mu m)}; one-period growth certificate:
/// H > 1 proves the system is a source. Throws std::domain_error for
/// T <= T_star.
double minimizing_function(double m, double T, const CircuitBound& bound);

struct ThresholdBound {
    double value = 0.0;       // e^{-alpha T}, alpha = chi^C / (2 L C^{1/L})
    bool applicable = false;  // regime holds and H(value, T) >= 1
    bool regime_ok = false;   // value < chi^C / (2 mu)
    double safe_value = 0.0;  // C^{-1/L} e^{-qT chi^C/(2L)}
    bool safe_applicable = false;
};

/**
 * Exponentially-small threshold bound: when applicable, m*(T) <= value
 * because H(value, T) >= 1 certifies growth at that intensity. The
 * companion safe_value carries its own certificate (safe_value < chi/(2 mu)
 * makes H(safe_value, T) >= 1 identically).
 * Throws std::domain_error when chi^C <= 0 or L = 0.
 */
ThresholdBound threshold_bound(const CircuitBound& bound, double T);

/**
 * Maximal simple paths of one season ending at a trap: a site with
 * positive growth rate and no outgoing links in that season. Any m > 0
 * makes the trap population grow at its own rate.
 */
std::vector<SimplePath> dead_end_paths(const DynamicNetwork& net, int season);

} // namespace dig
