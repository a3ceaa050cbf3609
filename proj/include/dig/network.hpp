#pragma once

#include <string>
#include <vector>

#include "dig/linode.hpp"

namespace dig {

/// Period fractions 0 = t_0 < t_1 < ... < t_p = 1; season k covers
/// [t_{k-1}, t_k] of the period.
struct SeasonSchedule {
    std::vector<double> breakpoints; // includes both endpoints

    int seasons() const { return static_cast<int>(breakpoints.size()) - 1; }
    double fraction(int k) const { return breakpoints[k + 1] - breakpoints[k]; }
    void validate() const;

    static SeasonSchedule uniform(int p);
};

/// Directed migration link from -> to with weight (1 in strict mode).
struct Link {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

/// Per-season growth rates, link set and optional per-site extra drain
/// (alpha, used only by relaxed-mode systems).
struct SeasonLayer {
    Vector growth;
    std::vector<Link> links;
    Vector self_drain; // empty means all-zero
};

struct SystemParams {
    double m = 0.0; // migration intensity, per unit time
    double T = 1.0; // period, time units
};

struct DynamicNetwork {
    int n = 0;
    std::vector<std::string> names; // labels for I/O only; may be empty
    SeasonSchedule schedule;
    std::vector<SeasonLayer> layers; // one per season

    int seasons() const { return schedule.seasons(); }
    /// All weights exactly 1 and no self drain.
    bool strict() const;
    void validate() const;

    double growth_rate(int season, int site) const { return layers[season].growth(site); }
    /// Number of links leaving `site` during `season`.
    int out_degree(int season, int site) const;
    bool has_link(int season, int from, int to) const;
};

/// Season generator matrices at migration intensity m (duration-free):
/// A(i,j) = m*w for each link j->i, A(i,i) = r_i - m*alpha_i - m*sum of
/// outgoing weights of i.
std::vector<Matrix> season_generators(const DynamicNetwork& net, double m);

/// The switched system of one period at (m, T): season k lasts
/// T*(t_k - t_{k-1}) under its generator.
SwitchedLinearSystem assemble(const DynamicNetwork& net, const SystemParams& params);

struct RelaxResult {
    DynamicNetwork strict_net;
    double ell = 1.0; // smallest positive weight
};

/**
 * Reduction of a weighted network to a strict (0/1) one that minorizes it:
 * every link weight becomes 1, the coupling becomes m*ell, and each site
 * picks up self_drain sum_outgoing (w - ell)/ell so that
 * propagate(original at m) >= propagate(strict at m*ell) componentwise.
 */
RelaxResult relax(const DynamicNetwork& net);

/// Time-averaged growth rate of one site over the period; > 0 means the
/// isolated site is a source.
double average_growth(const DynamicNetwork& net, int site);

} // namespace dig
