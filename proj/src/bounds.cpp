#include "dig/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace dig {

double v_rsd(double r, double s, int d, double t) {
    if (!(r > s)) throw std::domain_error("v_rsd: requires r > s");
    if (d < 1) throw std::domain_error("v_rsd: requires d >= 1");
    if (t < 0.0) throw std::domain_error("v_rsd: requires t >= 0");
    const double a = r - s;
    const double x = a * t;
    if (x == 0.0) return 0.0;
    const double ad = std::pow(a, d);
    if (x <= 30.0) {
        // P(d,x) = e^{-x} sum_{k>=d} x^k/k!  -- all terms positive.
        double term = 1.0;
        for (int k = 1; k <= d; ++k) term *= x / k;
        double sum = 0.0;
        int k = d;
        while (true) {
            sum += term;
            ++k;
            term *= x / k;
            if (term < 1e-18 * sum && k > d + 4) break;
        }
        return std::exp(-x) * sum / ad;
    }
    double partial = 1.0, term = 1.0;
    for (int k = 1; k < d; ++k) {
        term *= x / k;
        partial += term;
    }
    return (1.0 - std::exp(-x) * partial) / ad;
}

double w_rs(double r, double s, double t) {
    if (!(r > s)) throw std::domain_error("w_rs: requires r > s");
    if (t < 0.0) throw std::domain_error("w_rs: requires t >= 0");
    const double a = r - s;
    return -std::expm1(-t * a) / a;
}

double c_theta(const PathBoundConstants& c) {
    if (c.l < 0 || c.d < 0 || c.d > c.l) throw std::domain_error("c_theta: bad chain shape");
    if (!(c.theta > 0.0)) throw std::domain_error("c_theta: theta must be > 0");
    const double window = c.theta / (c.l - c.d + 1);
    // d = 0 means the chain starts at the dominant site: the exact prefix
    // factor is 1; v_{r,s,1} <= 1 only when r-s >= 1, so clamp.
    const double prefix = c.d == 0 ? std::min(1.0, v_rsd(c.r, c.s, 1, window))
                                   : v_rsd(c.r, c.s, c.d, window);
    return prefix * std::pow(w_rs(c.r, c.s, window), c.l - c.d);
}

double path_bound(const PathBoundConstants& c, double m, double t) {
    if (t < c.theta) throw std::domain_error("path_bound: bound not claimed below theta");
    if (!(m > 0.0)) throw std::domain_error("path_bound: requires m > 0");
    return c_theta(c) * std::pow(m, c.l) * std::exp(t * (c.r - c.mu * m));
}

namespace {

// Cut a walk into simple pieces, each containing a dominant-rate site, so
// the chain lemma applies to every piece at the leg's dominant rate.
bool split_walk(const std::vector<int>& sites, const std::vector<char>& is_dom,
                std::vector<std::vector<int>>& out) {
    std::set<int> seen(sites.begin(), sites.end());
    if (seen.size() == sites.size()) {
        out.push_back(sites);
        return true;
    }
    const auto has_dom = [&](const std::vector<int>& part) {
        return std::any_of(part.begin(), part.end(), [&](int s) { return is_dom[s] != 0; });
    };
    for (std::size_t p = 1; p + 1 < sites.size(); ++p) {
        const std::vector<int> left(sites.begin(), sites.begin() + p + 1);
        const std::vector<int> right(sites.begin() + p, sites.end());
        if (!has_dom(left) || !has_dom(right)) continue;
        std::vector<std::vector<int>> l_out, r_out;
        if (split_walk(left, is_dom, l_out) && split_walk(right, is_dom, r_out)) {
            out.insert(out.end(), l_out.begin(), l_out.end());
            out.insert(out.end(), r_out.begin(), r_out.end());
            return true;
        }
    }
    return false;
}

double leg_constant(const DynamicNetwork& net, const SimplePath& leg, double theta) {
    const DominantSite dom = leg_dominant(net, leg);
    double floor = dom.rate;
    for (int site : leg.sites) floor = std::min(floor, net.growth_rate(leg.season, site));
    const double sigma = floor - 1.0; // keeps r - s >= 1 by construction
    if (!(dom.rate - sigma >= 1.0 - 1e-12))
        throw std::logic_error("circuit_bound: floor construction violated");

    std::vector<char> is_dom(net.n, 0);
    for (int site : leg.sites)
        if (net.growth_rate(leg.season, site) == dom.rate) is_dom[site] = 1;

    std::vector<std::vector<int>> pieces;
    if (!split_walk(leg.sites, is_dom, pieces))
        throw ValidationError("circuit_bound: leg loop cannot be cut through a dominant site");
    const double theta_piece = theta / static_cast<double>(pieces.size());
    double c = 1.0;
    for (const std::vector<int>& piece : pieces) {
        int d = 0;
        for (std::size_t i = 0; i < piece.size(); ++i)
            if (is_dom[piece[i]]) {
                d = static_cast<int>(i);
                break;
            }
        PathBoundConstants pc;
        pc.r = dom.rate;
        pc.s = sigma;
        pc.d = d;
        pc.l = static_cast<int>(piece.size()) - 1;
        pc.theta = theta_piece;
        c *= c_theta(pc);
    }
    return c;
}

double max_self_drain(const DynamicNetwork& net) {
    double alpha = 0.0;
    for (const SeasonLayer& layer : net.layers)
        if (layer.self_drain.size() > 0) alpha = std::max(alpha, layer.self_drain.maxCoeff());
    return alpha;
}

} // namespace

CircuitBound circuit_bound(const DynamicNetwork& net, const QTCircuit& c, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("circuit_bound: theta must be > 0");
    net.validate();
    const double chi = growth_index_qcircuit(net, c); // also validates the circuit

    CircuitBound bound;
    bound.q = c.q;
    bound.chi_c = chi;
    bound.L = c.total_length();
    bound.C = 1.0;
    double mu = 0.0;
    double t_star = 0.0;
    for (const SimplePath& leg : c.legs) {
        bound.C *= leg_constant(net, leg, theta);
        t_star = std::max(t_star, theta / net.schedule.fraction(leg.season));
        if (leg.is_simple()) {
            mu = std::max(mu, static_cast<double>(net.n - 1));
        } else {
            int deg = 1;
            for (int site : leg.sites) deg = std::max(deg, net.out_degree(leg.season, site));
            mu = std::max(mu, static_cast<double>(std::min(deg, net.n - 1)));
        }
    }
    bound.mu = mu + max_self_drain(net);
    bound.T_star = t_star;
    return bound;
}

CircuitBound circuit_bound(const DynamicNetwork& net, const TCircuit& c, double theta) {
    return circuit_bound(net, as_qtcircuit(c), theta);
}

double default_theta(const DynamicNetwork& net, double T) {
    double shortest = 1.0;
    for (int k = 0; k < net.seasons(); ++k) shortest = std::min(shortest, net.schedule.fraction(k));
    return 0.5 * T * shortest;
}

double minimizing_function(double m, double T, const CircuitBound& bound) {
    if (!(T > bound.T_star)) throw std::domain_error("minimizing_function: T <= T_star");
    if (!(m >= 0.0)) throw std::domain_error("minimizing_function: m must be >= 0");
    return bound.C * std::pow(m, bound.L) * std::exp(bound.q * T * (bound.chi_c - bound.mu * m));
}

ThresholdBound threshold_bound(const CircuitBound& bound, double T) {
    if (!(bound.chi_c > 0.0)) throw std::domain_error("threshold_bound: requires chi^C > 0");
    if (bound.L < 1) throw std::domain_error("threshold_bound: circuit has no links");
    ThresholdBound out;
    const double alpha = bound.chi_c / (2.0 * bound.L * std::pow(bound.C, 1.0 / bound.L));
    out.value = std::exp(-alpha * bound.q * T);
    out.regime_ok = out.value < bound.chi_c / (2.0 * bound.mu);
    out.safe_value =
        std::pow(bound.C, -1.0 / bound.L) * std::exp(-bound.q * T * bound.chi_c / (2.0 * bound.L));
    if (T > bound.T_star) {
        out.applicable = out.regime_ok && minimizing_function(out.value, T, bound) >= 1.0;
        out.safe_applicable = out.safe_value < bound.chi_c / (2.0 * bound.mu);
    }
    return out;
}

std::vector<SimplePath> dead_end_paths(const DynamicNetwork& net, int season) {
    net.validate();
    if (season < 0 || season >= net.seasons())
        throw ValidationError("dead_end_paths: season out of range");

    std::vector<std::vector<int>> preds(net.n);
    std::vector<int> outdeg(net.n, 0);
    for (const Link& link : net.layers[season].links) {
        preds[link.to].push_back(link.from);
        ++outdeg[link.from];
    }
    for (auto& p : preds) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }

    std::vector<SimplePath> result;
    std::vector<int> rev; // trap first, grown backwards
    std::vector<char> used(net.n, 0);

    const std::function<void(int)> grow = [&](int head) {
        bool extended = false;
        for (int prev : preds[head]) {
            if (used[prev]) continue;
            used[prev] = 1;
            rev.push_back(prev);
            grow(prev);
            rev.pop_back();
            used[prev] = 0;
            extended = true;
        }
        if (!extended) {
            SimplePath path;
            path.season = season;
            path.sites.assign(rev.rbegin(), rev.rend());
            result.push_back(std::move(path));
        }
    };

    for (int trap = 0; trap < net.n; ++trap) {
        if (outdeg[trap] != 0 || !(net.growth_rate(season, trap) > 0.0)) continue;
        used.assign(net.n, 0);
        used[trap] = 1;
        rev = {trap};
        grow(trap);
    }
    std::sort(result.begin(), result.end(),
              [](const SimplePath& a, const SimplePath& b) { return a.sites < b.sites; });
    return result;
}

} // namespace dig
