#include "dig/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dig {

void SeasonSchedule::validate() const {
    if (breakpoints.size() < 2) throw ValidationError("schedule: needs at least one season");
    if (breakpoints.front() != 0.0) throw ValidationError("schedule: t_0 must be exactly 0");
    if (breakpoints.back() != 1.0) throw ValidationError("schedule: t_p must be exactly 1");
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        if (!(breakpoints[k] > breakpoints[k - 1]))
            throw ValidationError("schedule: breakpoints must be strictly increasing");
}

SeasonSchedule SeasonSchedule::uniform(int p) {
    SeasonSchedule s;
    s.breakpoints.resize(p + 1);
    for (int k = 0; k <= p; ++k) s.breakpoints[k] = static_cast<double>(k) / p;
    s.breakpoints[0] = 0.0;
    s.breakpoints[p] = 1.0;
    return s;
}

bool DynamicNetwork::strict() const {
    for (const SeasonLayer& layer : layers) {
        for (const Link& link : layer.links)
            if (link.weight != 1.0) return false;
        if (layer.self_drain.size() > 0 && (layer.self_drain.array() != 0.0).any()) return false;
    }
    return true;
}

int DynamicNetwork::out_degree(int season, int site) const {
    int deg = 0;
    for (const Link& link : layers[season].links)
        if (link.from == site) ++deg;
    return deg;
}

bool DynamicNetwork::has_link(int season, int from, int to) const {
    for (const Link& link : layers[season].links)
        if (link.from == from && link.to == to) return true;
    return false;
}

void DynamicNetwork::validate() const {
    std::ostringstream bad;
    if (n < 1) bad << "site count must be >= 1; ";
    if (!names.empty() && static_cast<int>(names.size()) != n) bad << "names length != n; ";
    try {
        schedule.validate();
    } catch (const ValidationError& e) {
        bad << e.what() << "; ";
    }
    if (static_cast<int>(layers.size()) != schedule.seasons())
        bad << "layers length != season count; ";
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const SeasonLayer& layer = layers[k];
        if (layer.growth.size() != n) bad << "season " << k + 1 << ": growth length != n; ";
        if (layer.self_drain.size() > 0) {
            if (layer.self_drain.size() != n)
                bad << "season " << k + 1 << ": self_drain length != n; ";
            else if ((layer.self_drain.array() < 0.0).any())
                bad << "season " << k + 1 << ": negative self_drain; ";
        }
        for (const Link& link : layer.links) {
            if (link.from < 0 || link.from >= n || link.to < 0 || link.to >= n)
                bad << "season " << k + 1 << ": link endpoint out of range; ";
            else if (link.from == link.to)
                bad << "season " << k + 1 << ": self-link at site " << link.from + 1 << "; ";
            if (!(link.weight > 0.0))
                bad << "season " << k + 1 << ": non-positive link weight; ";
        }
    }
    const std::string msg = bad.str();
    if (!msg.empty()) throw ValidationError("invalid network: " + msg);
}

std::vector<Matrix> season_generators(const DynamicNetwork& net, double m) {
    net.validate();
    if (!(m >= 0.0)) throw ValidationError("migration intensity must be >= 0");
    std::vector<Matrix> gens;
    gens.reserve(net.layers.size());
    for (const SeasonLayer& layer : net.layers) {
        Matrix a = layer.growth.asDiagonal();
        for (const Link& link : layer.links) {
            a(link.to, link.from) += m * link.weight;
            a(link.from, link.from) -= m * link.weight;
        }
        if (layer.self_drain.size() > 0)
            a.diagonal() -= m * layer.self_drain;
        gens.push_back(std::move(a));
    }
    return gens;
}

SwitchedLinearSystem assemble(const DynamicNetwork& net, const SystemParams& params) {
    if (!(params.T > 0.0)) throw ValidationError("period T must be > 0");
    std::vector<Matrix> gens = season_generators(net, params.m);
    SwitchedLinearSystem sys;
    sys.segments.reserve(gens.size());
    for (int k = 0; k < net.seasons(); ++k)
        sys.segments.push_back({params.T * net.schedule.fraction(k), std::move(gens[k])});
    return sys;
}

RelaxResult relax(const DynamicNetwork& net) {
    net.validate();
    double ell = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const SeasonLayer& layer : net.layers)
        for (const Link& link : layer.links) {
            ell = std::min(ell, link.weight);
            any = true;
        }
    if (!any) ell = 1.0;

    RelaxResult out;
    out.ell = ell;
    out.strict_net = net;
    for (SeasonLayer& layer : out.strict_net.layers) {
        Vector drain = layer.self_drain.size() > 0 ? Vector(layer.self_drain / ell)
                                                   : Vector(Vector::Zero(net.n));
        for (Link& link : layer.links) {
            drain(link.from) += (link.weight - ell) / ell;
            link.weight = 1.0;
        }
        layer.self_drain = (drain.array() == 0.0).all() ? Vector() : drain;
    }
    return out;
}

double average_growth(const DynamicNetwork& net, int site) {
    net.validate();
    if (site < 0 || site >= net.n) throw ValidationError("average_growth: site out of range");
    double sum = 0.0;
    for (int k = 0; k < net.seasons(); ++k)
        sum += net.layers[k].growth(site) * net.schedule.fraction(k);
    return sum;
}

} // namespace dig
