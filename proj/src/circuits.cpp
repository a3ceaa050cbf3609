#include "dig/circuits.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dig {

bool SimplePath::is_simple() const {
    std::set<int> seen(sites.begin(), sites.end());
    return seen.size() == sites.size();
}

int TCircuit::total_length() const {
    int total = 0;
    for (const SimplePath& leg : legs) total += leg.length();
    return total;
}

int QTCircuit::total_length() const {
    int total = 0;
    for (const SimplePath& leg : legs) total += leg.length();
    return total;
}

QTCircuit as_qtcircuit(const TCircuit& c) {
    QTCircuit q;
    q.q = 1;
    q.legs = c.legs;
    return q;
}

DominantSite leg_dominant(const DynamicNetwork& net, const SimplePath& leg) {
    DominantSite best{leg.sites.front(), net.growth_rate(leg.season, leg.sites.front()), 0};
    for (std::size_t i = 1; i < leg.sites.size(); ++i) {
        const double rate = net.growth_rate(leg.season, leg.sites[i]);
        if (rate > best.rate) best = {leg.sites[i], rate, static_cast<int>(i)};
    }
    return best;
}

double growth_index_system(const DynamicNetwork& net) {
    net.validate();
    double chi = 0.0;
    for (int k = 0; k < net.seasons(); ++k)
        chi += net.schedule.fraction(k) * net.layers[k].growth.maxCoeff();
    return chi;
}

namespace {

void check_leg(const DynamicNetwork& net, const SimplePath& leg, bool require_simple) {
    if (leg.sites.empty()) throw ValidationError("circuit: empty leg");
    if (leg.season < 0 || leg.season >= net.seasons())
        throw ValidationError("circuit: leg season out of range");
    for (int site : leg.sites)
        if (site < 0 || site >= net.n) throw ValidationError("circuit: leg site out of range");
    for (std::size_t i = 1; i < leg.sites.size(); ++i)
        if (!net.has_link(leg.season, leg.sites[i - 1], leg.sites[i]))
            throw ValidationError("circuit: leg uses a link absent from its season");
    if (require_simple && !leg.is_simple())
        throw ValidationError("circuit: leg of a simple T-circuit revisits a site");
}

void check_chain(const DynamicNetwork& net, const std::vector<SimplePath>& legs, int q,
                 bool require_simple) {
    const int p = net.seasons();
    if (static_cast<int>(legs.size()) != q * p)
        throw ValidationError("circuit: leg count does not match seasons");
    for (int i = 0; i < static_cast<int>(legs.size()); ++i) {
        if (legs[i].season != i % p)
            throw ValidationError("circuit: legs out of season order");
        check_leg(net, legs[i], require_simple);
        if (i > 0 && legs[i].first() != legs[i - 1].last())
            throw ValidationError("circuit: legs do not chain at a season boundary");
    }
    if (legs.back().last() != legs.front().first())
        throw ValidationError("circuit: does not close at the start site");
    for (int j = 1; j < q; ++j)
        if (legs[j * p - 1].last() == legs.front().first())
            throw ValidationError("circuit: closes before the final period");
}

} // namespace

double growth_index_circuit(const DynamicNetwork& net, const TCircuit& c) {
    net.validate();
    check_chain(net, c.legs, 1, true);
    double chi = 0.0;
    for (const SimplePath& leg : c.legs)
        chi += net.schedule.fraction(leg.season) * leg_dominant(net, leg).rate;
    return chi;
}

double growth_index_qcircuit(const DynamicNetwork& net, const QTCircuit& c) {
    net.validate();
    check_chain(net, c.legs, c.q, false);
    double chi = 0.0;
    for (const SimplePath& leg : c.legs)
        chi += net.schedule.fraction(leg.season) * leg_dominant(net, leg).rate;
    return chi / c.q;
}

namespace {

// Adjacency sorted by target so depth-first enumeration is lexicographic.
std::vector<std::vector<int>> sorted_adjacency(const DynamicNetwork& net, int season) {
    std::vector<std::vector<int>> adj(net.n);
    for (const Link& link : net.layers[season].links) adj[link.from].push_back(link.to);
    for (auto& targets : adj) {
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    }
    return adj;
}

struct Enumerator {
    const DynamicNetwork& net;
    int q = 1;
    int max_walk_len = 0; // walk mode only
    int max_count = 0;
    bool walks = false;

    std::vector<std::vector<std::vector<int>>> adj; // per season
    std::vector<SimplePath> current;
    std::vector<std::vector<SimplePath>> out;
    bool truncated = false;

    Enumerator(const DynamicNetwork& n_, int q_, int walk_len, int count, bool walks_)
        : net(n_), q(q_), max_walk_len(walk_len), max_count(count), walks(walks_) {
        for (int k = 0; k < net.seasons(); ++k) adj.push_back(sorted_adjacency(net, k));
    }

    bool full() const { return static_cast<int>(out.size()) >= max_count; }

    void run() {
        for (int start = 0; start < net.n && !full(); ++start) descend_season(0, start, start);
        truncated = full();
    }

    // Enumerate legs of season-occurrence `occ` starting at `site`, chaining
    // into later seasons; `start` is the circuit anchor. Each leg carries its
    // own visited set: a simple path may reuse sites of earlier legs.
    void descend_season(int occ, int site, int start) {
        SimplePath leg;
        leg.season = occ % net.seasons();
        leg.sites = {site};
        std::vector<char> visited(net.n, 0);
        visited[site] = 1;
        extend(occ, leg, visited, start);
    }

    void finish_leg(int occ, const SimplePath& leg, int start) {
        current.push_back(leg);
        const int total = occ + 1;
        const int goal = q * net.seasons();
        const int end = leg.last();
        if (total == goal) {
            // closure only at the very end, and no all-stay-put circuits
            if (end == start) {
                int length = 0;
                for (const SimplePath& l : current) length += l.length();
                if (length >= 1 && !full()) out.push_back(current);
            }
        } else {
            // qT-circuits must not close at intermediate period boundaries
            const bool period_boundary = total % net.seasons() == 0;
            if (!(period_boundary && end == start)) descend_season(total, end, start);
        }
        current.pop_back();
    }

    void extend(int occ, SimplePath& leg, std::vector<char>& visited, int start) {
        if (full()) return;
        finish_leg(occ, leg, start);
        if (full()) return;
        const int limit = walks ? max_walk_len : net.n - 1;
        if (leg.length() >= limit) return;
        for (int next : adj[leg.season][leg.last()]) {
            if (!walks && visited[next]) continue;
            leg.sites.push_back(next);
            if (!walks) visited[next] = 1;
            extend(occ, leg, visited, start);
            if (!walks) visited[next] = 0;
            leg.sites.pop_back();
            if (full()) return;
        }
    }
};

} // namespace

TCircuitList enumerate_tcircuits(const DynamicNetwork& net, int max_count) {
    net.validate();
    if (max_count < 1) throw ValidationError("enumerate_tcircuits: max_count must be >= 1");
    Enumerator e(net, 1, 0, max_count, false);
    e.run();
    TCircuitList list;
    list.truncated = e.truncated;
    list.circuits.reserve(e.out.size());
    for (auto& legs : e.out) list.circuits.push_back(TCircuit{std::move(legs)});
    return list;
}

QTCircuitList enumerate_qtcircuits(const DynamicNetwork& net, int q, int max_walk_len,
                                   int max_count) {
    net.validate();
    if (q < 1) throw ValidationError("enumerate_qtcircuits: q must be >= 1");
    if (max_walk_len < 0) throw ValidationError("enumerate_qtcircuits: negative walk length");
    if (max_count < 1) throw ValidationError("enumerate_qtcircuits: max_count must be >= 1");
    Enumerator e(net, q, max_walk_len, max_count, true);
    e.run();
    QTCircuitList list;
    list.truncated = e.truncated;
    list.circuits.reserve(e.out.size());
    for (auto& legs : e.out) list.circuits.push_back(QTCircuit{q, std::move(legs)});
    return list;
}

std::optional<BestCircuit> best_circuit(const DynamicNetwork& net, int q_max, int max_walk_len,
                                        int max_count) {
    net.validate();
    if (q_max < 1) throw ValidationError("best_circuit: q_max must be >= 1");
    std::optional<BestCircuit> best;
    bool truncated = false;

    const auto consider = [&](QTCircuit cand) {
        const double index = growth_index_qcircuit(net, cand);
        if (!best || index > best->index + 1e-15 ||
            (index > best->index - 1e-15 &&
             (cand.q < best->circuit.q ||
              (cand.q == best->circuit.q && cand.total_length() < best->circuit.total_length()))))
            best = BestCircuit{std::move(cand), index, false};
    };

    TCircuitList simple = enumerate_tcircuits(net, max_count);
    truncated |= simple.truncated;
    for (const TCircuit& c : simple.circuits) consider(as_qtcircuit(c));
    for (int q = 2; q <= q_max; ++q) {
        QTCircuitList walks = enumerate_qtcircuits(net, q, max_walk_len, max_count);
        truncated |= walks.truncated;
        for (QTCircuit& c : walks.circuits) consider(std::move(c));
    }
    if (best) best->truncated = truncated;
    return best;
}

namespace {

void append_leg(std::ostringstream& os, const SimplePath& leg) {
    os << '|';
    for (std::size_t i = 0; i < leg.sites.size(); ++i) {
        if (i > 0) os << "->";
        os << leg.sites[i] + 1;
    }
    os << '|';
}

} // namespace

std::string bar_notation(const TCircuit& c) {
    std::ostringstream os;
    for (const SimplePath& leg : c.legs) append_leg(os, leg);
    return os.str();
}

std::string bar_notation(const QTCircuit& c) {
    std::ostringstream os;
    for (const SimplePath& leg : c.legs) append_leg(os, leg);
    return os.str();
}

} // namespace dig
