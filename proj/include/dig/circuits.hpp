#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dig/network.hpp"

namespace dig {

/**
 * A season-respecting walk segment: sites visited in order, consecutive
 * pairs linked in layer `season`. A single site (no link) is a valid
 * stay-put leg of length 0. For simple paths all sites are distinct;
 * qT-circuit legs may revisit sites.
 */
struct SimplePath {
    int season = 0;
    std::vector<int> sites;

    int length() const { return static_cast<int>(sites.size()) - 1; }
    int first() const { return sites.front(); }
    int last() const { return sites.back(); }
    bool is_simple() const;
};

/// Closed season-respecting walk: one simple path per season, consecutive
/// legs chained, returning to the start site after one period.
struct TCircuit {
    std::vector<SimplePath> legs;

    int start() const { return legs.front().first(); }
    int total_length() const;
};

/// q-period circuit; legs may contain loops, closure happens only after q
/// full periods (a_0 != a_{jp} for 0 < j < q, a_0 = a_{qp}).
struct QTCircuit {
    int q = 1;
    std::vector<SimplePath> legs; // q*p entries, leg[i].season = i mod p

    int start() const { return legs.front().first(); }
    int total_length() const;
};

QTCircuit as_qtcircuit(const TCircuit& c);

/// Highest growth rate among the leg's sites in the leg's season, with the
/// first site attaining it.
struct DominantSite {
    int site = 0;
    double rate = 0.0;
    int position = 0; // index within the leg's site list
};
DominantSite leg_dominant(const DynamicNetwork& net, const SimplePath& leg);

/// chi: period average of the per-season maximum growth rate over all sites.
double growth_index_system(const DynamicNetwork& net);

/// chi^C: as above but the per-season maximum runs over the circuit leg's
/// sites only; never exceeds growth_index_system.
double growth_index_circuit(const DynamicNetwork& net, const TCircuit& c);

/// Per-period average of the leg-dominant rates over the q periods.
double growth_index_qcircuit(const DynamicNetwork& net, const QTCircuit& c);

struct TCircuitList {
    std::vector<TCircuit> circuits;
    bool truncated = false;
};

/**
 * All simple T-circuits of the network in deterministic order (start site
 * ascending, then legs lexicographic by site indices). Stay-put legs are
 * admitted; circuits of total length 0 (all legs stay-put) are not.
 * Stops with `truncated` set once max_count circuits were collected.
 */
TCircuitList enumerate_tcircuits(const DynamicNetwork& net, int max_count = 1000000);

struct QTCircuitList {
    std::vector<QTCircuit> circuits;
    bool truncated = false;
};

/// All qT-circuits whose per-season walks have at most max_walk_len links,
/// same ordering and truncation rules as enumerate_tcircuits.
QTCircuitList enumerate_qtcircuits(const DynamicNetwork& net, int q, int max_walk_len,
                                   int max_count = 1000000);

struct BestCircuit {
    QTCircuit circuit;
    double index = 0.0;
    bool truncated = false;
};

/**
 * Circuit of highest (q-averaged) growth index among simple T-circuits
 * (q = 1) and walk-legged qT-circuits for q = 2..q_max. Ties break toward
 * smaller q, then shorter total length, then enumeration order. Empty when
 * the network has no circuit at all.
 */
std::optional<BestCircuit> best_circuit(const DynamicNetwork& net, int q_max, int max_walk_len,
                                        int max_count = 1000000);

/// Bar notation with 1-based site labels, e.g. "|1->3||3->1->2||2->3->1|".
std::string bar_notation(const TCircuit& c);
std::string bar_notation(const QTCircuit& c);

} // namespace dig
