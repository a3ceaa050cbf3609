#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "dig/circuits.hpp"
#include "support/brute_circuits.hpp"
#include "support/test_nets.hpp"

using namespace dig;

namespace {

// The growth-riding tour of the rotating trio: |1->3||3->1->2||2->3->1|.
TCircuit tour_circuit() {
    TCircuit c;
    c.legs.push_back({0, {0, 2}});
    c.legs.push_back({1, {2, 0, 1}});
    c.legs.push_back({2, {1, 2, 0}});
    return c;
}

DynamicNetwork single_site_net() {
    DynamicNetwork net;
    net.n = 1;
    net.schedule = SeasonSchedule::uniform(2);
    for (int k = 0; k < 2; ++k) {
        SeasonLayer layer;
        layer.growth = Vector::Constant(1, k == 0 ? 1.0 : -0.25);
        net.layers.push_back(layer);
    }
    return net;
}

} // namespace

TEST_CASE("growth_index_system") {
    std::mt19937 rng(31);
    DynamicNetwork net = testnets::random_strict(rng);
    for (auto& layer : net.layers) layer.growth.setConstant(0.4);
    CHECK(growth_index_system(net) == doctest::Approx(0.4).epsilon(1e-14));

    CHECK(growth_index_system(testnets::rotating_trio()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(growth_index_system(testnets::birds_to_source()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("growth_index_circuit: trivial single-site circuit equals the average growth") {
    const DynamicNetwork net = single_site_net();
    TCircuit c;
    c.legs.push_back({0, {0}});
    c.legs.push_back({1, {0}});
    CHECK(growth_index_circuit(net, c) == doctest::Approx(average_growth(net, 0)).epsilon(1e-14));
}

TEST_CASE("growth_index_circuit: the growth-riding tour has index 1") {
    CHECK(growth_index_circuit(testnets::rotating_trio(), tour_circuit()) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("growth_index_circuit: the only circuit of the two-season trio has index (s+r)/2") {
    const DynamicNetwork net = testnets::trio_two_seasons();
    TCircuit c;
    c.legs.push_back({0, {0, 1}});
    c.legs.push_back({1, {1, 0}});
    CHECK(growth_index_circuit(net, c) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("growth_index_circuit: rejects mismatched circuits") {
    CHECK_THROWS_AS(growth_index_circuit(testnets::trio_two_seasons(), tour_circuit()), ValidationError);
}

TEST_CASE("growth_index_qcircuit: q=1 coincides with the simple index") {
    const DynamicNetwork net = testnets::rotating_trio();
    const TCircuit c = tour_circuit();
    CHECK(growth_index_qcircuit(net, as_qtcircuit(c)) ==
          doctest::Approx(growth_index_circuit(net, c)).epsilon(1e-15));
}

TEST_CASE("growth_index_qcircuit: loop circuit has index r") {
    const DynamicNetwork net = testnets::trio_two_seasons();
    QTCircuit c;
    c.q = 1;
    c.legs.push_back({0, {0, 1, 2, 1}});
    c.legs.push_back({1, {1, 0}});
    CHECK(growth_index_qcircuit(net, c) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("growth_index_qcircuit: the 2T-circuit of the three-season trio") {
    const DynamicNetwork net = testnets::trio_three_seasons(); // r=1, s=-0.9
    QTCircuit c;
    c.q = 2;
    c.legs.push_back({0, {0}});
    c.legs.push_back({1, {0, 1}});
    c.legs.push_back({2, {1}});
    c.legs.push_back({0, {1, 2}});
    c.legs.push_back({1, {2}});
    c.legs.push_back({2, {2, 0}});
    CHECK(growth_index_qcircuit(net, c) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("growth_index_qcircuit: rejects premature closure") {
    // two copies of a 1T-circuit are not a valid 2T-circuit
    const DynamicNetwork net = testnets::trio_two_seasons();
    QTCircuit c;
    c.q = 2;
    c.legs.push_back({0, {0, 1}});
    c.legs.push_back({1, {1, 0}});
    c.legs.push_back({0, {0, 1}});
    c.legs.push_back({1, {1, 0}});
    CHECK_THROWS_AS(growth_index_qcircuit(net, c), ValidationError);
}

TEST_CASE("enumerate_tcircuits: no closed route means an empty list") {
    DynamicNetwork net;
    net.n = 2;
    net.schedule = SeasonSchedule::uniform(2);
    SeasonLayer s1, s2;
    s1.growth = Vector::Zero(2);
    s2.growth = Vector::Zero(2);
    s1.links.push_back({0, 1, 1.0}); // 1->2 and never back
    net.layers = {s1, s2};
    CHECK(enumerate_tcircuits(net).circuits.empty());
}

TEST_CASE("enumerate_tcircuits: the two-season trio has exactly one") {
    const TCircuitList list = enumerate_tcircuits(testnets::trio_two_seasons());
    REQUIRE(list.circuits.size() == 1);
    CHECK(bar_notation(list.circuits.front()) == "|1->2||2->1|");
    CHECK_FALSE(list.truncated);
}

TEST_CASE("enumerate_tcircuits: the three-season trio has none") {
    CHECK(enumerate_tcircuits(testnets::trio_three_seasons()).circuits.empty());
    CHECK(enumerate_tcircuits(testnets::trio_three_seasons(-1.0)).circuits.empty());
}

TEST_CASE("enumerate_tcircuits: contains the full tour of the rotating trio") {
    const TCircuitList list = enumerate_tcircuits(testnets::rotating_trio());
    const std::string tour = bar_notation(tour_circuit());
    bool found = false;
    for (const TCircuit& c : list.circuits)
        if (bar_notation(c) == tour) found = true;
    CHECK(found);
}

TEST_CASE("enumerate_tcircuits: truncation flag") {
    const TCircuitList list = enumerate_tcircuits(testnets::rotating_trio(), 1);
    CHECK(list.circuits.size() == 1);
    CHECK(list.truncated);
}

TEST_CASE("enumerate_tcircuits: agrees with the brute-force product search") {
    std::mt19937 rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const DynamicNetwork net = testnets::random_strict(rng, 4, 3, 0.45);
        std::vector<std::vector<std::vector<int>>> got;
        for (const TCircuit& c : enumerate_tcircuits(net).circuits) {
            std::vector<std::vector<int>> legs;
            for (const SimplePath& leg : c.legs) legs.push_back(leg.sites);
            got.push_back(std::move(legs));
        }
        std::sort(got.begin(), got.end());
        CHECK(got == brute::tcircuits(net));
    }
}

TEST_CASE("enumerate_qtcircuits: q=1 on loop-free layers equals the simple set") {
    // layered DAG per season: no within-season cycles, so walks are simple
    DynamicNetwork net;
    net.n = 3;
    net.schedule = SeasonSchedule::uniform(2);
    SeasonLayer s1, s2;
    s1.growth = Vector::Zero(3);
    s2.growth = Vector::Zero(3);
    s1.links = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
    s2.links = {{2, 0, 1.0}, {1, 0, 1.0}};
    net.layers = {s1, s2};

    std::vector<std::string> simple, walks;
    for (const TCircuit& c : enumerate_tcircuits(net).circuits) simple.push_back(bar_notation(c));
    for (const QTCircuit& c : enumerate_qtcircuits(net, 1, net.n - 1).circuits)
        walks.push_back(bar_notation(c));
    std::sort(simple.begin(), simple.end());
    std::sort(walks.begin(), walks.end());
    CHECK(simple == walks);
}

TEST_CASE("enumerate_qtcircuits: finds the loop circuit") {
    const QTCircuitList list = enumerate_qtcircuits(testnets::trio_two_seasons(), 1, 3);
    bool found = false;
    for (const QTCircuit& c : list.circuits)
        if (bar_notation(c) == "|1->2->3->2||2->1|") found = true;
    CHECK(found);
}

TEST_CASE("enumerate_qtcircuits: finds the 2T-circuit of the three-season trio") {
    const QTCircuitList list = enumerate_qtcircuits(testnets::trio_three_seasons(), 2, 2);
    bool found = false;
    for (const QTCircuit& c : list.circuits)
        if (bar_notation(c) == "|1||1->2||2||2->3||3||3->1|") found = true;
    CHECK(found);
}

TEST_CASE("best_circuit: the rotating trio attains index 1") {
    const auto best = best_circuit(testnets::rotating_trio(), 1, 6);
    REQUIRE(best.has_value());
    CHECK(best->index == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("best_circuit: none for the three-season trio at q_max=1") {
    CHECK_FALSE(best_circuit(testnets::trio_three_seasons(), 1, 6).has_value());
}

TEST_CASE("best_circuit: q_max=2 on the three-season trio at s=-0.8") {
    DynamicNetwork net = testnets::trio_three_seasons();
    for (auto& layer : net.layers)
        for (int i = 0; i < net.n; ++i)
            if (layer.growth(i) < 0.0) layer.growth(i) = -0.8;
    const auto best = best_circuit(net, 2, 6);
    REQUIRE(best.has_value());
    CHECK(best->index == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(best->circuit.q == 2);
}

TEST_CASE("chi^C never exceeds chi") {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const DynamicNetwork net = testnets::random_strict(rng);
        const double chi = growth_index_system(net);
        for (const TCircuit& c : enumerate_tcircuits(net, 500).circuits)
            CHECK(growth_index_circuit(net, c) <= chi + 1e-15);
    }
}

TEST_CASE("rotation invariance of the growth index") {
    std::mt19937 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const DynamicNetwork net = testnets::random_strict(rng, 4, 3, 0.5);
        const int p = net.seasons();
        const TCircuitList list = enumerate_tcircuits(net, 50);
        if (list.circuits.empty()) continue;
        const TCircuit& c = list.circuits.front();

        // rotate the starting season: schedule fractions and layers shift by one
        DynamicNetwork rotated;
        rotated.n = net.n;
        rotated.schedule.breakpoints.push_back(0.0);
        for (int k = 0; k < p; ++k) {
            const int src = (k + 1) % p;
            rotated.schedule.breakpoints.push_back(rotated.schedule.breakpoints.back() +
                                                   net.schedule.fraction(src));
            rotated.layers.push_back(net.layers[src]);
        }
        rotated.schedule.breakpoints.back() = 1.0;

        TCircuit shifted;
        for (int k = 0; k < p; ++k) {
            SimplePath leg = c.legs[(k + 1) % p];
            leg.season = k;
            shifted.legs.push_back(std::move(leg));
        }
        CHECK(growth_index_circuit(rotated, shifted) ==
              doctest::Approx(growth_index_circuit(net, c)).epsilon(1e-12));
    }
}

TEST_CASE("irreducible seasons: best_circuit attains the system index") {
    std::mt19937 rng(35);
    std::uniform_real_distribution<double> rate(-2.0, 2.0), coin(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        DynamicNetwork net;
        net.n = 2 + trial % 4;
        // p >= 2: the season-chaining construction needs seasons to cross
        const int p = net.n == 5 ? 2 : 2 + trial % 2;
        net.schedule = SeasonSchedule::uniform(p);
        for (int k = 0; k < p; ++k) {
            SeasonLayer layer;
            layer.growth.resize(net.n);
            for (int i = 0; i < net.n; ++i) layer.growth(i) = rate(rng);
            // ring plus random extras: strongly connected by construction
            for (int i = 0; i < net.n; ++i) layer.links.push_back({i, (i + 1) % net.n, 1.0});
            net.layers.push_back(std::move(layer));
            for (int i = 0; i < net.n; ++i)
                for (int j = 0; j < net.n; ++j)
                    if (i != j && coin(rng) < 0.3 && !net.has_link(k, i, j))
                        net.layers[k].links.push_back({i, j, 1.0});
        }
        const auto best = best_circuit(net, 1, 2 * net.n);
        REQUIRE(best.has_value());
        CHECK(best->index == doctest::Approx(growth_index_system(net)).epsilon(1e-12));
    }
}

TEST_CASE("deterministic enumeration order") {
    const TCircuitList a = enumerate_tcircuits(testnets::rotating_trio());
    const TCircuitList b = enumerate_tcircuits(testnets::rotating_trio());
    REQUIRE(a.circuits.size() == b.circuits.size());
    for (std::size_t i = 0; i < a.circuits.size(); ++i)
        CHECK(bar_notation(a.circuits[i]) == bar_notation(b.circuits[i]));
    // start sites are nondecreasing
    for (std::size_t i = 1; i < a.circuits.size(); ++i)
        CHECK(a.circuits[i - 1].start() <= a.circuits[i].start());
}
