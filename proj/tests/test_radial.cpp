#include "doctest.h"

#include <algorithm>

#include "dnr/errors.hpp"
#include "dnr/radial.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dnr;

namespace {

std::vector<std::string> config_strings(const RadialSet& set) {
    std::vector<std::string> out;
    for (const auto& cfg : set.configs) out.push_back(cfg.to_string());
    return out;
}

// Masks over the full canonical switch order, fixed_open switches forced to 0.
std::vector<uint32_t> expand_to_case_masks(const RadialSet& set, const NetworkCase& c) {
    auto full_order = c.canonical_switch_order();
    std::vector<int> bit_of;
    for (const auto& id : set.switch_order) {
        auto it = std::find(full_order.begin(), full_order.end(), id);
        REQUIRE(it != full_order.end());
        bit_of.push_back(static_cast<int>(it - full_order.begin()));
    }
    std::vector<uint32_t> masks;
    for (const auto& cfg : set.configs) {
        uint32_t m = 0;
        for (int i = 0; i < cfg.n; ++i)
            if (cfg.closed(i)) m |= 1u << bit_of[static_cast<size_t>(i)];
        masks.push_back(m);
    }
    std::sort(masks.begin(), masks.end());
    return masks;
}

} // namespace

TEST_CASE("simple case yields exactly the 5 known radial configurations") {
    ReducedGraph g = reduce(helpers::simple_case());
    RadialSet set = enumerate_radial(g);

    CHECK(set.switch_order == std::vector<std::string>{"sw1", "sw2", "sw3", "sw4"});
    CHECK(config_strings(set) ==
          std::vector<std::string>{"1010", "0110", "1001", "0101", "0011"});
    CHECK(set.stats.candidates_total == 16);
    CHECK(set.stats.accepted == 5);
    CHECK(set.stats.pruned_cycle_groups + set.stats.examined == 16);
    CHECK(set.stats.examined - set.stats.accepted ==
          set.stats.rejected_count_check + set.stats.rejected_loop_check +
              set.stats.rejected_connectivity);
    CHECK(std::is_sorted(set.configs.begin(), set.configs.end()));
    CHECK(set.index_of(Configuration::from_string("1001")) == 2);
    CHECK(set.index_of(Configuration::from_string("1111")) == -1);
}

TEST_CASE("spanish-like case yields 128 candidates and 14 radial configurations") {
    ReducedGraph g = reduce(helpers::spanish_case());
    RadialSet set = enumerate_radial(g);
    CHECK(set.stats.candidates_total == 128);
    CHECK(set.stats.accepted == 14);
    CHECK(set.size() == 14);
}

TEST_CASE("three radiality conditions fire in order") {
    ReducedGraph g = reduce(helpers::simple_case());

    // wrong count: 3 closed switches for 3 nodes
    CHECK_FALSE(count_check(Configuration::from_string("1110"), g));
    CHECK(count_check(Configuration::from_string("1010"), g));

    // right count, loop: parallel pair sw1 sw2
    Configuration loop = Configuration::from_string("1100");
    CHECK(count_check(loop, g));
    CHECK_FALSE(loop_check(loop, g).ok);

    // radial: loop free and connected
    Configuration good = Configuration::from_string("0011");
    LoopCheckResult res = loop_check(good, g);
    CHECK(res.ok);
    CHECK(connectivity_check(res.visited, g));
}

TEST_CASE("disconnection is caught by the connectivity condition") {
    // path graph S - A - B plus an A-B tie: closing both A-B edges isolates
    // nothing, but closing only the tie pair leaves S unreached
    NetworkCase c;
    c.base_mva = 1.0;
    c.buses = {{"f", 0.95, 1.05, true}, {"a", 0.95, 1.05, false}, {"b", 0.95, 1.05, false}};
    c.switches = {{"s1", "f", "a", ""}, {"s2", "a", "b", ""}, {"s3", "a", "b", ""}};
    c.validate();
    ReducedGraph g = reduce(c);

    Configuration cut = Configuration::from_string("011"); // s2 s3 closed, s1 open
    CHECK(count_check(cut, g));
    // the a-b loop sits outside the component searched from the super node,
    // so the loop check passes and connectivity rejects
    LoopCheckResult res = loop_check(cut, g);
    CHECK(res.ok);
    CHECK_FALSE(connectivity_check(res.visited, g));

    Configuration bridgeless = Configuration::from_string("010");
    CHECK_FALSE(count_check(bridgeless, g));

    RadialSet set = enumerate_radial(g);
    CHECK(config_strings(set) == std::vector<std::string>{"110", "101"});

    // without pruning that configuration must be rejected by connectivity
    EnumerateOptions no_prune;
    no_prune.prune_cycle_groups = false;
    RadialSet swept = enumerate_radial(g, no_prune);
    CHECK(config_strings(swept) == config_strings(set));
    CHECK(swept.stats.rejected_connectivity > 0);
}

TEST_CASE("enumeration matches the union-find oracle on every fixture") {
    for (const char* name : {"simple_case.json", "spanish_like.json"}) {
        NetworkCase c = dnr::load_case_file(helpers::fixture_path(name));
        ReducedGraph g = reduce(c);
        RadialSet set = enumerate_radial(g);
        CHECK(expand_to_case_masks(set, c) == oracles::radial_masks(c));
    }
}

TEST_CASE("enumeration matches the oracle when a degenerate switch exists") {
    NetworkCase c;
    c.base_mva = 1.0;
    c.buses = {{"f", 0.95, 1.05, true},
               {"a", 0.95, 1.05, false},
               {"b", 0.95, 1.05, false},
               {"z", 0.95, 1.05, false}};
    c.branches = {{"br1", "f", "z", 0.01, 0.02, 0.0}};
    c.switches = {{"s1", "f", "a", ""},
                  {"s2", "a", "b", ""},
                  {"s3", "f", "b", ""},
                  {"s_loop", "f", "z", ""}}; // degenerate: z is contracted into the super node
    c.validate();

    ReducedGraph g = reduce(c);
    CHECK(g.fixed_open == std::vector<std::string>{"s_loop"});
    RadialSet set = enumerate_radial(g);
    CHECK(set.switch_order == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(expand_to_case_masks(set, c) == oracles::radial_masks(c));
}

TEST_CASE("pruning never changes the result") {
    for (const char* name : {"simple_case.json", "spanish_like.json"}) {
        ReducedGraph g = reduce(dnr::load_case_file(helpers::fixture_path(name)));
        EnumerateOptions no_prune;
        no_prune.prune_cycle_groups = false;
        RadialSet pruned = enumerate_radial(g);
        RadialSet swept = enumerate_radial(g, no_prune);
        CHECK(config_strings(pruned) == config_strings(swept));
        CHECK(swept.stats.pruned_cycle_groups == 0);
        CHECK(pruned.stats.pruned_cycle_groups > 0);
        CHECK(pruned.stats.accepted == swept.stats.accepted);
    }
}

TEST_CASE("accepted count equals the kirchhoff spanning tree count") {
    ReducedGraph simple = reduce(helpers::simple_case());
    CHECK(oracles::spanning_tree_count(simple) == 5);
    ReducedGraph spanish = reduce(helpers::spanish_case());
    CHECK(oracles::spanning_tree_count(spanish) == 14);
}

TEST_CASE("enumerate refuses more than 30 switches") {
    ReducedGraph g;
    g.nodes.resize(2);
    for (int i = 0; i < 31; ++i) {
        ReducedEdge e;
        e.switch_index = i;
        e.switch_id = "s" + std::to_string(i);
        e.node_a = 0;
        e.node_b = 1;
        g.edges.push_back(e);
    }
    try {
        enumerate_radial(g);
        FAIL("expected too_many_switches");
    } catch (const dnr::Error& e) {
        CHECK(e.code() == "too_many_switches");
    }
}
