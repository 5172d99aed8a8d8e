#ifndef DNR_GRAPH_REDUCE_HPP
#define DNR_GRAPH_REDUCE_HPP

#include <string>
#include <vector>

#include "dnr/model.hpp"

namespace dnr {

// Contracted switch graph. Node 0 is the super node: it holds every
// feeder-head bus plus whatever is reachable from one over switch-free
// branches. Every other node is a maximal switch-free connected bus set.
// Every edge is a switch.
struct ReducedEdge {
    int switch_index = -1; // into NetworkCase::switches
    std::string switch_id;
    int node_a = 0;
    int node_b = 0;
};

struct ReducedGraph {
    std::vector<std::vector<int>> nodes; // bus indices per graph node, node 0 = super node
    std::vector<ReducedEdge> edges;      // one per non-degenerate switch, sorted by switch id
    std::vector<std::string> fixed_open; // self-loop switches, permanently opened
    std::vector<std::vector<std::string>> cycle_groups; // switch-id sets on a common cycle

    int node_count() const { return static_cast<int>(nodes.size()); }
    int switch_count() const { return static_cast<int>(edges.size()); }

    // Canonical order of the non-degenerate switches (Configuration bit i).
    std::vector<std::string> switch_order() const;
    // Matching indices into NetworkCase::switches.
    std::vector<int> active_switch_indices() const;
    // Graph node containing the given bus.
    int node_of_bus(int bus_index) const;
};

// Three-step contraction: merge feeder heads into the super node, contract
// switch-free regions, keep switches as edges. Self-loop switches land in
// fixed_open; cycle_groups hold a fundamental cycle basis of the reduced
// multigraph (closing a whole group can never be radial).
ReducedGraph reduce(const NetworkCase& c);

// Degenerate-switch classification on an already contracted graph; reduce()
// calls this, exposed separately for tests. Input edges may still contain
// self loops; output graph has them moved to fixed_open.
void classify_degenerate(ReducedGraph& g, std::vector<ReducedEdge> raw_edges);

// Debug dump for --dump-reduced (bus ids per node, edges, fixed_open,
// cycle_groups).
std::string dump_reduced(const ReducedGraph& g, const NetworkCase& c);

} // namespace dnr

#endif
