#ifndef DNR_RADIAL_HPP
#define DNR_RADIAL_HPP

#include <cstdint>
#include <vector>

#include "dnr/graph_reduce.hpp"
#include "dnr/model.hpp"

namespace dnr {

struct RadialStats {
    uint64_t candidates_total = 0;        // 2^n
    uint64_t pruned_cycle_groups = 0;     // skipped before the checks
    uint64_t examined = 0;                // candidates_total - pruned
    uint64_t rejected_count_check = 0;
    uint64_t rejected_loop_check = 0;
    uint64_t rejected_connectivity = 0;
    uint64_t accepted = 0;
};

struct RadialSet {
    std::vector<std::string> switch_order; // canonical order behind each Configuration
    std::vector<Configuration> configs;    // ascending bit-vector integer value
    RadialStats stats;

    int size() const { return static_cast<int>(configs.size()); }
    // Position of cfg in configs, -1 if absent.
    int index_of(const Configuration& cfg) const;
};

// Radiality conditions, checked strictly in this order per configuration.

// Closed-switch count must equal graph node count minus 1.
bool count_check(const Configuration& cfg, const ReducedGraph& g);

// Path search over closed edges from the super node. ok is false as soon as
// some node is reachable by a second path (a cycle in the searched
// component); visited is returned for reuse by the connectivity check.
struct LoopCheckResult {
    bool ok = false;
    std::vector<bool> visited; // per graph node
};
LoopCheckResult loop_check(const Configuration& cfg, const ReducedGraph& g);

// True iff the loop check reached every node.
bool connectivity_check(const std::vector<bool>& visited, const ReducedGraph& g);

struct EnumerateOptions {
    bool prune_cycle_groups = true; // skip configurations closing a whole cycle group
    int max_switches = 30;
};

// Sweeps all 2^n bit vectors over the reduced graph's switches and keeps the
// radial ones. Deterministic: configurations are emitted in ascending integer
// order, bit i = i-th switch of the reduced graph's canonical order.
RadialSet enumerate_radial(const ReducedGraph& g, const EnumerateOptions& opts = {});

} // namespace dnr

#endif
