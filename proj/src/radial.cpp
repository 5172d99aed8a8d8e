#include "dnr/radial.hpp"

#include <algorithm>
#include <unordered_map>

#include "dnr/errors.hpp"

namespace dnr {

int RadialSet::index_of(const Configuration& cfg) const {
    auto it = std::lower_bound(configs.begin(), configs.end(), cfg);
    if (it != configs.end() && *it == cfg)
        return static_cast<int>(it - configs.begin());
    return -1;
}

bool count_check(const Configuration& cfg, const ReducedGraph& g) {
    return cfg.closed_count() == g.node_count() - 1;
}

LoopCheckResult loop_check(const Configuration& cfg, const ReducedGraph& g) {
    LoopCheckResult res;
    res.visited.assign(static_cast<size_t>(g.node_count()), false);

    // Adjacency over closed edges only.
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(g.node_count()));
    for (int i = 0; i < g.switch_count(); ++i) {
        if (!cfg.closed(i)) continue;
        const ReducedEdge& e = g.edges[static_cast<size_t>(i)];
        adj[static_cast<size_t>(e.node_a)].push_back({e.node_b, i});
        adj[static_cast<size_t>(e.node_b)].push_back({e.node_a, i});
    }

    // BFS from the super node. A closed edge that is not the one we arrived
    // by and leads to an already visited node is a second path.
    std::vector<int> entry_edge(static_cast<size_t>(g.node_count()), -1);
    std::vector<int> queue{0};
    res.visited[0] = true;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int u = queue[qi];
        for (auto [v, ei] : adj[static_cast<size_t>(u)]) {
            if (ei == entry_edge[static_cast<size_t>(u)]) continue;
            if (res.visited[static_cast<size_t>(v)]) {
                res.ok = false;
                return res;
            }
            res.visited[static_cast<size_t>(v)] = true;
            entry_edge[static_cast<size_t>(v)] = ei;
            queue.push_back(v);
        }
    }
    res.ok = true;
    return res;
}

bool connectivity_check(const std::vector<bool>& visited, const ReducedGraph& g) {
    if (static_cast<int>(visited.size()) != g.node_count()) return false;
    return std::all_of(visited.begin(), visited.end(), [](bool v) { return v; });
}

RadialSet enumerate_radial(const ReducedGraph& g, const EnumerateOptions& opts) {
    int n = g.switch_count();
    if (n > opts.max_switches)
        throw validation_error("too_many_switches",
                               std::to_string(n) + " switches exceed the exhaustive-search guard of " +
                                   std::to_string(opts.max_switches));

    RadialSet set;
    set.switch_order = g.switch_order();
    set.stats.candidates_total = uint64_t(1) << n;

    // Cycle groups as bit masks over the canonical switch order.
    std::vector<uint32_t> group_masks;
    if (opts.prune_cycle_groups) {
        std::unordered_map<std::string, int> bit_of;
        for (int i = 0; i < n; ++i) bit_of[set.switch_order[static_cast<size_t>(i)]] = i;
        for (const auto& group : g.cycle_groups) {
            uint32_t mask = 0;
            for (const std::string& id : group) mask |= (1u << bit_of.at(id));
            group_masks.push_back(mask);
        }
    }

    int want_closed = g.node_count() - 1;
    for (uint64_t value = 0; value < set.stats.candidates_total; ++value) {
        uint32_t mask = static_cast<uint32_t>(value);

        bool pruned = false;
        for (uint32_t gm : group_masks) {
            if ((mask & gm) == gm) {
                pruned = true;
                break;
            }
        }
        if (pruned) {
            set.stats.pruned_cycle_groups++;
            continue;
        }
        set.stats.examined++;

        Configuration cfg{mask, n};
        if (cfg.closed_count() != want_closed) {
            set.stats.rejected_count_check++;
            continue;
        }
        LoopCheckResult loop = loop_check(cfg, g);
        if (!loop.ok) {
            set.stats.rejected_loop_check++;
            continue;
        }
        if (!connectivity_check(loop.visited, g)) {
            set.stats.rejected_connectivity++;
            continue;
        }
        set.stats.accepted++;
        set.configs.push_back(cfg);
    }
    // Ascending sweep already yields ascending integer order.
    return set;
}

} // namespace dnr
