#include "dnr/graph_reduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <json.hpp>

#include "dnr/errors.hpp"

namespace dnr {

std::vector<std::string> ReducedGraph::switch_order() const {
    std::vector<std::string> ids;
    ids.reserve(edges.size());
    for (const ReducedEdge& e : edges) ids.push_back(e.switch_id);
    return ids;
}

std::vector<int> ReducedGraph::active_switch_indices() const {
    std::vector<int> idx;
    idx.reserve(edges.size());
    for (const ReducedEdge& e : edges) idx.push_back(e.switch_index);
    return idx;
}

int ReducedGraph::node_of_bus(int bus_index) const {
    for (int n = 0; n < node_count(); ++n)
        for (int b : nodes[static_cast<size_t>(n)])
            if (b == bus_index) return n;
    return -1;
}

void classify_degenerate(ReducedGraph& g, std::vector<ReducedEdge> raw_edges) {
    g.edges.clear();
    g.fixed_open.clear();
    g.cycle_groups.clear();

    for (ReducedEdge& e : raw_edges) {
        if (e.node_a == e.node_b)
            g.fixed_open.push_back(e.switch_id);
        else
            g.edges.push_back(std::move(e));
    }
    std::sort(g.fixed_open.begin(), g.fixed_open.end());
    std::sort(g.edges.begin(), g.edges.end(),
              [](const ReducedEdge& a, const ReducedEdge& b) {
                  return a.switch_id < b.switch_id;
              });

    // Fundamental cycle basis: BFS tree from the super node, one cycle group
    // per non-tree edge (the edge plus the tree path between its endpoints).
    int n = g.node_count();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(n)); // (neighbor, edge idx)
    std::vector<int> parent_node(static_cast<size_t>(n), -1);
    std::vector<int> parent_edge(static_cast<size_t>(n), -1);
    std::vector<int> depth(static_cast<size_t>(n), -1);
    std::vector<bool> tree_edge(g.edges.size(), false);

    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
        const ReducedEdge& e = g.edges[static_cast<size_t>(i)];
        adj[static_cast<size_t>(e.node_a)].push_back({e.node_b, i});
        adj[static_cast<size_t>(e.node_b)].push_back({e.node_a, i});
    }

    std::vector<int> queue;
    for (int start = 0; start < n; ++start) {
        if (depth[static_cast<size_t>(start)] >= 0) continue;
        depth[static_cast<size_t>(start)] = 0;
        queue.assign(1, start);
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (auto [v, ei] : adj[static_cast<size_t>(u)]) {
                if (depth[static_cast<size_t>(v)] >= 0) continue;
                depth[static_cast<size_t>(v)] = depth[static_cast<size_t>(u)] + 1;
                parent_node[static_cast<size_t>(v)] = u;
                parent_edge[static_cast<size_t>(v)] = ei;
                tree_edge[static_cast<size_t>(ei)] = true;
                queue.push_back(v);
            }
        }
    }

    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
        if (tree_edge[static_cast<size_t>(i)]) continue;
        const ReducedEdge& e = g.edges[static_cast<size_t>(i)];
        std::vector<std::string> group{e.switch_id};
        int a = e.node_a;
        int b = e.node_b;
        while (a != b) {
            if (depth[static_cast<size_t>(a)] < depth[static_cast<size_t>(b)]) std::swap(a, b);
            group.push_back(g.edges[static_cast<size_t>(parent_edge[static_cast<size_t>(a)])].switch_id);
            a = parent_node[static_cast<size_t>(a)];
        }
        std::sort(group.begin(), group.end());
        g.cycle_groups.push_back(std::move(group));
    }
    std::sort(g.cycle_groups.begin(), g.cycle_groups.end());
}

ReducedGraph reduce(const NetworkCase& c) {
    int nb = static_cast<int>(c.buses.size());

    // Union feeder heads together, then both ends of every switch-free branch.
    std::vector<int> parent(static_cast<size_t>(nb));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); };

    int first_feeder = -1;
    for (int i = 0; i < nb; ++i) {
        if (!c.buses[static_cast<size_t>(i)].is_feeder_head) continue;
        if (first_feeder < 0)
            first_feeder = i;
        else
            unite(first_feeder, i);
    }
    if (first_feeder < 0)
        throw validation_error("no_feeder_head", "case has no feeder-head bus");
    for (const Branch& br : c.branches)
        unite(c.bus_index(br.from_bus), c.bus_index(br.to_bus));

    ReducedGraph g;
    std::map<int, int> root_to_node;
    // Super node first, then remaining components ordered by smallest bus index.
    root_to_node[find(first_feeder)] = 0;
    g.nodes.emplace_back();
    for (int i = 0; i < nb; ++i) {
        int root = find(i);
        auto it = root_to_node.find(root);
        if (it == root_to_node.end()) {
            it = root_to_node.emplace(root, g.node_count()).first;
            g.nodes.emplace_back();
        }
        g.nodes[static_cast<size_t>(it->second)].push_back(i);
    }

    std::vector<ReducedEdge> raw;
    raw.reserve(c.switches.size());
    for (int si = 0; si < static_cast<int>(c.switches.size()); ++si) {
        const Switch& sw = c.switches[static_cast<size_t>(si)];
        ReducedEdge e;
        e.switch_index = si;
        e.switch_id = sw.id;
        e.node_a = root_to_node.at(find(c.bus_index(sw.from_bus)));
        e.node_b = root_to_node.at(find(c.bus_index(sw.to_bus)));
        raw.push_back(std::move(e));
    }
    classify_degenerate(g, std::move(raw));
    return g;
}

std::string dump_reduced(const ReducedGraph& g, const NetworkCase& c) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : g.nodes) {
        nlohmann::ordered_json ids = nlohmann::ordered_json::array();
        for (int b : node) ids.push_back(c.buses[static_cast<size_t>(b)].id);
        doc["nodes"].push_back(std::move(ids));
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const ReducedEdge& e : g.edges) {
        nlohmann::ordered_json je;
        je["switch"] = e.switch_id;
        je["node_a"] = e.node_a;
        je["node_b"] = e.node_b;
        doc["edges"].push_back(std::move(je));
    }
    doc["fixed_open"] = g.fixed_open;
    doc["cycle_groups"] = g.cycle_groups;
    return doc.dump(2) + "\n";
}

} // namespace dnr
