#include "dnr/model.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "dnr/errors.hpp"

namespace dnr {

namespace {

// Plain union-find; path halving plus union by size.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

} // namespace

void NetworkCase::validate() const {
    if (buses.empty())
        throw validation_error("empty_case", "case has no buses");
    if (base_mva <= 0.0)
        throw validation_error("bad_base_mva", "base_mva must be positive");

    std::unordered_map<std::string, int> bus_idx;
    for (int i = 0; i < static_cast<int>(buses.size()); ++i) {
        const Bus& bus = buses[i];
        if (bus.id.empty())
            throw validation_error("empty_id", "bus with empty id");
        if (!bus_idx.emplace(bus.id, i).second)
            throw validation_error("duplicate_id", "duplicate bus id '" + bus.id + "'");
        if (!(bus.vmin > 0.0 && bus.vmin < bus.vmax))
            throw validation_error("bad_voltage_bounds",
                                   "bus '" + bus.id + "' requires 0 < vmin < vmax");
    }

    auto require_bus = [&](const std::string& id, const std::string& owner) {
        if (bus_idx.find(id) == bus_idx.end())
            throw validation_error("dangling_bus_ref",
                                   owner + " references missing bus '" + id + "'");
    };

    std::unordered_set<std::string> branch_ids;
    for (const Branch& br : branches) {
        if (!branch_ids.insert(br.id).second)
            throw validation_error("duplicate_id", "duplicate branch id '" + br.id + "'");
        require_bus(br.from_bus, "branch '" + br.id + "'");
        require_bus(br.to_bus, "branch '" + br.id + "'");
        if (br.from_bus == br.to_bus)
            throw validation_error("self_loop_branch",
                                   "branch '" + br.id + "' connects a bus to itself");
        if (br.r == 0.0 && br.x == 0.0)
            throw validation_error("zero_impedance_branch",
                                   "branch '" + br.id + "' has r = x = 0");
    }

    std::unordered_set<std::string> switch_ids;
    for (const Switch& sw : switches) {
        if (!switch_ids.insert(sw.id).second)
            throw validation_error("duplicate_id", "duplicate switch id '" + sw.id + "'");
        require_bus(sw.from_bus, "switch '" + sw.id + "'");
        require_bus(sw.to_bus, "switch '" + sw.id + "'");
    }

    std::unordered_set<std::string> unit_ids;
    for (const Load& load : loads) {
        if (!unit_ids.insert(load.id).second)
            throw validation_error("duplicate_id", "duplicate load id '" + load.id + "'");
        require_bus(load.bus, "load '" + load.id + "'");
        if (!(load.power_factor > 0.0 && load.power_factor <= 1.0))
            throw validation_error("bad_power_factor",
                                   "load '" + load.id + "' power_factor outside (0,1]");
    }
    for (const Generator& gen : generators) {
        if (!unit_ids.insert(gen.id).second)
            throw validation_error("duplicate_id", "duplicate generator id '" + gen.id + "'");
        require_bus(gen.bus, "generator '" + gen.id + "'");
        if (!(gen.power_factor > 0.0 && gen.power_factor <= 1.0))
            throw validation_error("bad_power_factor",
                                   "generator '" + gen.id + "' power_factor outside (0,1]");
    }

    bool any_feeder = std::any_of(buses.begin(), buses.end(),
                                  [](const Bus& b) { return b.is_feeder_head; });
    if (!any_feeder)
        throw validation_error("no_feeder_head", "case has no feeder-head bus");

    // Connectivity of branches plus all switches closed.
    UnionFind uf(static_cast<int>(buses.size()));
    for (const Branch& br : branches)
        uf.unite(bus_idx.at(br.from_bus), bus_idx.at(br.to_bus));
    for (const Switch& sw : switches)
        uf.unite(bus_idx.at(sw.from_bus), bus_idx.at(sw.to_bus));
    int root = uf.find(0);
    for (int i = 1; i < static_cast<int>(buses.size()); ++i) {
        if (uf.find(i) != root)
            throw validation_error("disconnected_case",
                                   "bus '" + buses[i].id +
                                       "' is unreachable with all switches closed");
    }
}

int NetworkCase::find_bus(const std::string& id) const {
    for (int i = 0; i < static_cast<int>(buses.size()); ++i)
        if (buses[i].id == id) return i;
    return -1;
}

int NetworkCase::bus_index(const std::string& id) const {
    int i = find_bus(id);
    if (i < 0)
        throw validation_error("dangling_bus_ref", "unknown bus '" + id + "'");
    return i;
}

std::vector<std::string> NetworkCase::canonical_switch_order() const {
    std::vector<std::string> ids;
    ids.reserve(switches.size());
    for (const Switch& sw : switches) ids.push_back(sw.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<int> NetworkCase::canonical_switch_indices() const {
    std::vector<int> idx(switches.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return switches[a].id < switches[b].id;
    });
    return idx;
}

bool NetworkCase::operator==(const NetworkCase& other) const {
    auto bus_eq = [](const Bus& a, const Bus& b) {
        return a.id == b.id && a.vmin == b.vmin && a.vmax == b.vmax &&
               a.is_feeder_head == b.is_feeder_head;
    };
    auto branch_eq = [](const Branch& a, const Branch& b) {
        return a.id == b.id && a.from_bus == b.from_bus && a.to_bus == b.to_bus &&
               a.r == b.r && a.x == b.x && a.b == b.b;
    };
    auto switch_eq = [](const Switch& a, const Switch& b) {
        return a.id == b.id && a.from_bus == b.from_bus && a.to_bus == b.to_bus &&
               a.name == b.name;
    };
    auto load_eq = [](const Load& a, const Load& b) {
        return a.id == b.id && a.bus == b.bus && a.profile_key == b.profile_key &&
               a.power_factor == b.power_factor;
    };
    auto gen_eq = [](const Generator& a, const Generator& b) {
        return a.id == b.id && a.bus == b.bus && a.profile_key == b.profile_key &&
               a.power_factor == b.power_factor;
    };
    return base_mva == other.base_mva &&
           std::equal(buses.begin(), buses.end(), other.buses.begin(), other.buses.end(), bus_eq) &&
           std::equal(branches.begin(), branches.end(), other.branches.begin(),
                      other.branches.end(), branch_eq) &&
           std::equal(switches.begin(), switches.end(), other.switches.begin(),
                      other.switches.end(), switch_eq) &&
           std::equal(loads.begin(), loads.end(), other.loads.begin(), other.loads.end(), load_eq) &&
           std::equal(generators.begin(), generators.end(), other.generators.begin(),
                      other.generators.end(), gen_eq);
}

std::string Configuration::to_string() const {
    std::string s(static_cast<size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if (closed(i)) s[static_cast<size_t>(i)] = '1';
    return s;
}

Configuration Configuration::from_string(const std::string& bits) {
    if (bits.size() > 30)
        throw validation_error("too_many_switches", "configuration longer than 30 bits");
    Configuration cfg;
    cfg.n = static_cast<int>(bits.size());
    for (int i = 0; i < cfg.n; ++i) {
        char ch = bits[static_cast<size_t>(i)];
        if (ch == '1')
            cfg.mask |= (1u << i);
        else if (ch != '0')
            throw validation_error("bad_configuration", "configuration bits must be 0/1");
    }
    return cfg;
}

static OperationalNetwork apply_impl(const NetworkCase& c, const Configuration& cfg,
                                     const std::vector<int>& switch_indices) {
    if (cfg.n != static_cast<int>(switch_indices.size()))
        throw validation_error("length_mismatch",
                               "configuration has " + std::to_string(cfg.n) +
                                   " bits for " + std::to_string(switch_indices.size()) +
                                   " switches");

    OperationalNetwork net;
    net.network_case = &c;
    net.config = cfg;
    for (int i = 0; i < cfg.n; ++i)
        if (cfg.closed(i)) net.closed_switch_indices.push_back(switch_indices[static_cast<size_t>(i)]);

    UnionFind uf(static_cast<int>(c.buses.size()));
    for (const Branch& br : c.branches)
        uf.unite(c.bus_index(br.from_bus), c.bus_index(br.to_bus));
    for (int si : net.closed_switch_indices) {
        const Switch& sw = c.switches[static_cast<size_t>(si)];
        uf.unite(c.bus_index(sw.from_bus), c.bus_index(sw.to_bus));
    }

    std::unordered_map<int, int> root_to_island;
    for (int i = 0; i < static_cast<int>(c.buses.size()); ++i) {
        int root = uf.find(i);
        auto it = root_to_island.find(root);
        if (it == root_to_island.end()) {
            it = root_to_island.emplace(root, static_cast<int>(net.islands.size())).first;
            net.islands.emplace_back();
        }
        Island& island = net.islands[static_cast<size_t>(it->second)];
        island.bus_indices.push_back(i);
        if (c.buses[static_cast<size_t>(i)].is_feeder_head) {
            island.feeder_head_count++;
            if (island.feeder_head_bus < 0) island.feeder_head_bus = i;
        }
    }
    for (const Load& load : c.loads) {
        int bi = c.bus_index(load.bus);
        net.islands[static_cast<size_t>(root_to_island.at(uf.find(bi)))].has_load = true;
    }
    // Island order follows smallest contained bus index, which is the order
    // islands were first seen above.
    return net;
}

OperationalNetwork apply_configuration(const NetworkCase& c, const Configuration& cfg) {
    return apply_impl(c, cfg, c.canonical_switch_indices());
}

OperationalNetwork apply_configuration(const NetworkCase& c, const Configuration& cfg,
                                       const std::vector<int>& active_switch_indices) {
    return apply_impl(c, cfg, active_switch_indices);
}

} // namespace dnr
