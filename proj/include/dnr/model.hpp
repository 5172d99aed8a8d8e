#ifndef DNR_MODEL_HPP
#define DNR_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dnr {

// All electrical quantities are per-unit on the case's base_mva.
// Profile values arrive in kW and are converted at injection time.

struct Bus {
    std::string id;
    double vmin = 0.95;
    double vmax = 1.05;
    bool is_feeder_head = false;
};

struct Branch {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double r = 0.0; // series resistance, p.u.
    double x = 0.0; // series reactance, p.u.
    double b = 0.0; // total shunt susceptance, p.u. (pi model, split half per end)
};

// Ideal switch: carries no impedance of its own. A closed switch is realized
// as a tie branch with r = 0, x = kClosedSwitchReactance.
struct Switch {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    std::string name; // display label, defaults to id
};

struct Load {
    std::string id;
    std::string bus;
    std::string profile_key;
    double power_factor = 0.95; // derives Q = P * tan(acos(pf)) when only P given
};

struct Generator {
    std::string id;
    std::string bus;
    std::string profile_key;
    double power_factor = 1.0;
};

// Reactance used to realize a closed switch as a near-zero-impedance branch.
// Far below line impedances, so added losses are negligible, and bus indexing
// stays stable across configurations (no bus merging).
inline constexpr double kClosedSwitchReactance = 1e-5;

class NetworkCase {
public:
    double base_mva = 1.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Switch> switches;
    std::vector<Load> loads;
    std::vector<Generator> generators;

    // Checks every structural invariant; throws Error(Validation) with a
    // machine-readable code on the first violation found.
    void validate() const;

    // Index lookups. bus_index throws on unknown id.
    int bus_index(const std::string& id) const;
    int find_bus(const std::string& id) const; // -1 when absent

    // Switch ids in canonical (sorted-id) order; Configuration bit i refers
    // to canonical_switch_order()[i] unless a reduced order is supplied.
    std::vector<std::string> canonical_switch_order() const;
    // Indices into switches[] matching canonical_switch_order().
    std::vector<int> canonical_switch_indices() const;

    bool operator==(const NetworkCase& other) const;
};

// One open/closed state per switch, bit i = i-th switch of the canonical
// order in effect (1 = closed). Packed into a mask; enumeration is guarded
// to n <= 30 upstream.
struct Configuration {
    uint32_t mask = 0;
    int n = 0;

    bool closed(int i) const { return (mask >> i) & 1u; }
    int closed_count() const { return __builtin_popcount(mask); }

    std::string to_string() const; // char j = state of switch j, left to right
    static Configuration from_string(const std::string& bits);

    bool operator==(const Configuration& other) const {
        return mask == other.mask && n == other.n;
    }
    bool operator<(const Configuration& other) const { return mask < other.mask; }
};

struct Island {
    std::vector<int> bus_indices;   // ascending
    int feeder_head_count = 0;
    int feeder_head_bus = -1;       // first feeder head in the island, -1 if none
    bool has_load = false;
};

// A NetworkCase with a Configuration applied. Non-owning view of the case;
// the case must outlive it.
struct OperationalNetwork {
    const NetworkCase* network_case = nullptr;
    Configuration config;
    std::vector<int> closed_switch_indices; // into network_case->switches
    std::vector<Island> islands;            // partition of all buses
};

// cfg is interpreted against the case's full canonical switch order.
OperationalNetwork apply_configuration(const NetworkCase& c, const Configuration& cfg);

// cfg is interpreted against active_switch_indices (indices into c.switches,
// typically the non-degenerate switches from graph reduction); switches not
// listed stay open.
OperationalNetwork apply_configuration(const NetworkCase& c, const Configuration& cfg,
                                       const std::vector<int>& active_switch_indices);

} // namespace dnr

#endif
