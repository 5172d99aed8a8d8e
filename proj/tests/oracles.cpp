#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oracles {

namespace {

// plain union-find, recursive find, no rank tricks
int find_root(std::vector<int>& parent, int a) {
    if (parent[a] == a) return a;
    return parent[a] = find_root(parent, parent[a]);
}

std::vector<std::complex<double>> solution_voltages(const dnr::PowerFlowSolution& sol) {
    std::vector<std::complex<double>> v(sol.v_mag.size());
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = std::polar(sol.v_mag[i], sol.v_ang[i]);
    return v;
}

std::vector<bool> slack_flags(const dnr::OperationalNetwork& net) {
    std::vector<bool> slack(net.network_case->buses.size(), false);
    for (const auto& island : net.islands)
        if (island.feeder_head_bus >= 0) slack[island.feeder_head_bus] = true;
    return slack;
}

} // namespace

std::vector<uint32_t> radial_masks(const dnr::NetworkCase& c) {
    const int nb = static_cast<int>(c.buses.size());
    std::vector<int> base(nb);
    for (int i = 0; i < nb; ++i) base[i] = i;

    auto unite = [](std::vector<int>& parent, int a, int b) {
        parent[find_root(parent, a)] = find_root(parent, b);
    };

    for (const auto& br : c.branches)
        unite(base, c.bus_index(br.from_bus), c.bus_index(br.to_bus));
    int first_head = -1;
    for (int i = 0; i < nb; ++i) {
        if (!c.buses[i].is_feeder_head) continue;
        if (first_head < 0)
            first_head = i;
        else
            unite(base, first_head, i);
    }

    int components = 0;
    for (int i = 0; i < nb; ++i)
        if (find_root(base, i) == i) ++components;

    auto order = c.canonical_switch_indices();
    const int n = static_cast<int>(order.size());
    std::vector<std::pair<int, int>> ends(n);
    for (int i = 0; i < n; ++i)
        ends[i] = {c.bus_index(c.switches[order[i]].from_bus),
                   c.bus_index(c.switches[order[i]].to_bus)};

    std::vector<uint32_t> result;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != components - 1) continue;
        std::vector<int> parent = base;
        bool acyclic = true;
        for (int i = 0; i < n && acyclic; ++i) {
            if (!((mask >> i) & 1u)) continue;
            int ra = find_root(parent, ends[i].first);
            int rb = find_root(parent, ends[i].second);
            if (ra == rb)
                acyclic = false;
            else
                parent[ra] = rb;
        }
        if (!acyclic) continue;
        int root0 = find_root(parent, 0);
        bool connected = true;
        for (int i = 1; i < nb && connected; ++i)
            connected = find_root(parent, i) == root0;
        if (connected) result.push_back(mask);
    }
    return result;
}

std::vector<std::vector<std::complex<double>>> ybus(const dnr::OperationalNetwork& net) {
    const dnr::NetworkCase& c = *net.network_case;
    const size_t nb = c.buses.size();
    std::vector<std::vector<std::complex<double>>> y(nb, std::vector<std::complex<double>>(nb));

    auto stamp = [&](int i, int j, std::complex<double> series, double shunt_b) {
        y[i][i] += series + std::complex<double>(0.0, shunt_b / 2.0);
        y[j][j] += series + std::complex<double>(0.0, shunt_b / 2.0);
        y[i][j] -= series;
        y[j][i] -= series;
    };

    for (const auto& br : c.branches)
        stamp(c.bus_index(br.from_bus), c.bus_index(br.to_bus),
              1.0 / std::complex<double>(br.r, br.x), br.b);
    for (int si : net.closed_switch_indices)
        stamp(c.bus_index(c.switches[si].from_bus), c.bus_index(c.switches[si].to_bus),
              1.0 / std::complex<double>(0.0, dnr::kClosedSwitchReactance), 0.0);
    return y;
}

double max_mismatch(const dnr::OperationalNetwork& net, const dnr::InjectionVector& inj,
                    const dnr::PowerFlowSolution& sol) {
    auto y = ybus(net);
    auto v = solution_voltages(sol);
    auto slack = slack_flags(net);
    double worst = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        if (slack[i]) continue;
        std::complex<double> sum;
        for (size_t j = 0; j < v.size(); ++j) sum += y[i][j] * v[j];
        std::complex<double> s_calc = v[i] * std::conj(sum);
        worst = std::max(worst, std::abs(inj.s[i] - s_calc));
    }
    return worst;
}

double slack_balance_residual(const dnr::OperationalNetwork& net, const dnr::InjectionVector& inj,
                              const dnr::PowerFlowSolution& sol) {
    auto y = ybus(net);
    auto v = solution_voltages(sol);
    auto slack = slack_flags(net);
    double p_slack = 0.0, p_spec = 0.0, losses = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        std::complex<double> sum;
        for (size_t j = 0; j < v.size(); ++j) sum += y[i][j] * v[j];
        double p_calc = (v[i] * std::conj(sum)).real();
        losses += p_calc;
        if (slack[i])
            p_slack += p_calc;
        else
            p_spec += inj.s[i].real();
    }
    // p_slack == net load drawn plus losses
    return p_slack - (losses - p_spec);
}

GaussSeidelResult gauss_seidel(const dnr::OperationalNetwork& net, const dnr::InjectionVector& inj,
                               double tolerance, int max_iterations) {
    auto y = ybus(net);
    auto slack = slack_flags(net);
    const size_t nb = y.size();

    GaussSeidelResult res;
    res.v.assign(nb, {1.0, 0.0});
    for (int it = 0; it < max_iterations; ++it) {
        double delta = 0.0;
        for (size_t i = 0; i < nb; ++i) {
            if (slack[i]) continue;
            std::complex<double> sum;
            for (size_t j = 0; j < nb; ++j)
                if (j != i) sum += y[i][j] * res.v[j];
            std::complex<double> next = (std::conj(inj.s[i] / res.v[i]) - sum) / y[i][i];
            delta = std::max(delta, std::abs(next - res.v[i]));
            res.v[i] = next;
        }
        res.iterations = it + 1;
        if (delta < tolerance) {
            res.converged = true;
            break;
        }
    }
    return res;
}

int64_t spanning_tree_count(const dnr::ReducedGraph& g) {
    const int n = g.node_count();
    if (n <= 1) return 1;
    std::vector<std::vector<int64_t>> lap(n, std::vector<int64_t>(n, 0));
    for (const auto& e : g.edges) {
        if (e.node_a == e.node_b) continue;
        lap[e.node_a][e.node_a] += 1;
        lap[e.node_b][e.node_b] += 1;
        lap[e.node_a][e.node_b] -= 1;
        lap[e.node_b][e.node_a] -= 1;
    }

    // minor without row/col 0, fraction-free Bareiss elimination
    const int m = n - 1;
    std::vector<std::vector<int64_t>> a(m, std::vector<int64_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[i][j] = lap[i + 1][j + 1];

    int64_t prev = 1;
    int sign = 1;
    for (int k = 0; k < m - 1; ++k) {
        if (a[k][k] == 0) {
            int pivot = -1;
            for (int r = k + 1; r < m; ++r)
                if (a[r][k] != 0) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) return 0;
            std::swap(a[k], a[pivot]);
            sign = -sign;
        }
        for (int i = k + 1; i < m; ++i)
            for (int j = k + 1; j < m; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[m - 1][m - 1];
}

} // namespace oracles
