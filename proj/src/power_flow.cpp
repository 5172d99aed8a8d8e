#include "dnr/power_flow.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "dnr/errors.hpp"

namespace dnr {

InjectionVector build_injections(const NetworkCase& c, const ProfileSet& profiles, int t) {
    InjectionVector inj;
    inj.s.assign(c.buses.size(), {0.0, 0.0});
    const double kw_to_pu = 1.0 / (1000.0 * c.base_mva);

    auto q_from_p = [](double p, double pf) {
        return p * std::tan(std::acos(pf));
    };
    for (const Load& load : c.loads) {
        double p = profiles.value_kw(load.profile_key, t) * kw_to_pu;
        inj.s[static_cast<size_t>(c.bus_index(load.bus))] -=
            std::complex<double>(p, q_from_p(p, load.power_factor));
    }
    for (const Generator& gen : c.generators) {
        double p = profiles.value_kw(gen.profile_key, t) * kw_to_pu;
        inj.s[static_cast<size_t>(c.bus_index(gen.bus))] +=
            std::complex<double>(p, q_from_p(p, gen.power_factor));
    }
    return inj;
}

namespace {

struct IslandProblem {
    std::vector<int> global_bus;          // local -> global
    int slack_local = -1;
    Eigen::MatrixXcd ybus;
    Eigen::VectorXcd s_spec;              // per local bus, slack entry unused
};

IslandProblem build_island(const OperationalNetwork& net, const Island& island,
                           const InjectionVector& inj) {
    const NetworkCase& c = *net.network_case;
    IslandProblem prob;
    prob.global_bus = island.bus_indices;
    int m = static_cast<int>(prob.global_bus.size());

    std::vector<int> local_of(c.buses.size(), -1);
    for (int l = 0; l < m; ++l)
        local_of[static_cast<size_t>(prob.global_bus[static_cast<size_t>(l)])] = l;
    prob.slack_local = local_of[static_cast<size_t>(island.feeder_head_bus)];

    prob.ybus = Eigen::MatrixXcd::Zero(m, m);
    auto stamp = [&](int gi, int gj, std::complex<double> y_series, double b_shunt) {
        int i = local_of[static_cast<size_t>(gi)];
        int j = local_of[static_cast<size_t>(gj)];
        if (i < 0 || j < 0) return; // endpoint outside this island
        prob.ybus(i, i) += y_series + std::complex<double>(0.0, b_shunt / 2.0);
        prob.ybus(j, j) += y_series + std::complex<double>(0.0, b_shunt / 2.0);
        prob.ybus(i, j) -= y_series;
        prob.ybus(j, i) -= y_series;
    };
    for (const Branch& br : c.branches)
        stamp(c.bus_index(br.from_bus), c.bus_index(br.to_bus),
              1.0 / std::complex<double>(br.r, br.x), br.b);
    for (int si : net.closed_switch_indices) {
        const Switch& sw = c.switches[static_cast<size_t>(si)];
        stamp(c.bus_index(sw.from_bus), c.bus_index(sw.to_bus),
              1.0 / std::complex<double>(0.0, kClosedSwitchReactance), 0.0);
    }

    prob.s_spec.resize(m);
    for (int l = 0; l < m; ++l)
        prob.s_spec(l) = inj.s[static_cast<size_t>(prob.global_bus[static_cast<size_t>(l)])];
    return prob;
}

struct IslandResult {
    Eigen::VectorXd v_mag;
    Eigen::VectorXd v_ang;
    Eigen::VectorXcd injection; // computed at the final iterate
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;
};

IslandResult solve_island(const IslandProblem& prob, const SolverOptions& opts) {
    int m = static_cast<int>(prob.global_bus.size());
    int s = prob.slack_local;

    IslandResult res;
    res.v_mag = Eigen::VectorXd::Ones(m);
    res.v_ang = Eigen::VectorXd::Zero(m);

    // PQ buses are all buses except the slack.
    std::vector<int> pq;
    pq.reserve(static_cast<size_t>(m - 1));
    for (int i = 0; i < m; ++i)
        if (i != s) pq.push_back(i);
    int k = static_cast<int>(pq.size());

    Eigen::MatrixXd g = prob.ybus.real();
    Eigen::MatrixXd b = prob.ybus.imag();

    Eigen::VectorXd p_calc(m), q_calc(m);
    auto evaluate = [&]() {
        for (int i = 0; i < m; ++i) {
            double pi = 0.0, qi = 0.0;
            for (int j = 0; j < m; ++j) {
                double th = res.v_ang(i) - res.v_ang(j);
                double c_ = std::cos(th), s_ = std::sin(th);
                pi += res.v_mag(j) * (g(i, j) * c_ + b(i, j) * s_);
                qi += res.v_mag(j) * (g(i, j) * s_ - b(i, j) * c_);
            }
            p_calc(i) = res.v_mag(i) * pi;
            q_calc(i) = res.v_mag(i) * qi;
        }
    };
    auto mismatch = [&](Eigen::VectorXd& dp, Eigen::VectorXd& dq) {
        double worst = 0.0;
        for (int a = 0; a < k; ++a) {
            int i = pq[static_cast<size_t>(a)];
            dp(a) = prob.s_spec(i).real() - p_calc(i);
            dq(a) = prob.s_spec(i).imag() - q_calc(i);
            worst = std::max(worst, std::hypot(dp(a), dq(a)));
        }
        return worst;
    };

    Eigen::VectorXd dp(k), dq(k);
    evaluate();
    res.max_mismatch = mismatch(dp, dq);
    res.converged = res.max_mismatch <= opts.tolerance;

    while (!res.converged && res.iterations < opts.max_iterations) {
        // Polar Jacobian over PQ unknowns [theta; vmag].
        Eigen::MatrixXd jac(2 * k, 2 * k);
        for (int a = 0; a < k; ++a) {
            int i = pq[static_cast<size_t>(a)];
            double vi = res.v_mag(i);
            for (int c_idx = 0; c_idx < k; ++c_idx) {
                int j = pq[static_cast<size_t>(c_idx)];
                if (i == j) {
                    jac(a, c_idx) = -q_calc(i) - b(i, i) * vi * vi;           // dP/dth
                    jac(a, k + c_idx) = p_calc(i) / vi + g(i, i) * vi;        // dP/dV
                    jac(k + a, c_idx) = p_calc(i) - g(i, i) * vi * vi;        // dQ/dth
                    jac(k + a, k + c_idx) = q_calc(i) / vi - b(i, i) * vi;    // dQ/dV
                } else {
                    double th = res.v_ang(i) - res.v_ang(j);
                    double c_ = std::cos(th), s_ = std::sin(th);
                    double vj = res.v_mag(j);
                    jac(a, c_idx) = vi * vj * (g(i, j) * s_ - b(i, j) * c_);
                    jac(a, k + c_idx) = vi * (g(i, j) * c_ + b(i, j) * s_);
                    jac(k + a, c_idx) = -vi * vj * (g(i, j) * c_ + b(i, j) * s_);
                    jac(k + a, k + c_idx) = vi * (g(i, j) * s_ - b(i, j) * c_);
                }
            }
        }

        Eigen::VectorXd rhs(2 * k);
        rhs.head(k) = dp;
        rhs.tail(k) = dq;
        Eigen::VectorXd dx = jac.partialPivLu().solve(rhs);
        if (!dx.allFinite()) break; // singular Jacobian, report non-convergence

        for (int a = 0; a < k; ++a) {
            int i = pq[static_cast<size_t>(a)];
            res.v_ang(i) += dx(a);
            res.v_mag(i) += dx(k + a);
        }
        res.iterations++;

        bool degenerate = false;
        for (int a = 0; a < k; ++a)
            if (res.v_mag(pq[static_cast<size_t>(a)]) < 1e-6) degenerate = true;
        if (degenerate) break; // collapsed voltage, hopeless iterate

        evaluate();
        res.max_mismatch = mismatch(dp, dq);
        if (std::isnan(res.max_mismatch)) break;
        res.converged = res.max_mismatch <= opts.tolerance;
    }

    res.injection.resize(m);
    for (int i = 0; i < m; ++i)
        res.injection(i) = std::complex<double>(p_calc(i), q_calc(i));
    return res;
}

} // namespace

PowerFlowSolution solve_ac(const OperationalNetwork& net, const InjectionVector& inj,
                           const SolverOptions& opts) {
    const NetworkCase& c = *net.network_case;
    if (inj.s.size() != c.buses.size())
        throw validation_error("length_mismatch", "injection vector does not match bus count");

    PowerFlowSolution sol;
    sol.v_mag.assign(c.buses.size(), 0.0);
    sol.v_ang.assign(c.buses.size(), 0.0);
    sol.injection.assign(c.buses.size(), {0.0, 0.0});
    sol.converged = true;

    for (const Island& island : net.islands) {
        if (island.feeder_head_count == 0)
            throw validation_error("no_slack_in_island",
                                   "island without a feeder-head bus cannot be solved");
        if (island.feeder_head_count > 1)
            throw validation_error("multiple_slack_in_island",
                                   "island with multiple feeder-head buses cannot be solved");

        IslandProblem prob = build_island(net, island, inj);
        IslandResult res = solve_island(prob, opts);

        for (int l = 0; l < static_cast<int>(prob.global_bus.size()); ++l) {
            int gb = prob.global_bus[static_cast<size_t>(l)];
            sol.v_mag[static_cast<size_t>(gb)] = res.v_mag(l);
            sol.v_ang[static_cast<size_t>(gb)] = res.v_ang(l);
            sol.injection[static_cast<size_t>(gb)] = res.injection(l);
        }
        sol.slack_injection.push_back(res.injection(prob.slack_local));
        sol.converged = sol.converged && res.converged;
        sol.iterations = std::max(sol.iterations, res.iterations);
        sol.max_mismatch = std::max(sol.max_mismatch, res.max_mismatch);
    }
    return sol;
}

} // namespace dnr
