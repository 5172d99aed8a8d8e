#ifndef DNR_POWER_FLOW_HPP
#define DNR_POWER_FLOW_HPP

#include <complex>
#include <vector>

#include "dnr/case_io.hpp"
#include "dnr/model.hpp"

namespace dnr {

// Net complex power injection per bus for one timestep, p.u. on base_mva.
// Loads enter negative, generation positive.
struct InjectionVector {
    std::vector<std::complex<double>> s;
};

// Injections for timestep t. Profile values are kW; Q is derived from P via
// the unit's power factor (Q = P tan(acos(pf))), sign following P.
InjectionVector build_injections(const NetworkCase& c, const ProfileSet& profiles, int t);

struct SolverOptions {
    double tolerance = 1e-8; // max complex power mismatch |dS| in p.u.
    int max_iterations = 30;
};

struct PowerFlowSolution {
    std::vector<double> v_mag;  // p.u., slack exactly 1.0
    std::vector<double> v_ang;  // rad, slack exactly 0.0
    std::vector<std::complex<double>> injection; // computed net injection per bus, p.u.
    std::vector<std::complex<double>> slack_injection; // one per island
    bool converged = false;
    int iterations = 0;     // worst island
    double max_mismatch = 0.0;
};

// Full Newton-Raphson in polar form, flat start, one slack (the island's
// feeder head) per island, every other bus PQ. Islands are solved
// independently and concatenated. Non-convergence is reported through the
// returned record (converged, iterations, max_mismatch); the caller decides
// policy.
PowerFlowSolution solve_ac(const OperationalNetwork& net, const InjectionVector& inj,
                           const SolverOptions& opts = {});

} // namespace dnr

#endif
