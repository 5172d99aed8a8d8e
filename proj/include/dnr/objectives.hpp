#ifndef DNR_OBJECTIVES_HPP
#define DNR_OBJECTIVES_HPP

#include <limits>
#include <string>
#include <vector>

#include "dnr/power_flow.hpp"
#include "dnr/radial.hpp"

namespace dnr {

// Objective sentinel for infeasible (non-converged) cells.
inline constexpr double kInfeasibleObjective = std::numeric_limits<double>::infinity();

// Total network losses per Eq-style generation-minus-load accounting: the sum
// of net active injections over all buses, slack injections included, in MW.
// Throws on a non-converged solution.
double compute_losses(const PowerFlowSolution& sol, const OperationalNetwork& net);

// Independent loss route: per-branch series |I|^2 R summed over branches and
// closed switches, in MW. Must agree with compute_losses within 1e-6 p.u.
double ohmic_losses(const PowerFlowSolution& sol, const OperationalNetwork& net);

// Buses whose voltage magnitude lies strictly outside [vmin, vmax]; exact
// boundary values are compliant. At most one count per bus.
int count_violations(const PowerFlowSolution& sol, const NetworkCase& c);

// 100 * (static - dynamic) / static. Throws zero_static_baseline.
double reduction_pct(double static_total, double dynamic_total);

// Full (radial configuration x timestep) objective matrices, row-major by
// configuration. Infeasible cells carry the +inf sentinel.
struct ObjectiveGrid {
    std::vector<std::string> switch_order;
    std::vector<Configuration> configs; // row order
    int timesteps = 0;
    double base_mva = 0.0;
    double tolerance = 0.0;
    int max_iterations = 0;
    double extreme_dev = 0.10; // |V - 1| beyond this is an extreme violation

    std::vector<double> losses_mw;  // config * timesteps
    std::vector<int> violations;
    std::vector<uint8_t> infeasible;
    std::vector<uint8_t> extreme;
    std::vector<double> min_v;
    std::vector<double> max_v;

    int config_count() const { return static_cast<int>(configs.size()); }
    size_t cell(int cfg, int t) const {
        return static_cast<size_t>(cfg) * static_cast<size_t>(timesteps) + static_cast<size_t>(t);
    }
    bool feasible(int cfg, int t) const { return !infeasible[cell(cfg, t)]; }
    // True when the whole configuration row solved at every timestep.
    bool row_feasible(int cfg) const;
};

struct GridOptions {
    SolverOptions solver;
    double extreme_dev = 0.10;
    int jobs = 0; // 0 = hardware concurrency
};

// Runs one power flow per (configuration, timestep) cell and fills the grid.
// Cells are independent; work is partitioned across jobs threads and written
// by index, so the result is identical for any worker count.
ObjectiveGrid run_grid(const NetworkCase& c, const RadialSet& radial,
                       const ProfileSet& profiles, const GridOptions& opts = {});

std::string save_grid(const ObjectiveGrid& grid);
void save_grid_file(const ObjectiveGrid& grid, const std::string& path);
ObjectiveGrid load_grid_string(const std::string& text);
ObjectiveGrid load_grid_file(const std::string& path);

// Plot-ready heatmap matrices (configuration rows x timestep columns),
// headerless CSV, one file per objective.
void write_heatmaps(const ObjectiveGrid& grid, const std::string& out_dir);

} // namespace dnr

#endif
