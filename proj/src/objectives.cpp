#include "dnr/objectives.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dnr/errors.hpp"

namespace dnr {

using json = nlohmann::ordered_json;

double compute_losses(const PowerFlowSolution& sol, const OperationalNetwork& net) {
    if (!sol.converged)
        throw numerical_error("not_converged", "losses requested for a non-converged solution");
    double total_pu = 0.0;
    for (const auto& s : sol.injection) total_pu += s.real();
    return total_pu * net.network_case->base_mva;
}

namespace {

double series_loss_pu(const PowerFlowSolution& sol, const NetworkCase& c,
                      const std::string& from, const std::string& to,
                      double r, double x) {
    int i = c.bus_index(from);
    int j = c.bus_index(to);
    std::complex<double> vi = std::polar(sol.v_mag[static_cast<size_t>(i)],
                                         sol.v_ang[static_cast<size_t>(i)]);
    std::complex<double> vj = std::polar(sol.v_mag[static_cast<size_t>(j)],
                                         sol.v_ang[static_cast<size_t>(j)]);
    std::complex<double> current = (vi - vj) / std::complex<double>(r, x);
    return std::norm(current) * r;
}

} // namespace

double ohmic_losses(const PowerFlowSolution& sol, const OperationalNetwork& net) {
    if (!sol.converged)
        throw numerical_error("not_converged", "losses requested for a non-converged solution");
    const NetworkCase& c = *net.network_case;
    double total_pu = 0.0;
    for (const Branch& br : c.branches)
        total_pu += series_loss_pu(sol, c, br.from_bus, br.to_bus, br.r, br.x);
    // Closed switches have r = 0 and contribute nothing; kept explicit so the
    // two loss routes stay in lockstep if the switch model ever changes.
    for (int si : net.closed_switch_indices) {
        const Switch& sw = c.switches[static_cast<size_t>(si)];
        total_pu += series_loss_pu(sol, c, sw.from_bus, sw.to_bus, 0.0, kClosedSwitchReactance);
    }
    return total_pu * c.base_mva;
}

int count_violations(const PowerFlowSolution& sol, const NetworkCase& c) {
    int count = 0;
    for (size_t i = 0; i < c.buses.size(); ++i) {
        double v = sol.v_mag[i];
        if (v < c.buses[i].vmin || v > c.buses[i].vmax) count++;
    }
    return count;
}

double reduction_pct(double static_total, double dynamic_total) {
    if (!(static_total > 0.0))
        throw validation_error("zero_static_baseline",
                               "reduction percentage undefined for a non-positive baseline");
    return 100.0 * (static_total - dynamic_total) / static_total;
}

bool ObjectiveGrid::row_feasible(int cfg) const {
    for (int t = 0; t < timesteps; ++t)
        if (infeasible[cell(cfg, t)]) return false;
    return true;
}

ObjectiveGrid run_grid(const NetworkCase& c, const RadialSet& radial,
                       const ProfileSet& profiles, const GridOptions& opts) {
    if (radial.configs.empty())
        throw validation_error("empty_radial_set", "grid run needs at least one configuration");
    for (const Load& load : c.loads)
        if (!profiles.has_key(load.profile_key))
            throw validation_error("missing_profile_key",
                                   "load '" + load.id + "' profile key '" + load.profile_key +
                                       "' not in profile set");
    for (const Generator& gen : c.generators)
        if (!profiles.has_key(gen.profile_key))
            throw validation_error("missing_profile_key",
                                   "generator '" + gen.id + "' profile key '" + gen.profile_key +
                                       "' not in profile set");

    // Map the radial set's switch order onto this case's switches.
    std::vector<int> active;
    active.reserve(radial.switch_order.size());
    for (const std::string& id : radial.switch_order) {
        int found = -1;
        for (int si = 0; si < static_cast<int>(c.switches.size()); ++si)
            if (c.switches[static_cast<size_t>(si)].id == id) { found = si; break; }
        if (found < 0)
            throw validation_error("unknown_switch",
                                   "switch '" + id + "' from the radial set is not in the case");
        active.push_back(found);
    }

    ObjectiveGrid grid;
    grid.switch_order = radial.switch_order;
    grid.configs = radial.configs;
    grid.timesteps = profiles.timesteps();
    grid.base_mva = c.base_mva;
    grid.tolerance = opts.solver.tolerance;
    grid.max_iterations = opts.solver.max_iterations;
    grid.extreme_dev = opts.extreme_dev;

    size_t cells = static_cast<size_t>(grid.config_count()) * static_cast<size_t>(grid.timesteps);
    grid.losses_mw.assign(cells, kInfeasibleObjective);
    grid.violations.assign(cells, 0);
    grid.infeasible.assign(cells, 1);
    grid.extreme.assign(cells, 0);
    grid.min_v.assign(cells, 0.0);
    grid.max_v.assign(cells, 0.0);

    // Injections are identical across configurations; build once per timestep.
    std::vector<InjectionVector> injections;
    injections.reserve(static_cast<size_t>(grid.timesteps));
    for (int t = 0; t < grid.timesteps; ++t)
        injections.push_back(build_injections(c, profiles, t));

    int jobs = opts.jobs > 0 ? opts.jobs
                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min<int>(jobs, grid.config_count());

    auto run_rows = [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            OperationalNetwork net = apply_configuration(c, grid.configs[static_cast<size_t>(row)], active);
            for (int t = 0; t < grid.timesteps; ++t) {
                PowerFlowSolution sol =
                    solve_ac(net, injections[static_cast<size_t>(t)], opts.solver);
                size_t idx = grid.cell(row, t);
                if (!sol.converged) continue; // leave the infeasible sentinel in place
                grid.infeasible[idx] = 0;
                grid.losses_mw[idx] = compute_losses(sol, net);
                grid.violations[idx] = count_violations(sol, c);
                double lo = sol.v_mag[0], hi = sol.v_mag[0];
                for (double v : sol.v_mag) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                grid.min_v[idx] = lo;
                grid.max_v[idx] = hi;
                grid.extreme[idx] =
                    (lo < 1.0 - grid.extreme_dev || hi > 1.0 + grid.extreme_dev) ? 1 : 0;
            }
        }
    };

    if (jobs <= 1) {
        run_rows(0, grid.config_count());
    } else {
        std::vector<std::thread> workers;
        int rows = grid.config_count();
        int chunk = (rows + jobs - 1) / jobs;
        for (int w = 0; w < jobs; ++w) {
            int begin = w * chunk;
            int end = std::min(rows, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(run_rows, begin, end);
        }
        for (auto& th : workers) th.join();
    }
    return grid;
}

std::string save_grid(const ObjectiveGrid& grid) {
    json doc;
    json meta;
    meta["switch_order"] = grid.switch_order;
    json cfgs = json::array();
    for (const Configuration& cfg : grid.configs) cfgs.push_back(cfg.to_string());
    meta["configs"] = std::move(cfgs);
    meta["timesteps"] = grid.timesteps;
    meta["base_mva"] = grid.base_mva;
    meta["tolerance"] = grid.tolerance;
    meta["max_iterations"] = grid.max_iterations;
    meta["extreme_dev"] = grid.extreme_dev;
    doc["meta"] = std::move(meta);

    json cells = json::array();
    for (int row = 0; row < grid.config_count(); ++row) {
        for (int t = 0; t < grid.timesteps; ++t) {
            size_t idx = grid.cell(row, t);
            json cell;
            cell["config_index"] = row;
            cell["timestep"] = t;
            if (grid.infeasible[idx]) {
                cell["losses_mw"] = nullptr;
                cell["violations"] = nullptr;
                cell["infeasible"] = true;
                cell["min_v"] = nullptr;
                cell["max_v"] = nullptr;
            } else {
                cell["losses_mw"] = grid.losses_mw[idx];
                cell["violations"] = grid.violations[idx];
                cell["infeasible"] = false;
                cell["min_v"] = grid.min_v[idx];
                cell["max_v"] = grid.max_v[idx];
            }
            cells.push_back(std::move(cell));
        }
    }
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

void save_grid_file(const ObjectiveGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("write_failed", "cannot write grid file '" + path + "'");
    out << save_grid(grid);
}

ObjectiveGrid load_grid_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error("parse_error", e.what());
    }
    ObjectiveGrid grid;
    const json& meta = doc.at("meta");
    grid.switch_order = meta.at("switch_order").get<std::vector<std::string>>();
    for (const auto& bits : meta.at("configs"))
        grid.configs.push_back(Configuration::from_string(bits.get<std::string>()));
    grid.timesteps = meta.at("timesteps").get<int>();
    grid.base_mva = meta.at("base_mva").get<double>();
    grid.tolerance = meta.at("tolerance").get<double>();
    grid.max_iterations = meta.at("max_iterations").get<int>();
    grid.extreme_dev = meta.at("extreme_dev").get<double>();

    size_t cells = static_cast<size_t>(grid.config_count()) * static_cast<size_t>(grid.timesteps);
    grid.losses_mw.assign(cells, kInfeasibleObjective);
    grid.violations.assign(cells, 0);
    grid.infeasible.assign(cells, 1);
    grid.extreme.assign(cells, 0);
    grid.min_v.assign(cells, 0.0);
    grid.max_v.assign(cells, 0.0);

    for (const json& cell : doc.at("cells")) {
        int row = cell.at("config_index").get<int>();
        int t = cell.at("timestep").get<int>();
        if (row < 0 || row >= grid.config_count() || t < 0 || t >= grid.timesteps)
            throw validation_error("bad_grid_cell", "cell index outside grid dimensions");
        size_t idx = grid.cell(row, t);
        if (cell.at("infeasible").get<bool>()) continue;
        grid.infeasible[idx] = 0;
        grid.losses_mw[idx] = cell.at("losses_mw").get<double>();
        grid.violations[idx] = cell.at("violations").get<int>();
        grid.min_v[idx] = cell.at("min_v").get<double>();
        grid.max_v[idx] = cell.at("max_v").get<double>();
        grid.extreme[idx] = (grid.min_v[idx] < 1.0 - grid.extreme_dev ||
                             grid.max_v[idx] > 1.0 + grid.extreme_dev)
                                ? 1
                                : 0;
    }
    return grid;
}

ObjectiveGrid load_grid_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("file_not_found", "cannot open grid file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_grid_string(text);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

void write_heatmaps(const ObjectiveGrid& grid, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(out_dir + "/" + name, std::ios::binary);
        if (!out)
            throw io_error("write_failed", "cannot write heatmap '" + out_dir + "/" + name + "'");
        return out;
    };

    std::ofstream losses = open("losses.csv");
    std::ofstream violations = open("violations.csv");
    for (int row = 0; row < grid.config_count(); ++row) {
        for (int t = 0; t < grid.timesteps; ++t) {
            size_t idx = grid.cell(row, t);
            if (t) {
                losses << ',';
                violations << ',';
            }
            if (grid.infeasible[idx]) {
                losses << "nan";
                violations << "nan";
            } else {
                losses << format_double(grid.losses_mw[idx]);
                violations << grid.violations[idx];
            }
        }
        losses << '\n';
        violations << '\n';
    }
}

} // namespace dnr
