#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "dnr/case_io.hpp"
#include "dnr/errors.hpp"
#include "dnr/evaluate.hpp"
#include "dnr/graph_reduce.hpp"
#include "dnr/objectives.hpp"
#include "dnr/pipeline.hpp"
#include "dnr/radial.hpp"

namespace {

void write_file_or_throw(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dnr::io_error("cannot_write", "cannot open '" + path + "' for writing");
    out << text;
}

dnr::RadialArtifact make_artifact(const dnr::NetworkCase& c, const dnr::ReducedGraph& g,
                                  dnr::RadialSet set) {
    dnr::RadialArtifact artifact;
    artifact.set = std::move(set);
    artifact.fixed_open = g.fixed_open;
    for (const auto& id : artifact.set.switch_order)
        for (const auto& sw : c.switches)
            if (sw.id == id) {
                artifact.switch_names.push_back(sw.name);
                break;
            }
    return artifact;
}

struct ObjectiveChoice {
    bool losses = true;
    bool violations = true;
};

ObjectiveChoice parse_objective(const std::string& name) {
    if (name == "losses") return {true, false};
    if (name == "violations") return {false, true};
    if (name == "both") return {true, true};
    throw dnr::validation_error("bad_objective", "objective must be losses, violations or both");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"switched distribution network reconfiguration toolkit"};
    app.require_subcommand(1);

    std::string case_path, profiles_path, configs_path, grid_path, out_path, out_dir;
    std::string dump_reduced_path, objective = "both";
    int jobs = 0;
    int max_iter = 30;
    int repetitions = 10;
    double tol = 1e-8, extreme_dev = 0.10, timestep_hours = 0.25;
    bool no_prune = false, full = false;

    auto add_jobs = [&](CLI::App* cmd) {
        cmd->add_option("--jobs", jobs, "worker threads, 0 = available parallelism")
            ->envname("DNR_JOBS");
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--tol", tol, "power-flow mismatch tolerance in p.u.");
        cmd->add_option("--max-iter", max_iter, "power-flow iteration cap");
        cmd->add_option("--extreme-dev", extreme_dev, "|V - 1| beyond this is extreme");
    };

    CLI::App* radial = app.add_subcommand("radial", "enumerate radial configurations");
    radial->add_option("--case", case_path, "network case JSON")->required();
    radial->add_option("--out", out_path, "output configs JSON")->required();
    radial->add_option("--dump-reduced", dump_reduced_path, "write the reduced graph as JSON");
    radial->add_flag("--no-prune", no_prune, "disable cycle-group pruning");

    CLI::App* flow = app.add_subcommand("flow", "sweep power flow over configurations and timesteps");
    flow->add_option("--case", case_path, "network case JSON")->required();
    flow->add_option("--configs", configs_path, "configs JSON from 'radial'")->required();
    flow->add_option("--profiles", profiles_path, "profile CSV in kW")->required();
    flow->add_option("--out", out_path, "output grid JSON")->required();
    add_jobs(flow);
    add_solver(flow);

    CLI::App* evaluate = app.add_subcommand("evaluate", "rank switch replacement sets");
    evaluate->add_option("--grid", grid_path, "grid JSON from 'flow'")->required();
    evaluate->add_option("--configs", configs_path, "configs JSON from 'radial'")->required();
    evaluate->add_option("--objective", objective, "losses, violations or both");
    evaluate->add_option("--timestep-hours", timestep_hours, "hours per timestep for MWh totals");
    evaluate->add_option("--out", out_path, "output merit JSON")->required();
    evaluate->add_flag("--full", full, "include every case evaluation in the output");
    add_jobs(evaluate);

    CLI::App* report = app.add_subcommand("report", "export plot-ready heatmap CSVs");
    report->add_option("--grid", grid_path, "grid JSON from 'flow'")->required();
    report->add_option("--heatmaps", out_dir, "output directory")->required();

    CLI::App* run = app.add_subcommand("run", "full pipeline: radial, flow, evaluate, report");
    run->add_option("--case", case_path, "network case JSON")->required();
    run->add_option("--profiles", profiles_path, "profile CSV in kW")->required();
    run->add_option("--out-dir", out_dir, "artifact directory")->required();
    run->add_option("--objective", objective, "losses, violations or both");
    run->add_option("--timestep-hours", timestep_hours, "hours per timestep for MWh totals");
    run->add_flag("--no-prune", no_prune, "disable cycle-group pruning");
    run->add_flag("--full", full, "include every case evaluation in merit.json");
    add_jobs(run);
    add_solver(run);

    CLI::App* bench = app.add_subcommand("bench", "time the compute stages in memory");
    bench->add_option("--case", case_path, "network case JSON")->required();
    bench->add_option("--profiles", profiles_path, "profile CSV in kW")->required();
    bench->add_option("--repetitions", repetitions, "number of repetitions");
    add_jobs(bench);
    add_solver(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (radial->parsed()) {
            dnr::NetworkCase c = dnr::load_case_file(case_path);
            dnr::ReducedGraph g = dnr::reduce(c);
            if (!dump_reduced_path.empty())
                write_file_or_throw(dump_reduced_path, dnr::dump_reduced(g, c));
            dnr::EnumerateOptions opts;
            opts.prune_cycle_groups = !no_prune;
            dnr::RadialArtifact artifact = make_artifact(c, g, dnr::enumerate_radial(g, opts));
            dnr::save_configs_file(artifact, out_path);
            std::printf("radial: %llu candidates, %d radial, %zu fixed open -> %s\n",
                        static_cast<unsigned long long>(artifact.set.stats.candidates_total),
                        artifact.set.size(), artifact.fixed_open.size(), out_path.c_str());
        } else if (flow->parsed()) {
            dnr::NetworkCase c = dnr::load_case_file(case_path);
            dnr::RadialArtifact artifact = dnr::load_configs_file(configs_path);
            dnr::ProfileSet profiles = dnr::ProfileSet::load_file(profiles_path);
            dnr::GridOptions opts;
            opts.solver.tolerance = tol;
            opts.solver.max_iterations = max_iter;
            opts.extreme_dev = extreme_dev;
            opts.jobs = jobs;
            dnr::ObjectiveGrid grid = dnr::run_grid(c, artifact.set, profiles, opts);
            dnr::save_grid_file(grid, out_path);
            int infeasible = 0;
            for (uint8_t f : grid.infeasible) infeasible += f;
            std::printf("flow: %d configs x %d timesteps, %d infeasible cells -> %s\n",
                        grid.config_count(), grid.timesteps, infeasible, out_path.c_str());
        } else if (evaluate->parsed()) {
            dnr::ObjectiveGrid grid = dnr::load_grid_file(grid_path);
            dnr::RadialArtifact artifact = dnr::load_configs_file(configs_path);
            if (artifact.set.switch_order != grid.switch_order)
                throw dnr::validation_error("switch_order_mismatch",
                                            "grid and configs artifacts disagree on switch order");
            ObjectiveChoice choice = parse_objective(objective);
            auto cases = dnr::enumerate_cases(static_cast<int>(grid.switch_order.size()));
            dnr::EvaluateOptions opts;
            opts.timestep_hours = timestep_hours;
            opts.evaluate_losses = choice.losses;
            opts.evaluate_violations = choice.violations;
            opts.collect_full = full;
            opts.jobs = jobs;
            dnr::EvaluationReport rep = dnr::build_merit_tables(grid, cases, opts);
            dnr::save_merit_file(rep, grid, artifact.switch_names, timestep_hours, out_path);
            std::printf("evaluate: start config %s, %zu cases -> %s\n",
                        grid.configs[rep.start_config].to_string().c_str(), cases.size(),
                        out_path.c_str());
        } else if (report->parsed()) {
            dnr::ObjectiveGrid grid = dnr::load_grid_file(grid_path);
            dnr::write_heatmaps(grid, out_dir);
            std::printf("report: losses.csv, violations.csv -> %s\n", out_dir.c_str());
        } else if (run->parsed()) {
            ObjectiveChoice choice = parse_objective(objective);
            dnr::PipelineOptions opts;
            opts.case_path = case_path;
            opts.profiles_path = profiles_path;
            opts.out_dir = out_dir;
            opts.radial.prune_cycle_groups = !no_prune;
            opts.solver.tolerance = tol;
            opts.solver.max_iterations = max_iter;
            opts.extreme_dev = extreme_dev;
            opts.timestep_hours = timestep_hours;
            opts.jobs = jobs;
            opts.full_listing = full;
            opts.evaluate_losses = choice.losses;
            opts.evaluate_violations = choice.violations;
            dnr::PipelineResult result = dnr::run_pipeline(opts);
            std::printf("run: %d radial, %d timesteps -> %s\n", result.radial.set.size(),
                        result.grid.timesteps, out_dir.c_str());
            std::printf("  radial %.3fs, power flow %.3fs, evaluation %.3fs, report %.3fs\n",
                        result.timings.radial_s, result.timings.power_flow_s,
                        result.timings.evaluation_s, result.timings.report_s);
        } else if (bench->parsed()) {
            dnr::NetworkCase c = dnr::load_case_file(case_path);
            dnr::ProfileSet profiles = dnr::ProfileSet::load_file(profiles_path);
            dnr::PipelineOptions opts;
            opts.solver.tolerance = tol;
            opts.solver.max_iterations = max_iter;
            opts.extreme_dev = extreme_dev;
            opts.jobs = jobs;
            dnr::BenchReport rep = dnr::run_bench(c, profiles, opts, repetitions);
            std::fputs(dnr::bench_to_json(rep).c_str(), stdout);
        }
    } catch (const dnr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
