#ifndef DNR_PIPELINE_HPP
#define DNR_PIPELINE_HPP

#include <string>
#include <vector>

#include "dnr/case_io.hpp"
#include "dnr/evaluate.hpp"
#include "dnr/graph_reduce.hpp"
#include "dnr/objectives.hpp"
#include "dnr/radial.hpp"

namespace dnr {

inline constexpr const char* kToolVersion = "1.0.0";

// configs.json: canonical switch order, admissible configurations as
// bitstrings, degenerate switches, enumeration statistics.
struct RadialArtifact {
    RadialSet set;
    std::vector<std::string> switch_names; // aligned with set.switch_order
    std::vector<std::string> fixed_open;   // switch ids forced open
};

std::string configs_to_json(const RadialArtifact& artifact);
void save_configs_file(const RadialArtifact& artifact, const std::string& path);
RadialArtifact load_configs_string(const std::string& text);
RadialArtifact load_configs_file(const std::string& path);

std::string merit_to_json(const EvaluationReport& report, const ObjectiveGrid& grid,
                          const std::vector<std::string>& switch_names, double timestep_hours);
void save_merit_file(const EvaluationReport& report, const ObjectiveGrid& grid,
                     const std::vector<std::string>& switch_names, double timestep_hours,
                     const std::string& path);

// hex SHA-256 of a file's bytes
std::string sha256_hex_file(const std::string& path);

struct StageTimings {
    double radial_s = 0.0;
    double power_flow_s = 0.0;
    double evaluation_s = 0.0;
    double report_s = 0.0;
};

struct PipelineOptions {
    std::string case_path;
    std::string profiles_path;
    std::string out_dir;
    EnumerateOptions radial;
    SolverOptions solver;
    double extreme_dev = 0.10;
    double timestep_hours = 0.25;
    int jobs = 0;
    bool full_listing = false;
    bool evaluate_losses = true;
    bool evaluate_violations = true;
};

struct PipelineResult {
    RadialArtifact radial;
    ObjectiveGrid grid;
    EvaluationReport report;
    StageTimings timings;
};

// Full chain: load case and profiles, enumerate radial configurations, sweep
// the objective grid, rank replacements, write configs.json, grid.json,
// merit.json, heatmap CSVs and manifest.json into out_dir. On failure the
// manifest still records the completed stages and the error.
PipelineResult run_pipeline(const PipelineOptions& opts);

struct BenchStat {
    double mean_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

struct BenchReport {
    int repetitions = 0;
    BenchStat radial;
    BenchStat power_flow;
    BenchStat evaluation;
    std::string dominant_stage;
    double dominant_share_pct = 0.0;
};

// In-memory repetitions of the three compute stages, no artifact writes.
BenchReport run_bench(const NetworkCase& c, const ProfileSet& profiles,
                      const PipelineOptions& opts, int repetitions);
std::string bench_to_json(const BenchReport& report);

} // namespace dnr

#endif
