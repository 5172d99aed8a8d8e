#ifndef DNR_EVALUATE_HPP
#define DNR_EVALUATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "dnr/objectives.hpp"

namespace dnr {

enum class Objective { Losses, Violations };
const char* objective_name(Objective obj);

// A set of switches upgraded from manual to reconfigurable, as a bit mask
// over the grid's canonical switch order. Always at least two switches: a
// single reconfigurable switch cannot change a radial topology into another.
struct ReplacementCase {
    uint32_t rs_mask = 0;
    int id = -1; // position in canonical enumeration order (size, then lexicographic)

    int size() const { return __builtin_popcount(rs_mask); }
    bool contains(int bit) const { return (rs_mask >> bit) & 1u; }
    std::vector<std::string> switch_ids(const std::vector<std::string>& order) const;
};

// All subsets of the n canonical switches with size in [k_min, n], canonical
// order. Count is 2^n - n - 1 for k_min = 2.
std::vector<ReplacementCase> enumerate_cases(int n, int k_min = 2);

// The configuration with the lowest mean losses across the horizon among
// rows with no infeasible cell; ties go to the lowest index.
int select_start_config(const ObjectiveGrid& grid);

// Indices of radial configurations whose states match the start configuration
// on every switch outside rs_mask. Contains the start itself; ascending.
std::vector<int> reachable_configs(const ReplacementCase& rcase, int start_config,
                                   const ObjectiveGrid& grid);

struct CaseEvaluation {
    ReplacementCase rcase;
    Objective objective = Objective::Losses;
    std::vector<int> path; // config index per timestep
    double total = 0.0;    // MWh for losses, count for violations
    int flips = 0;
    int reachable_count = 0;
};

// Independently optimizes every timestep over the reachable set, skipping
// infeasible cells. Ties keep the previous timestep's configuration when
// possible, otherwise the lowest config index. Losses totals are converted
// to MWh with timestep_hours.
CaseEvaluation optimize_path(const ObjectiveGrid& grid, Objective objective,
                             const ReplacementCase& rcase, const std::vector<int>& reachable,
                             double timestep_hours);

struct MeritRow {
    int k = 0;
    ReplacementCase best;
    std::vector<std::string> rs_ids;
    double total = 0.0;
    std::optional<double> reduction_pct; // absent when the static baseline is zero
    std::optional<double> gain_vs_prev_k;
    int flips = 0;
    int reachable_count = 0;
};

struct MeritTable {
    Objective objective = Objective::Losses;
    int start_config = -1;
    double baseline_total = 0.0; // start configuration held for the whole horizon
    std::vector<MeritRow> rows;  // k = k_min .. n; the last row is the
                                 // all-reconfigurable bound
};

struct EscapeReport {
    double threshold = 0.10;
    std::vector<int> failing_timesteps; // every reachable configuration extreme
};

// For each timestep: can the reachable set put every bus within the extreme
// deviation band? Infeasible cells cannot provide escape.
EscapeReport extreme_violation_escape(const ObjectiveGrid& grid,
                                      const std::vector<int>& reachable);

struct EvaluateOptions {
    double timestep_hours = 0.25;
    bool evaluate_losses = true;
    bool evaluate_violations = true;
    bool collect_full = false; // keep every CaseEvaluation, not just winners
    int jobs = 0;
};

struct EvaluationReport {
    int start_config = -1;
    std::vector<MeritTable> tables; // one per requested objective
    EscapeReport escape;            // over the full radial set
    std::vector<CaseEvaluation> full_evaluations; // when collect_full
};

// Exhaustive ranking: evaluates every replacement case against the grid and
// assembles one merit table per objective. Winner per k is the minimum total,
// ties to the lexicographically smallest rs_set. Deterministic for any case
// iteration order and worker count.
EvaluationReport build_merit_tables(const ObjectiveGrid& grid,
                                    const std::vector<ReplacementCase>& cases,
                                    const EvaluateOptions& opts = {});

} // namespace dnr

#endif
