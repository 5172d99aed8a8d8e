#include "dnr/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "dnr/errors.hpp"

namespace dnr {

const char* objective_name(Objective obj) {
    return obj == Objective::Losses ? "losses" : "violations";
}

std::vector<std::string> ReplacementCase::switch_ids(const std::vector<std::string>& order) const {
    std::vector<std::string> ids;
    for (int i = 0; i < static_cast<int>(order.size()); ++i)
        if (contains(i)) ids.push_back(order[i]);
    return ids;
}

std::vector<ReplacementCase> enumerate_cases(int n, int k_min) {
    if (n < 0 || n > 30) throw validation_error("too_many_switches", "case enumeration supports at most 30 switches");
    std::vector<ReplacementCase> cases;
    int id = 0;
    for (int k = k_min; k <= n; ++k) {
        // lexicographic combinations of bit indices 0..n-1
        std::vector<int> comb(k);
        std::iota(comb.begin(), comb.end(), 0);
        while (true) {
            uint32_t mask = 0;
            for (int bit : comb) mask |= 1u << bit;
            cases.push_back({mask, id++});
            int i = k - 1;
            while (i >= 0 && comb[i] == n - k + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    return cases;
}

int select_start_config(const ObjectiveGrid& grid) {
    int best = -1;
    double best_mean = std::numeric_limits<double>::infinity();
    for (int cfg = 0; cfg < grid.config_count(); ++cfg) {
        if (!grid.row_feasible(cfg)) continue;
        double sum = 0.0;
        for (int t = 0; t < grid.timesteps; ++t) sum += grid.losses_mw[grid.cell(cfg, t)];
        double mean = sum / grid.timesteps;
        if (mean < best_mean) {
            best_mean = mean;
            best = cfg;
        }
    }
    if (best < 0) throw numerical_error("no_fully_feasible_configuration",
                                        "every configuration has at least one infeasible timestep");
    return best;
}

std::vector<int> reachable_configs(const ReplacementCase& rcase, int start_config,
                                   const ObjectiveGrid& grid) {
    const uint32_t fixed = ~rcase.rs_mask;
    const uint32_t start_bits = grid.configs[start_config].mask & fixed;
    std::vector<int> out;
    for (int cfg = 0; cfg < grid.config_count(); ++cfg)
        if ((grid.configs[cfg].mask & fixed) == start_bits) out.push_back(cfg);
    return out;
}

namespace {

double cell_value(const ObjectiveGrid& grid, Objective obj, int cfg, int t) {
    size_t c = grid.cell(cfg, t);
    return obj == Objective::Losses ? grid.losses_mw[c] : static_cast<double>(grid.violations[c]);
}

} // namespace

CaseEvaluation optimize_path(const ObjectiveGrid& grid, Objective objective,
                             const ReplacementCase& rcase, const std::vector<int>& reachable,
                             double timestep_hours) {
    CaseEvaluation ev;
    ev.rcase = rcase;
    ev.objective = objective;
    ev.reachable_count = static_cast<int>(reachable.size());
    ev.path.resize(grid.timesteps, -1);

    double raw_total = 0.0;
    for (int t = 0; t < grid.timesteps; ++t) {
        int best = -1;
        double best_val = std::numeric_limits<double>::infinity();
        bool prev_is_best = false;
        for (int cfg : reachable) {
            if (grid.infeasible[grid.cell(cfg, t)]) continue;
            double v = cell_value(grid, objective, cfg, t);
            if (v < best_val) {
                best_val = v;
                best = cfg;
                prev_is_best = t > 0 && cfg == ev.path[t - 1];
            } else if (v == best_val && t > 0 && cfg == ev.path[t - 1]) {
                prev_is_best = true;
            }
        }
        if (best < 0) throw numerical_error("no_feasible_configuration",
                                            "timestep " + std::to_string(t) +
                                                " has no feasible reachable configuration");
        if (prev_is_best) best = ev.path[t - 1];
        ev.path[t] = best;
        raw_total += cell_value(grid, objective, best, t);
        if (t > 0 && ev.path[t] != ev.path[t - 1]) ++ev.flips;
    }
    ev.total = objective == Objective::Losses ? raw_total * timestep_hours : raw_total;
    return ev;
}

EscapeReport extreme_violation_escape(const ObjectiveGrid& grid, const std::vector<int>& reachable) {
    EscapeReport report;
    report.threshold = grid.extreme_dev;
    for (int t = 0; t < grid.timesteps; ++t) {
        bool escapable = false;
        for (int cfg : reachable) {
            size_t c = grid.cell(cfg, t);
            if (!grid.infeasible[c] && !grid.extreme[c]) {
                escapable = true;
                break;
            }
        }
        if (!escapable) report.failing_timesteps.push_back(t);
    }
    return report;
}

namespace {

double baseline_total_for(const ObjectiveGrid& grid, Objective obj, int start_config,
                          double timestep_hours) {
    double sum = 0.0;
    for (int t = 0; t < grid.timesteps; ++t) sum += cell_value(grid, obj, start_config, t);
    return obj == Objective::Losses ? sum * timestep_hours : sum;
}

// winner = smallest total; ties go to the smallest case id, which is the
// lexicographically smallest rs_set within a size class
bool beats(const CaseEvaluation& a, const CaseEvaluation& b) {
    if (a.total != b.total) return a.total < b.total;
    return a.rcase.id < b.rcase.id;
}

} // namespace

EvaluationReport build_merit_tables(const ObjectiveGrid& grid,
                                    const std::vector<ReplacementCase>& cases,
                                    const EvaluateOptions& opts) {
    if (grid.timesteps <= 0 || grid.config_count() == 0)
        throw validation_error("empty_grid", "objective grid has no cells");

    EvaluationReport report;
    report.start_config = select_start_config(grid);

    std::vector<Objective> objectives;
    if (opts.evaluate_losses) objectives.push_back(Objective::Losses);
    if (opts.evaluate_violations) objectives.push_back(Objective::Violations);
    if (objectives.empty()) throw validation_error("no_objective", "no objective selected");

    std::vector<int> all_configs(grid.config_count());
    std::iota(all_configs.begin(), all_configs.end(), 0);
    report.escape = extreme_violation_escape(grid, all_configs);

    // evaluations indexed by (objective, case id) so worker count and case
    // order cannot affect the result
    const size_t n_cases = cases.size();
    std::vector<std::vector<CaseEvaluation>> evals(objectives.size());
    for (auto& v : evals) v.resize(n_cases);

    int jobs = opts.jobs > 0 ? opts.jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, static_cast<int>(std::max<size_t>(n_cases, 1)));

    auto worker = [&](size_t begin, size_t end) {
        for (size_t ci = begin; ci < end; ++ci) {
            auto reachable = reachable_configs(cases[ci], report.start_config, grid);
            for (size_t oi = 0; oi < objectives.size(); ++oi)
                evals[oi][ci] = optimize_path(grid, objectives[oi], cases[ci], reachable,
                                              opts.timestep_hours);
        }
    };
    if (jobs == 1 || n_cases < 2) {
        worker(0, n_cases);
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (n_cases + jobs - 1) / jobs;
        for (int w = 0; w < jobs; ++w) {
            size_t begin = w * chunk;
            if (begin >= n_cases) break;
            pool.emplace_back(worker, begin, std::min(begin + chunk, n_cases));
        }
        for (auto& th : pool) th.join();
    }

    for (size_t oi = 0; oi < objectives.size(); ++oi) {
        MeritTable table;
        table.objective = objectives[oi];
        table.start_config = report.start_config;
        table.baseline_total = baseline_total_for(grid, objectives[oi], report.start_config,
                                                  opts.timestep_hours);

        std::vector<const CaseEvaluation*> winner_by_k;
        for (size_t ci = 0; ci < n_cases; ++ci) {
            const CaseEvaluation& ev = evals[oi][ci];
            int k = ev.rcase.size();
            if (static_cast<int>(winner_by_k.size()) < k + 1) winner_by_k.resize(k + 1, nullptr);
            if (!winner_by_k[k] || beats(ev, *winner_by_k[k])) winner_by_k[k] = &ev;
        }

        const MeritRow* prev = nullptr;
        for (size_t k = 0; k < winner_by_k.size(); ++k) {
            if (!winner_by_k[k]) continue;
            const CaseEvaluation& ev = *winner_by_k[k];
            MeritRow row;
            row.k = static_cast<int>(k);
            row.best = ev.rcase;
            row.rs_ids = ev.rcase.switch_ids(grid.switch_order);
            row.total = ev.total;
            row.flips = ev.flips;
            row.reachable_count = ev.reachable_count;
            if (table.baseline_total != 0.0)
                row.reduction_pct = reduction_pct(table.baseline_total, ev.total);
            if (prev) row.gain_vs_prev_k = prev->total - row.total;
            table.rows.push_back(row);
            prev = &table.rows.back();
        }
        report.tables.push_back(std::move(table));
    }

    if (opts.collect_full) {
        for (size_t oi = 0; oi < objectives.size(); ++oi)
            for (auto& ev : evals[oi]) report.full_evaluations.push_back(std::move(ev));
    }
    return report;
}

} // namespace dnr
