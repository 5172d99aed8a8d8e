#include "doctest.h"

#include <algorithm>
#include <limits>
#include <random>

#include "dnr/errors.hpp"
#include "dnr/evaluate.hpp"
#include "helpers.hpp"

using namespace dnr;

namespace {

// hand-built grid: 3 switches, 4 radial configs, 3 timesteps
ObjectiveGrid toy_grid() {
    ObjectiveGrid g;
    g.switch_order = {"s1", "s2", "s3"};
    for (const char* bits : {"110", "101", "011", "111"})
        g.configs.push_back(Configuration::from_string(bits));
    g.timesteps = 3;
    g.base_mva = 1.0;
    g.tolerance = 1e-8;
    g.max_iterations = 30;
    g.extreme_dev = 0.10;
    size_t cells = g.configs.size() * static_cast<size_t>(g.timesteps);
    g.losses_mw.assign(cells, 0.0);
    g.violations.assign(cells, 0);
    g.infeasible.assign(cells, 0);
    g.extreme.assign(cells, 0);
    g.min_v.assign(cells, 1.0);
    g.max_v.assign(cells, 1.0);
    return g;
}

void set_cell(ObjectiveGrid& g, int cfg, int t, double loss, int viol) {
    g.losses_mw[g.cell(cfg, t)] = loss;
    g.violations[g.cell(cfg, t)] = viol;
}

ObjectiveGrid spanish_grid() {
    NetworkCase c = helpers::spanish_case();
    ProfileSet profiles = helpers::spanish_profiles();
    RadialSet radial = enumerate_radial(reduce(c));
    GridOptions opts;
    opts.jobs = 1;
    return run_grid(c, radial, profiles, opts);
}

} // namespace

TEST_CASE("replacement cases enumerate by size then lexicographic order") {
    auto cases = enumerate_cases(4);
    REQUIRE(cases.size() == 11); // 2^4 - 4 - 1

    auto bits_of = [](const ReplacementCase& rc) {
        std::vector<int> bits;
        for (int i = 0; i < 4; ++i)
            if (rc.contains(i)) bits.push_back(i);
        return bits;
    };
    CHECK(bits_of(cases[0]) == std::vector<int>{0, 1});
    CHECK(bits_of(cases[1]) == std::vector<int>{0, 2});
    CHECK(bits_of(cases[2]) == std::vector<int>{0, 3});
    CHECK(bits_of(cases[3]) == std::vector<int>{1, 2});
    CHECK(bits_of(cases[4]) == std::vector<int>{1, 3});
    CHECK(bits_of(cases[5]) == std::vector<int>{2, 3});
    CHECK(bits_of(cases[6]) == std::vector<int>{0, 1, 2});
    CHECK(bits_of(cases[10]) == std::vector<int>{0, 1, 2, 3});
    for (size_t i = 0; i < cases.size(); ++i) CHECK(cases[i].id == static_cast<int>(i));

    CHECK(enumerate_cases(7).size() == 120); // 2^7 - 7 - 1
    CHECK(cases[0].switch_ids({"a", "b", "c", "d"}) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("start configuration has the lowest mean losses among fully feasible rows") {
    ObjectiveGrid g = toy_grid();
    set_cell(g, 0, 0, 5.0, 0);
    set_cell(g, 0, 1, 5.0, 0);
    set_cell(g, 0, 2, 5.0, 0);
    set_cell(g, 1, 0, 1.0, 0); // cheapest, but one infeasible cell
    set_cell(g, 1, 1, 1.0, 0);
    g.infeasible[g.cell(1, 2)] = 1;
    set_cell(g, 2, 0, 2.0, 0);
    set_cell(g, 2, 1, 2.0, 0);
    set_cell(g, 2, 2, 2.0, 0);
    set_cell(g, 3, 0, 2.0, 0); // ties with config 2, higher index loses
    set_cell(g, 3, 1, 2.0, 0);
    set_cell(g, 3, 2, 2.0, 0);

    CHECK(select_start_config(g) == 2);

    for (int t = 0; t < 3; ++t) g.infeasible[g.cell(2, t)] = 1;
    g.infeasible[g.cell(3, 0)] = 1;
    g.infeasible[g.cell(0, 1)] = 1;
    g.infeasible[g.cell(1, 2)] = 1;
    try {
        select_start_config(g);
        FAIL("expected no_fully_feasible_configuration");
    } catch (const Error& e) {
        CHECK(e.code() == "no_fully_feasible_configuration");
        CHECK(e.exit_code() == 3);
    }
}

TEST_CASE("reachable set fixes every switch outside the replacement set") {
    ObjectiveGrid g = toy_grid();
    // start 110; rs {s2,s3} (bits 1,2) allows 1xx radial variants
    ReplacementCase rc{0b110, 0};
    auto reach = reachable_configs(rc, 0, g);
    CHECK(reach == std::vector<int>{0, 1, 3}); // 110, 101, 111 share bit 0 set

    // rs {s1,s2} pins s3 open like the start, leaving no other radial config
    ReplacementCase pair01{0b011, 1};
    CHECK(reachable_configs(pair01, 0, g) == std::vector<int>{0});

    ReplacementCase all{0b111, 2};
    CHECK(reachable_configs(all, 0, g) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("path optimization picks the column minimum and sticks on ties") {
    ObjectiveGrid g = toy_grid();
    //          t0   t1   t2
    // cfg0:    3.0  2.0  2.0
    // cfg1:    2.0  2.0  9.0   (infeasible at t2)
    // cfg3:    9.0  2.0  1.0
    set_cell(g, 0, 0, 3.0, 1);
    set_cell(g, 0, 1, 2.0, 0);
    set_cell(g, 0, 2, 2.0, 2);
    set_cell(g, 1, 0, 2.0, 0);
    set_cell(g, 1, 1, 2.0, 1);
    set_cell(g, 1, 2, 9.0, 0);
    g.infeasible[g.cell(1, 2)] = 1;
    set_cell(g, 3, 0, 9.0, 3);
    set_cell(g, 3, 1, 2.0, 1);
    set_cell(g, 3, 2, 1.0, 1);

    ReplacementCase rc{0b110, 0};
    auto reach = std::vector<int>{0, 1, 3};

    CaseEvaluation losses = optimize_path(g, Objective::Losses, rc, reach, 0.25);
    // t0: min is cfg1; t1: tie 2.0 everywhere, stays on cfg1; t2: cfg1
    // infeasible, min feasible is cfg3
    CHECK(losses.path == std::vector<int>{1, 1, 3});
    CHECK(losses.total == doctest::Approx((2.0 + 2.0 + 1.0) * 0.25).epsilon(1e-12));
    CHECK(losses.flips == 1);
    CHECK(losses.reachable_count == 3);

    CaseEvaluation viols = optimize_path(g, Objective::Violations, rc, reach, 0.25);
    // violations stay raw counts, no timestep scaling
    CHECK(viols.path == std::vector<int>{1, 0, 3});
    CHECK(viols.total == 1.0);
    CHECK(viols.flips == 2);
}

TEST_CASE("path optimization fails loudly when a timestep is dead") {
    ObjectiveGrid g = toy_grid();
    for (int cfg : {0, 1, 3}) g.infeasible[g.cell(cfg, 1)] = 1;
    ReplacementCase rc{0b110, 0};
    try {
        optimize_path(g, Objective::Losses, rc, {0, 1, 3}, 0.25);
        FAIL("expected no_feasible_configuration");
    } catch (const Error& e) {
        CHECK(e.code() == "no_feasible_configuration");
        CHECK(std::string(e.what()).find("timestep 1") != std::string::npos);
    }
}

TEST_CASE("merit tables are monotone and winner ties break lexicographically") {
    ObjectiveGrid grid = spanish_grid();
    auto cases = enumerate_cases(static_cast<int>(grid.switch_order.size()));
    EvaluateOptions opts;
    opts.jobs = 1;
    EvaluationReport report = build_merit_tables(grid, cases, opts);

    REQUIRE(report.tables.size() == 2);
    for (const auto& table : report.tables) {
        REQUIRE(table.rows.size() == 6); // k = 2..7
        double prev = std::numeric_limits<double>::infinity();
        int prev_k = 1;
        for (const auto& row : table.rows) {
            CHECK(row.k == prev_k + 1);
            CHECK(row.total <= prev);
            CHECK(row.total <= table.baseline_total);
            CHECK(row.reachable_count >= 1);
            CHECK(static_cast<int>(row.rs_ids.size()) == row.k);
            prev = row.total;
            prev_k = row.k;
        }
        // the k = n row is the all-reconfigurable bound: every config reachable
        CHECK(table.rows.back().reachable_count == grid.config_count());
    }
}

TEST_CASE("merit tables ignore the case iteration order") {
    ObjectiveGrid grid = spanish_grid();
    auto cases = enumerate_cases(7);
    EvaluateOptions opts;
    opts.jobs = 3;
    EvaluationReport a = build_merit_tables(grid, cases, opts);

    std::mt19937 rng(7);
    std::shuffle(cases.begin(), cases.end(), rng);
    EvaluationReport b = build_merit_tables(grid, cases, opts);

    REQUIRE(a.tables.size() == b.tables.size());
    for (size_t i = 0; i < a.tables.size(); ++i) {
        REQUIRE(a.tables[i].rows.size() == b.tables[i].rows.size());
        for (size_t r = 0; r < a.tables[i].rows.size(); ++r) {
            CHECK(a.tables[i].rows[r].best.rs_mask == b.tables[i].rows[r].best.rs_mask);
            CHECK(a.tables[i].rows[r].total == b.tables[i].rows[r].total);
            CHECK(a.tables[i].rows[r].flips == b.tables[i].rows[r].flips);
        }
    }
}

TEST_CASE("escape report flags timesteps no reachable configuration can save") {
    ObjectiveGrid g = toy_grid();
    for (int cfg = 0; cfg < 4; ++cfg)
        for (int t = 0; t < 3; ++t) g.extreme[g.cell(cfg, t)] = 0;
    // t1: everything extreme; t2: config 2 extreme only
    for (int cfg = 0; cfg < 4; ++cfg) g.extreme[g.cell(cfg, 1)] = 1;
    g.extreme[g.cell(2, 2)] = 1;

    EscapeReport rep = extreme_violation_escape(g, {0, 1, 2, 3});
    CHECK(rep.threshold == 0.10);
    CHECK(rep.failing_timesteps == std::vector<int>{1});

    // infeasible cells cannot provide escape
    for (int cfg = 0; cfg < 4; ++cfg) g.infeasible[g.cell(cfg, 0)] = 1;
    rep = extreme_violation_escape(g, {0, 1, 2, 3});
    CHECK(rep.failing_timesteps == std::vector<int>{0, 1});
}

TEST_CASE("full listing returns one evaluation per case and objective") {
    ObjectiveGrid grid = spanish_grid();
    auto cases = enumerate_cases(7);
    EvaluateOptions opts;
    opts.jobs = 2;
    opts.collect_full = true;
    EvaluationReport report = build_merit_tables(grid, cases, opts);
    CHECK(report.full_evaluations.size() == 2 * cases.size());
}

TEST_CASE("sampled timesteps of winning paths sit on the column minimum") {
    ObjectiveGrid grid = spanish_grid();
    auto cases = enumerate_cases(7);
    EvaluateOptions opts;
    opts.jobs = 1;
    opts.collect_full = true;
    EvaluationReport report = build_merit_tables(grid, cases, opts);

    std::mt19937 rng(20260815);
    std::uniform_int_distribution<size_t> pick_eval(0, report.full_evaluations.size() - 1);
    std::uniform_int_distribution<int> pick_t(0, grid.timesteps - 1);
    for (int i = 0; i < 300; ++i) {
        const CaseEvaluation& ev = report.full_evaluations[pick_eval(rng)];
        int t = pick_t(rng);
        auto reach = reachable_configs(ev.rcase, report.start_config, grid);
        double best = std::numeric_limits<double>::infinity();
        for (int cfg : reach) {
            if (grid.infeasible[grid.cell(cfg, t)]) continue;
            double v = ev.objective == Objective::Losses
                           ? grid.losses_mw[grid.cell(cfg, t)]
                           : static_cast<double>(grid.violations[grid.cell(cfg, t)]);
            best = std::min(best, v);
        }
        double chosen = ev.objective == Objective::Losses
                            ? grid.losses_mw[grid.cell(ev.path[t], t)]
                            : static_cast<double>(grid.violations[grid.cell(ev.path[t], t)]);
        CHECK(chosen == best);
    }
}
