#include "dnr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include <openssl/evp.h>

#include "dnr/errors.hpp"
#include "json.hpp"

namespace dnr {

namespace {

using ordered_json = nlohmann::ordered_json;

const ordered_json& require(const ordered_json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw validation_error("missing_key", std::string(where) + " is missing key '" + key + "'");
    return *it;
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot_write", "cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw io_error("write_failed", "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot_read", "cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

} // namespace

std::string configs_to_json(const RadialArtifact& artifact) {
    ordered_json j;
    j["switch_order"] = artifact.set.switch_order;
    j["switch_names"] = artifact.switch_names;
    ordered_json configs = ordered_json::array();
    for (const auto& cfg : artifact.set.configs) configs.push_back(cfg.to_string());
    j["configs"] = std::move(configs);
    j["fixed_open"] = artifact.fixed_open;
    const RadialStats& s = artifact.set.stats;
    ordered_json stats;
    stats["candidates_total"] = s.candidates_total;
    stats["pruned_cycle_groups"] = s.pruned_cycle_groups;
    stats["examined"] = s.examined;
    stats["rejected_count_check"] = s.rejected_count_check;
    stats["rejected_loop_check"] = s.rejected_loop_check;
    stats["rejected_connectivity"] = s.rejected_connectivity;
    stats["accepted"] = s.accepted;
    stats["discarded_pct"] =
        s.candidates_total == 0
            ? 0.0
            : 100.0 * static_cast<double>(s.candidates_total - s.accepted) / s.candidates_total;
    j["stats"] = std::move(stats);
    return j.dump(2) + "\n";
}

void save_configs_file(const RadialArtifact& artifact, const std::string& path) {
    write_text_file(path, configs_to_json(artifact));
}

RadialArtifact load_configs_string(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw validation_error("bad_json", "configs artifact is not valid JSON");

    RadialArtifact artifact;
    for (const auto& id : require(j, "switch_order", "configs artifact"))
        artifact.set.switch_order.push_back(id.get<std::string>());
    for (const auto& name : require(j, "switch_names", "configs artifact"))
        artifact.switch_names.push_back(name.get<std::string>());
    if (artifact.switch_names.size() != artifact.set.switch_order.size())
        throw validation_error("length_mismatch", "switch_names length differs from switch_order");
    const int n = static_cast<int>(artifact.set.switch_order.size());
    for (const auto& bits : require(j, "configs", "configs artifact")) {
        Configuration cfg = Configuration::from_string(bits.get<std::string>());
        if (cfg.n != n)
            throw validation_error("length_mismatch", "configuration length differs from switch_order");
        artifact.set.configs.push_back(cfg);
    }
    for (const auto& id : require(j, "fixed_open", "configs artifact"))
        artifact.fixed_open.push_back(id.get<std::string>());
    const ordered_json& stats = require(j, "stats", "configs artifact");
    RadialStats& s = artifact.set.stats;
    s.candidates_total = require(stats, "candidates_total", "stats").get<uint64_t>();
    s.pruned_cycle_groups = require(stats, "pruned_cycle_groups", "stats").get<uint64_t>();
    s.examined = require(stats, "examined", "stats").get<uint64_t>();
    s.rejected_count_check = require(stats, "rejected_count_check", "stats").get<uint64_t>();
    s.rejected_loop_check = require(stats, "rejected_loop_check", "stats").get<uint64_t>();
    s.rejected_connectivity = require(stats, "rejected_connectivity", "stats").get<uint64_t>();
    s.accepted = require(stats, "accepted", "stats").get<uint64_t>();
    return artifact;
}

RadialArtifact load_configs_file(const std::string& path) {
    return load_configs_string(read_text_file(path));
}

namespace {

ordered_json merit_row_json(const MeritRow& row) {
    ordered_json r;
    r["k"] = row.k;
    r["rs_set"] = row.rs_ids;
    r["total"] = row.total;
    if (row.reduction_pct)
        r["reduction_pct"] = *row.reduction_pct;
    else
        r["reduction_pct"] = nullptr;
    if (row.gain_vs_prev_k)
        r["gain_vs_prev_k"] = *row.gain_vs_prev_k;
    else
        r["gain_vs_prev_k"] = nullptr;
    r["flips"] = row.flips;
    r["reachable_count"] = row.reachable_count;
    return r;
}

} // namespace

std::string merit_to_json(const EvaluationReport& report, const ObjectiveGrid& grid,
                          const std::vector<std::string>& switch_names, double timestep_hours) {
    std::map<std::string, std::string> name_of;
    for (size_t i = 0; i < grid.switch_order.size() && i < switch_names.size(); ++i)
        name_of[grid.switch_order[i]] = switch_names[i];
    auto to_names = [&](const std::vector<std::string>& ids) {
        std::vector<std::string> names;
        for (const auto& id : ids) {
            auto it = name_of.find(id);
            names.push_back(it == name_of.end() ? id : it->second);
        }
        return names;
    };

    ordered_json j;
    j["switch_order"] = grid.switch_order;
    j["start_config"] = grid.configs[report.start_config].to_string();
    j["start_config_index"] = report.start_config;
    j["timestep_hours"] = timestep_hours;

    ordered_json tables = ordered_json::array();
    for (const auto& table : report.tables) {
        ordered_json t;
        t["objective"] = objective_name(table.objective);
        t["baseline_total"] = table.baseline_total;
        ordered_json rows = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json r = merit_row_json(row);
            r["rs_set"] = to_names(row.rs_ids);
            rows.push_back(std::move(r));
        }
        t["rows"] = std::move(rows);
        if (!table.rows.empty()) {
            const MeritRow& bound = table.rows.back();
            ordered_json b;
            b["k"] = bound.k;
            b["total"] = bound.total;
            if (bound.reduction_pct)
                b["reduction_pct"] = *bound.reduction_pct;
            else
                b["reduction_pct"] = nullptr;
            t["all_reconfigurable"] = std::move(b);
        }
        tables.push_back(std::move(t));
    }
    j["tables"] = std::move(tables);

    ordered_json escape;
    escape["threshold"] = report.escape.threshold;
    escape["failing_timesteps"] = report.escape.failing_timesteps;
    j["extreme_escape"] = std::move(escape);

    if (!report.full_evaluations.empty()) {
        ordered_json full = ordered_json::array();
        for (const auto& ev : report.full_evaluations) {
            ordered_json e;
            e["objective"] = objective_name(ev.objective);
            e["rs_set"] = to_names(ev.rcase.switch_ids(grid.switch_order));
            e["k"] = ev.rcase.size();
            e["total"] = ev.total;
            e["flips"] = ev.flips;
            e["reachable_count"] = ev.reachable_count;
            e["path"] = ev.path;
            full.push_back(std::move(e));
        }
        j["evaluations"] = std::move(full);
    }
    return j.dump(2) + "\n";
}

void save_merit_file(const EvaluationReport& report, const ObjectiveGrid& grid,
                     const std::vector<std::string>& switch_names, double timestep_hours,
                     const std::string& path) {
    write_text_file(path, merit_to_json(report, grid, switch_names, timestep_hours));
}

std::string sha256_hex_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot_read", "cannot open '" + path + "'");

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw io_error("digest_failed", "SHA-256 init failed");
    }
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<size_t>(got)) != 1) {
            EVP_MD_CTX_free(ctx);
            throw io_error("digest_failed", "SHA-256 update failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw io_error("digest_failed", "SHA-256 final failed");
    }
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

namespace {

struct ManifestData {
    const PipelineOptions* opts = nullptr;
    std::string case_digest;
    std::string profiles_digest;
    StageTimings timings;
    std::vector<std::string> artifacts;
    int buses = 0;
    int switches = 0;
    int radial_configs = -1;
    int timesteps = -1;
    int64_t replacement_cases = -1;
};

void write_manifest(const ManifestData& m, const Error* failure) {
    const PipelineOptions& o = *m.opts;
    ordered_json j;
    j["tool"] = "dnr";
    j["version"] = kToolVersion;
    ordered_json inputs;
    inputs["case"] = {{"path", o.case_path}, {"sha256", m.case_digest}};
    inputs["profiles"] = {{"path", o.profiles_path}, {"sha256", m.profiles_digest}};
    j["inputs"] = std::move(inputs);
    ordered_json settings;
    settings["tolerance"] = o.solver.tolerance;
    settings["max_iterations"] = o.solver.max_iterations;
    settings["extreme_dev"] = o.extreme_dev;
    settings["timestep_hours"] = o.timestep_hours;
    settings["jobs"] = o.jobs;
    settings["prune_cycle_groups"] = o.radial.prune_cycle_groups;
    ordered_json objectives = ordered_json::array();
    if (o.evaluate_losses) objectives.push_back("losses");
    if (o.evaluate_violations) objectives.push_back("violations");
    settings["objectives"] = std::move(objectives);
    j["settings"] = std::move(settings);
    ordered_json counts;
    counts["buses"] = m.buses;
    counts["switches"] = m.switches;
    if (m.radial_configs >= 0) counts["radial_configs"] = m.radial_configs;
    if (m.timesteps >= 0) counts["timesteps"] = m.timesteps;
    if (m.replacement_cases >= 0) counts["replacement_cases"] = m.replacement_cases;
    j["counts"] = std::move(counts);
    ordered_json stages;
    stages["radial_s"] = m.timings.radial_s;
    stages["power_flow_s"] = m.timings.power_flow_s;
    stages["evaluation_s"] = m.timings.evaluation_s;
    stages["report_s"] = m.timings.report_s;
    j["stages"] = std::move(stages);
    j["artifacts"] = m.artifacts;
    if (failure) {
        j["status"] = "failed";
        ordered_json err;
        switch (failure->kind()) {
        case ErrorKind::Validation: err["kind"] = "validation"; break;
        case ErrorKind::Numerical: err["kind"] = "numerical"; break;
        case ErrorKind::Io: err["kind"] = "io"; break;
        }
        err["code"] = failure->code();
        err["message"] = failure->what();
        j["error"] = std::move(err);
    } else {
        j["status"] = "ok";
    }
    write_text_file((std::filesystem::path(o.out_dir) / "manifest.json").string(),
                    j.dump(2) + "\n");
}

} // namespace

PipelineResult run_pipeline(const PipelineOptions& opts) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw io_error("cannot_create_dir", "cannot create '" + opts.out_dir + "': " + ec.message());

    NetworkCase c = load_case_file(opts.case_path);
    ProfileSet profiles = ProfileSet::load_file(opts.profiles_path);

    ManifestData manifest;
    manifest.opts = &opts;
    manifest.case_digest = sha256_hex_file(opts.case_path);
    manifest.profiles_digest = sha256_hex_file(opts.profiles_path);
    manifest.buses = static_cast<int>(c.buses.size());
    manifest.switches = static_cast<int>(c.switches.size());
    manifest.timesteps = profiles.timesteps();

    PipelineResult result;
    auto out_path = [&](const char* name) { return (fs::path(opts.out_dir) / name).string(); };

    try {
        auto t0 = std::chrono::steady_clock::now();
        ReducedGraph g = reduce(c);
        result.radial.set = enumerate_radial(g, opts.radial);
        result.radial.fixed_open = g.fixed_open;
        for (const auto& id : result.radial.set.switch_order) {
            for (const auto& sw : c.switches)
                if (sw.id == id) {
                    result.radial.switch_names.push_back(sw.name);
                    break;
                }
        }
        manifest.timings.radial_s = elapsed_s(t0);
        manifest.radial_configs = result.radial.set.size();

        auto tw = std::chrono::steady_clock::now();
        save_configs_file(result.radial, out_path("configs.json"));
        manifest.artifacts.push_back("configs.json");
        manifest.timings.report_s += elapsed_s(tw);

        t0 = std::chrono::steady_clock::now();
        GridOptions gopts;
        gopts.solver = opts.solver;
        gopts.extreme_dev = opts.extreme_dev;
        gopts.jobs = opts.jobs;
        result.grid = run_grid(c, result.radial.set, profiles, gopts);
        manifest.timings.power_flow_s = elapsed_s(t0);

        tw = std::chrono::steady_clock::now();
        save_grid_file(result.grid, out_path("grid.json"));
        manifest.artifacts.push_back("grid.json");
        write_heatmaps(result.grid, opts.out_dir);
        manifest.artifacts.push_back("losses.csv");
        manifest.artifacts.push_back("violations.csv");
        manifest.timings.report_s += elapsed_s(tw);

        t0 = std::chrono::steady_clock::now();
        auto cases = enumerate_cases(static_cast<int>(result.radial.set.switch_order.size()));
        manifest.replacement_cases = static_cast<int64_t>(cases.size());
        EvaluateOptions eopts;
        eopts.timestep_hours = opts.timestep_hours;
        eopts.evaluate_losses = opts.evaluate_losses;
        eopts.evaluate_violations = opts.evaluate_violations;
        eopts.collect_full = opts.full_listing;
        eopts.jobs = opts.jobs;
        result.report = build_merit_tables(result.grid, cases, eopts);
        manifest.timings.evaluation_s = elapsed_s(t0);

        tw = std::chrono::steady_clock::now();
        save_merit_file(result.report, result.grid, result.radial.switch_names,
                        opts.timestep_hours, out_path("merit.json"));
        manifest.artifacts.push_back("merit.json");
        manifest.timings.report_s += elapsed_s(tw);
    } catch (const Error& e) {
        result.timings = manifest.timings;
        try {
            write_manifest(manifest, &e);
        } catch (...) {
        }
        throw;
    }

    result.timings = manifest.timings;
    write_manifest(manifest, nullptr);
    return result;
}

BenchReport run_bench(const NetworkCase& c, const ProfileSet& profiles,
                      const PipelineOptions& opts, int repetitions) {
    if (repetitions < 1) throw validation_error("bad_repetitions", "repetitions must be >= 1");

    auto collect = [](std::vector<double>& samples) {
        BenchStat stat;
        stat.min_s = *std::min_element(samples.begin(), samples.end());
        stat.max_s = *std::max_element(samples.begin(), samples.end());
        stat.mean_s = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
        return stat;
    };

    std::vector<double> radial_t, flow_t, eval_t;
    for (int rep = 0; rep < repetitions; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        ReducedGraph g = reduce(c);
        RadialSet radial = enumerate_radial(g, opts.radial);
        radial_t.push_back(elapsed_s(t0));

        t0 = std::chrono::steady_clock::now();
        GridOptions gopts;
        gopts.solver = opts.solver;
        gopts.extreme_dev = opts.extreme_dev;
        gopts.jobs = opts.jobs;
        ObjectiveGrid grid = run_grid(c, radial, profiles, gopts);
        flow_t.push_back(elapsed_s(t0));

        t0 = std::chrono::steady_clock::now();
        auto cases = enumerate_cases(static_cast<int>(radial.switch_order.size()));
        EvaluateOptions eopts;
        eopts.timestep_hours = opts.timestep_hours;
        eopts.jobs = opts.jobs;
        build_merit_tables(grid, cases, eopts);
        eval_t.push_back(elapsed_s(t0));
    }

    BenchReport report;
    report.repetitions = repetitions;
    report.radial = collect(radial_t);
    report.power_flow = collect(flow_t);
    report.evaluation = collect(eval_t);

    double total = report.radial.mean_s + report.power_flow.mean_s + report.evaluation.mean_s;
    struct Named {
        const char* name;
        double mean;
    } stages[] = {{"radial", report.radial.mean_s},
                  {"power_flow", report.power_flow.mean_s},
                  {"evaluation", report.evaluation.mean_s}};
    const Named* top = &stages[0];
    for (const Named& s : stages)
        if (s.mean > top->mean) top = &s;
    report.dominant_stage = top->name;
    report.dominant_share_pct = total > 0 ? 100.0 * top->mean / total : 0.0;
    return report;
}

std::string bench_to_json(const BenchReport& report) {
    auto stat_json = [](const BenchStat& s) {
        ordered_json j;
        j["mean_s"] = s.mean_s;
        j["min_s"] = s.min_s;
        j["max_s"] = s.max_s;
        return j;
    };
    ordered_json j;
    j["repetitions"] = report.repetitions;
    ordered_json stages;
    stages["radial"] = stat_json(report.radial);
    stages["power_flow"] = stat_json(report.power_flow);
    stages["evaluation"] = stat_json(report.evaluation);
    j["stages"] = std::move(stages);
    j["dominant_stage"] = report.dominant_stage;
    j["dominant_share_pct"] = report.dominant_share_pct;
    char note[160];
    std::snprintf(note, sizeof note, "%s accounts for %.1f%% of mean stage time",
                  report.dominant_stage.c_str(), report.dominant_share_pct);
    j["note"] = note;
    return j.dump(2) + "\n";
}

} // namespace dnr
