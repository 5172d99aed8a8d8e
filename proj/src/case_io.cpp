#include "dnr/case_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dnr/errors.hpp"

namespace dnr {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) { known = true; break; }
        if (!known)
            throw validation_error("unknown_key",
                                   "unknown key '" + it.key() + "' in " + where);
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw validation_error("missing_key",
                               "missing key '" + std::string(key) + "' in " + where);
    return *it;
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string())
        throw validation_error("bad_type", where + " must be a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw validation_error("bad_type", where + " must be a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean())
        throw validation_error("bad_type", where + " must be a boolean");
    return v.get<bool>();
}

json parse_document(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw validation_error("parse_error", e.what());
    }
}

} // namespace

NetworkCase load_case(std::istream& in) {
    json doc = parse_document(in);
    if (!doc.is_object())
        throw validation_error("parse_error", "case document must be a JSON object");
    reject_unknown_keys(doc, {"base_mva", "buses", "branches", "switches", "loads", "generators"},
                        "case document");

    NetworkCase c;
    c.base_mva = as_number(require(doc, "base_mva", "case document"), "base_mva");

    const json& buses = require(doc, "buses", "case document");
    if (!buses.is_array())
        throw validation_error("bad_type", "buses must be an array");
    for (const json& jb : buses) {
        reject_unknown_keys(jb, {"id", "vmin", "vmax", "is_feeder_head"}, "bus");
        Bus bus;
        bus.id = as_string(require(jb, "id", "bus"), "bus id");
        if (jb.contains("vmin")) bus.vmin = as_number(jb["vmin"], "vmin");
        if (jb.contains("vmax")) bus.vmax = as_number(jb["vmax"], "vmax");
        if (jb.contains("is_feeder_head"))
            bus.is_feeder_head = as_bool(jb["is_feeder_head"], "is_feeder_head");
        c.buses.push_back(std::move(bus));
    }

    if (doc.contains("branches")) {
        if (!doc["branches"].is_array())
            throw validation_error("bad_type", "branches must be an array");
        for (const json& jb : doc["branches"]) {
            reject_unknown_keys(jb, {"id", "from", "to", "r", "x", "b"}, "branch");
            Branch br;
            br.id = as_string(require(jb, "id", "branch"), "branch id");
            br.from_bus = as_string(require(jb, "from", "branch"), "branch from");
            br.to_bus = as_string(require(jb, "to", "branch"), "branch to");
            br.r = as_number(require(jb, "r", "branch"), "branch r");
            br.x = as_number(require(jb, "x", "branch"), "branch x");
            if (jb.contains("b")) br.b = as_number(jb["b"], "branch b");
            c.branches.push_back(std::move(br));
        }
    }

    if (doc.contains("switches")) {
        if (!doc["switches"].is_array())
            throw validation_error("bad_type", "switches must be an array");
        for (const json& js : doc["switches"]) {
            reject_unknown_keys(js, {"id", "from", "to", "name"}, "switch");
            Switch sw;
            sw.id = as_string(require(js, "id", "switch"), "switch id");
            sw.from_bus = as_string(require(js, "from", "switch"), "switch from");
            sw.to_bus = as_string(require(js, "to", "switch"), "switch to");
            sw.name = js.contains("name") ? as_string(js["name"], "switch name") : sw.id;
            c.switches.push_back(std::move(sw));
        }
    }

    auto load_units = [&](const char* key, auto& out, const char* what) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_array())
            throw validation_error("bad_type", std::string(key) + " must be an array");
        for (const json& ju : doc[key]) {
            reject_unknown_keys(ju, {"id", "bus", "profile_key", "power_factor"}, what);
            typename std::decay_t<decltype(out)>::value_type unit;
            unit.id = as_string(require(ju, "id", what), "id");
            unit.bus = as_string(require(ju, "bus", what), "bus");
            unit.profile_key = as_string(require(ju, "profile_key", what), "profile_key");
            if (ju.contains("power_factor"))
                unit.power_factor = as_number(ju["power_factor"], "power_factor");
            out.push_back(std::move(unit));
        }
    };
    load_units("loads", c.loads, "load");
    load_units("generators", c.generators, "generator");

    c.validate();
    return c;
}

NetworkCase load_case_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("file_not_found", "cannot open case file '" + path + "'");
    return load_case(in);
}

NetworkCase load_case_string(const std::string& text) {
    std::istringstream in(text);
    return load_case(in);
}

std::string save_case(const NetworkCase& c) {
    json doc;
    doc["base_mva"] = c.base_mva;
    doc["buses"] = json::array();
    for (const Bus& bus : c.buses) {
        json jb;
        jb["id"] = bus.id;
        jb["vmin"] = bus.vmin;
        jb["vmax"] = bus.vmax;
        jb["is_feeder_head"] = bus.is_feeder_head;
        doc["buses"].push_back(std::move(jb));
    }
    doc["branches"] = json::array();
    for (const Branch& br : c.branches) {
        json jb;
        jb["id"] = br.id;
        jb["from"] = br.from_bus;
        jb["to"] = br.to_bus;
        jb["r"] = br.r;
        jb["x"] = br.x;
        jb["b"] = br.b;
        doc["branches"].push_back(std::move(jb));
    }
    doc["switches"] = json::array();
    for (const Switch& sw : c.switches) {
        json js;
        js["id"] = sw.id;
        js["from"] = sw.from_bus;
        js["to"] = sw.to_bus;
        js["name"] = sw.name;
        doc["switches"].push_back(std::move(js));
    }
    auto dump_units = [&](const char* key, const auto& units) {
        doc[key] = json::array();
        for (const auto& unit : units) {
            json ju;
            ju["id"] = unit.id;
            ju["bus"] = unit.bus;
            ju["profile_key"] = unit.profile_key;
            ju["power_factor"] = unit.power_factor;
            doc[key].push_back(std::move(ju));
        }
    };
    dump_units("loads", c.loads);
    dump_units("generators", c.generators);
    return doc.dump(2) + "\n";
}

void save_case_file(const NetworkCase& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("write_failed", "cannot write case file '" + path + "'");
    out << save_case(c);
}

double ProfileSet::value_kw(const std::string& key, int t) const {
    auto it = columns_.find(key);
    if (it == columns_.end())
        throw validation_error("missing_profile_key", "profile key '" + key + "' not found");
    if (t < 0 || t >= timesteps())
        throw validation_error("bad_timestep",
                               "timestep " + std::to_string(t) + " outside profile horizon");
    return rows_[static_cast<size_t>(t)][static_cast<size_t>(it->second)];
}

std::vector<std::string> ProfileSet::keys() const {
    std::vector<std::string> out(columns_.size());
    for (const auto& [key, idx] : columns_)
        out[static_cast<size_t>(idx)] = key;
    return out;
}

ProfileSet ProfileSet::parse(std::istream& in) {
    ProfileSet set;
    std::string line;
    if (!std::getline(in, line))
        throw validation_error("parse_error", "profile CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "timestep")
        throw validation_error("parse_error", "profile CSV header must start with 'timestep'");
    for (size_t i = 1; i < header.size(); ++i) {
        if (header[i].empty())
            throw validation_error("parse_error", "empty profile key in CSV header");
        if (!set.columns_.emplace(header[i], static_cast<int>(i - 1)).second)
            throw validation_error("duplicate_id", "duplicate profile key '" + header[i] + "'");
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(header.size() - 1);
        std::stringstream ss(line);
        std::string cell;
        size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col == 0) {
                int t = -1;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), t);
                if (ec != std::errc() || ptr != cell.data() + cell.size() ||
                    t != static_cast<int>(set.rows_.size()))
                    throw validation_error("bad_timestep",
                                           "CSV line " + std::to_string(line_no) +
                                               " expects timestep " +
                                               std::to_string(set.rows_.size()));
            } else {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc() || ptr != cell.data() + cell.size())
                    throw validation_error("parse_error",
                                           "bad number '" + cell + "' at CSV line " +
                                               std::to_string(line_no));
                row.push_back(v);
            }
            ++col;
        }
        if (col != header.size())
            throw validation_error("parse_error",
                                   "CSV line " + std::to_string(line_no) + " has " +
                                       std::to_string(col) + " cells, expected " +
                                       std::to_string(header.size()));
        set.rows_.push_back(std::move(row));
    }
    if (set.rows_.empty())
        throw validation_error("parse_error", "profile CSV has no data rows");
    return set;
}

ProfileSet ProfileSet::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("file_not_found", "cannot open profile file '" + path + "'");
    return parse(in);
}

ProfileSet ProfileSet::load_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ProfileSet ProfileSet::constant(const std::vector<std::string>& keys, double kw, int timesteps) {
    ProfileSet set;
    for (size_t i = 0; i < keys.size(); ++i)
        set.columns_.emplace(keys[i], static_cast<int>(i));
    set.rows_.assign(static_cast<size_t>(timesteps),
                     std::vector<double>(keys.size(), kw));
    return set;
}

} // namespace dnr
