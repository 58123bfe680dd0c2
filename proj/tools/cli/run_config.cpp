#include "cli/run_config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <type_traits>

#include <json.hpp>

#include "backflow/errors.hpp"

namespace backflow::cli {

using nlohmann::ordered_json;

namespace {

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["smearing"] = c.smearing;
    j["potential"] = c.potential;
    j["mass"] = c.mass;
    j["p_max"] = c.p_max;
    j["nodes"] = c.nodes;
    j["scan_nodes"] = c.scan_nodes;
    j["scan_p_max"] = c.scan_p_max;
    j["tolerance"] = c.tolerance;
    j["dump_matrix"] = c.dump_matrix;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["n_k"] = c.n_k;
    j["method"] = c.method;
    j["x_min"] = c.x_min;
    j["x_max"] = c.x_max;
    j["n_points"] = c.n_points;
    j["dt"] = c.dt;
    j["t_max"] = c.t_max;
    j["sample_every"] = c.sample_every;
    j["packet"] = c.packet;
    j["x0"] = c.x0;
    j["p0"] = c.p0;
    j["sigma"] = c.sigma;
    j["snapshot_every"] = c.snapshot_every;
    j["particles"] = c.particles;
    j["output"] = c.output;
    j["seed"] = c.seed;
    return j;
}

[[noreturn]] void bad(const std::string& key, const char* what) {
    throw InvalidArgument("config key '" + key + "': expected " + what);
}

void read(const ordered_json& v, const std::string& key, std::string& out) {
    if (!v.is_string()) bad(key, "a string");
    out = v.get<std::string>();
}
void read(const ordered_json& v, const std::string& key, double& out) {
    if (!v.is_number()) bad(key, "a number");
    out = v.get<double>();
}
void read(const ordered_json& v, const std::string& key, bool& out) {
    if (!v.is_boolean()) bad(key, "true or false");
    out = v.get<bool>();
}
template <typename T>
    requires std::is_unsigned_v<T>
void read(const ordered_json& v, const std::string& key, T& out) {
    if (!v.is_number_unsigned()) bad(key, "a nonnegative integer");
    out = v.get<T>();
}
template <typename T>
void read(const ordered_json& v, const std::string& key, std::vector<T>& out) {
    if (!v.is_array()) bad(key, "an array");
    out.clear();
    for (const auto& e : v) {
        T x{};
        read(e, key, x);
        out.push_back(x);
    }
}

template <typename T>
std::pair<std::string, std::function<void(const ordered_json&)>> field(const std::string& key, T& ref) {
    return {key, [&ref, key](const ordered_json& v) { read(v, key, ref); }};
}

RunConfig from_json(const ordered_json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    RunConfig c;
    const std::map<std::string, std::function<void(const ordered_json&)>> fields{
        field("command", c.command),       field("smearing", c.smearing),
        field("potential", c.potential),   field("mass", c.mass),
        field("p_max", c.p_max),           field("nodes", c.nodes),
        field("scan_nodes", c.scan_nodes), field("scan_p_max", c.scan_p_max),
        field("tolerance", c.tolerance),   field("dump_matrix", c.dump_matrix),
        field("k_min", c.k_min),           field("k_max", c.k_max),
        field("n_k", c.n_k),               field("method", c.method),
        field("x_min", c.x_min),           field("x_max", c.x_max),
        field("n_points", c.n_points),     field("dt", c.dt),
        field("t_max", c.t_max),           field("sample_every", c.sample_every),
        field("packet", c.packet),         field("x0", c.x0),
        field("p0", c.p0),                 field("sigma", c.sigma),
        field("snapshot_every", c.snapshot_every),
        field("particles", c.particles),   field("output", c.output),
        field("seed", c.seed),
    };
    for (const auto& [key, value] : j.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) throw InvalidArgument("unknown config key '" + key + "'");
        it->second(value);
    }
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
        throw InvalidArgument("unknown command '" + c.command + "'");
    }
    if (c.method != "auto" && c.method != "numeric") {
        throw InvalidArgument("method must be 'auto' or 'numeric'");
    }
    if (c.packet != "gaussian" && c.packet != "minimizer") {
        throw InvalidArgument("packet must be 'gaussian' or 'minimizer'");
    }
    return c;
}

ordered_json parse_json(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed config JSON: ") + e.what());
    }
}

}  // namespace

std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

RunConfig parse_config(const std::string& json_text) { return from_json(parse_json(json_text)); }

RunConfig merge_config(const RunConfig& base, const std::string& overrides) {
    auto j = to_json(base);
    const auto patch = parse_json(overrides);
    if (!patch.is_object()) throw InvalidArgument("config override must be a JSON object");
    for (const auto& [key, value] : patch.items()) j[key] = value;
    return from_json(j);
}

}  // namespace backflow::cli
