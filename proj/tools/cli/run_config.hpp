#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace backflow::cli {

inline const std::vector<std::string> kCommands = {"free", "scatter", "transmission",
                                                   "evolve", "scan", "admissible"};

struct RunConfig {
    std::string command = "free";
    std::string smearing = "gaussian:0,1";
    std::string potential;
    double mass = 1.0;

    double p_max = 8.0;
    std::size_t nodes = 200;
    std::vector<std::size_t> scan_nodes{100, 200, 400};
    std::vector<double> scan_p_max{8.0, 16.0};
    double tolerance = 1e-2;
    bool dump_matrix = false;

    double k_min = 0.1;
    double k_max = 10.0;
    std::size_t n_k = 30;
    std::string method = "auto";

    double x_min = -32.0;
    double x_max = 32.0;
    std::size_t n_points = 1024;
    double dt = 9e-5;
    double t_max = 2.0;
    std::size_t sample_every = 10;
    std::string packet = "gaussian";
    double x0 = -4.0;
    double p0 = 2.0;
    double sigma = 2.0;
    std::size_t snapshot_every = 0;
    std::size_t particles = 10000;

    std::string output = "backflow-out";
    std::uint64_t seed = 42;

    bool operator==(const RunConfig&) const = default;
};

/// Pretty JSON with a fixed key order; parse(serialize(c)) == c and
/// serialize(parse(s)) == s for any s produced by serialize.
std::string serialize(const RunConfig& c);
/// Throws InvalidArgument on malformed JSON, unknown keys or wrong types.
RunConfig parse_config(const std::string& json_text);

/// Merges `overrides` (a JSON object, possibly partial) over `base`.
RunConfig merge_config(const RunConfig& base, const std::string& overrides);

}  // namespace backflow::cli
