#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypersurf/fractal.hpp"
#include "hypersurf/geometry.hpp"
#include "hypersurf/measure.hpp"

namespace hypersurf {

/// Everything a CLI run depends on. Fields below `out` are optional in the JSON
/// file and take the defaults shown.
struct RunConfig {
    int n = 2;
    std::string partition = "triangle";  // "triangle" (n = 2) or "interval" (n = 1)
    int pieces = 4;                      // N; read from "N" for intervals
    int depth_k = 1;
    std::vector<double> alphas;
    std::string g_source;
    std::string b_source;
    int lattice_depth = 6;
    double tolerance = 1e-10;
    std::vector<double> probabilities;  // empty means uniform
    std::uint64_t seed = 42;
    std::string out = "./out";

    int max_iter = 1000;
    std::size_t chaos_count = 100000;
    int burn_in = 100;
    double beta = 1.0;
    int k_max = 5;          // oscillation profile depth
    int box_k_min = 2;      // box counts at δ = c^k for k = box_k_min..box_k_max
    int box_k_max = 6;
    int dim_lattice_depth = 8;
};

/// Reads and validates a config file. Every failure is a ValidationError whose
/// field() names the offending key ("json" for syntax errors, "path" for I/O).
RunConfig load_config(const std::filesystem::path& path);

/// Validates an already-parsed JSON document given as text.
RunConfig parse_config(const std::string& json_text);

Partition build_partition(const RunConfig& config);
FractalSystem build_system(const RunConfig& config);
FractalSystem build_system(const RunConfig& config, const Partition& partition);
ProbabilityVector build_probabilities(const RunConfig& config);

/// The config as a JSON object with every field, including defaults (17-digit numbers).
std::string config_json(const RunConfig& config, int indent = 2);

}  // namespace hypersurf
