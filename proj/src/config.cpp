#include "hypersurf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hypersurf/errors.hpp"
#include "json.hpp"

namespace hypersurf {

namespace {

using nlohmann::json;

const std::set<std::string> kRequired = {"n", "partition", "depth_k", "alphas", "g", "b",
                                         "lattice_depth", "tolerance", "seed", "out"};
const std::set<std::string> kOptional = {"N", "probabilities", "max_iter", "chaos_count", "burn_in", "beta",
                                         "k_max", "box_k_min", "box_k_max", "dim_lattice_depth"};

// Largest lattice depths accepted for the two partition kinds (about 2M and 16M points).
constexpr int kMaxTriangleDepth = 11;
constexpr double kMaxIntervalPoints = 16777216.0;

int get_int(const json& doc, const std::string& key, long long lo, long long hi) {
    const json& v = doc.at(key);
    if (!v.is_number_integer()) throw ValidationError(key, "must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
        throw ValidationError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] (got " +
                                       std::to_string(x) + ")");
    return static_cast<int>(x);
}

double get_number(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number()) throw ValidationError(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(key, "must be finite");
    return x;
}

std::string get_string(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_string()) throw ValidationError(key, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_array()) throw ValidationError(key, "must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) throw ValidationError(key, "must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Expression parse_field(const std::string& key, const std::string& source, int dim) {
    try {
        return Expression::parse(source, dim);
    } catch (const ParseError& e) {
        throw ValidationError(key, e.what());
    }
}

int max_lattice_depth(const RunConfig& c) {
    if (c.partition == "triangle") return kMaxTriangleDepth;
    int d = 1;
    while (std::pow(static_cast<double>(c.pieces), d + 1) <= kMaxIntervalPoints) ++d;
    return d;
}

void check_lattice_depth(const RunConfig& c, const std::string& key, int depth) {
    if (c.partition == "triangle" && depth > kMaxTriangleDepth)
        throw ValidationError(key, "must be <= " + std::to_string(kMaxTriangleDepth) + " for the triangle");
    if (c.partition == "interval" && std::pow(static_cast<double>(c.pieces), depth) > kMaxIntervalPoints)
        throw ValidationError(key, "N^depth must not exceed 2^24");
}

RunConfig from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("json", "top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!kRequired.contains(key) && !kOptional.contains(key)) throw ValidationError(key, "unknown field");
    }
    for (const std::string& key : kRequired)
        if (!doc.contains(key)) throw ValidationError(key, "required field is missing");

    RunConfig c;
    c.n = get_int(doc, "n", 1, 2);
    c.partition = get_string(doc, "partition");
    if (c.partition == "triangle") {
        if (c.n != 2) throw ValidationError("partition", "triangle requires n = 2");
        if (doc.contains("N") && get_int(doc, "N", 4, 4) != 4) throw ValidationError("N", "triangle has N = 4");
        c.pieces = 4;
    } else if (c.partition == "interval") {
        if (c.n != 1) throw ValidationError("partition", "interval requires n = 1");
        if (!doc.contains("N")) throw ValidationError("N", "required for interval partitions");
        c.pieces = get_int(doc, "N", 2, 1024);
    } else {
        throw ValidationError("partition", "must be \"triangle\" or \"interval\" (got \"" + c.partition + "\")");
    }

    c.depth_k = get_int(doc, "depth_k", 1, 8);
    c.alphas = get_numbers(doc, "alphas");
    c.g_source = get_string(doc, "g");
    c.b_source = get_string(doc, "b");
    c.lattice_depth = get_int(doc, "lattice_depth", 1, 64);
    if (c.lattice_depth < c.depth_k) throw ValidationError("lattice_depth", "must be >= depth_k");
    check_lattice_depth(c, "lattice_depth", c.lattice_depth);
    c.tolerance = get_number(doc, "tolerance");
    if (!(c.tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");
    if (!doc.at("seed").is_number_unsigned()) throw ValidationError("seed", "must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.out = get_string(doc, "out");
    if (c.out.empty()) throw ValidationError("out", "must not be empty");
    if (doc.contains("probabilities")) c.probabilities = get_numbers(doc, "probabilities");

    if (doc.contains("max_iter")) c.max_iter = get_int(doc, "max_iter", 1, 1000000);
    if (doc.contains("chaos_count")) c.chaos_count = static_cast<std::size_t>(get_int(doc, "chaos_count", 1000, 100000000));
    if (doc.contains("burn_in")) c.burn_in = get_int(doc, "burn_in", 0, 1000000);
    if (doc.contains("beta")) {
        c.beta = get_number(doc, "beta");
        if (c.beta < 0.0 || c.beta > 2.0) throw ValidationError("beta", "must lie in [0, 2]");
    }
    if (doc.contains("dim_lattice_depth")) {
        c.dim_lattice_depth = get_int(doc, "dim_lattice_depth", 1, 64);
        check_lattice_depth(c, "dim_lattice_depth", c.dim_lattice_depth);
    } else {
        c.dim_lattice_depth = std::min(std::max(c.lattice_depth, c.dim_lattice_depth), max_lattice_depth(c));
    }
    if (doc.contains("box_k_min")) c.box_k_min = get_int(doc, "box_k_min", 1, 64);
    if (doc.contains("box_k_max")) c.box_k_max = get_int(doc, "box_k_max", 1, 64);
    else c.box_k_max = std::min(c.box_k_max, c.dim_lattice_depth);
    if (!doc.contains("k_max")) c.k_max = std::min(c.k_max, c.dim_lattice_depth);
    if (c.box_k_max < c.box_k_min + 2) throw ValidationError("box_k_max", "need at least 3 scales (box_k_max >= box_k_min + 2)");
    if (c.box_k_max > c.dim_lattice_depth) throw ValidationError("box_k_max", "must be <= dim_lattice_depth");
    if (doc.contains("k_max")) c.k_max = get_int(doc, "k_max", 1, 64);
    if (c.k_max > c.dim_lattice_depth) throw ValidationError("k_max", "must be <= dim_lattice_depth");

    // Semantic checks shared with the library types.
    build_system(c);
    build_probabilities(c);
    return c;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("json", e.what());
    }
    return from_json(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("path", "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

Partition build_partition(const RunConfig& config) {
    return config.partition == "interval" ? interval_partition(config.pieces) : standard_triangle_partition();
}

FractalSystem build_system(const RunConfig& config) { return build_system(config, build_partition(config)); }

FractalSystem build_system(const RunConfig& config, const Partition& partition) {
    return FractalSystem(partition, config.depth_k, ScalingVector(config.alphas),
                         parse_field("g", config.g_source, config.n), parse_field("b", config.b_source, config.n));
}

ProbabilityVector build_probabilities(const RunConfig& config) {
    if (config.probabilities.empty()) return ProbabilityVector::uniform(static_cast<std::size_t>(config.pieces));
    if (config.probabilities.size() != static_cast<std::size_t>(config.pieces))
        throw ValidationError("probabilities", "expected " + std::to_string(config.pieces) + " weights, got " +
                                                   std::to_string(config.probabilities.size()));
    return ProbabilityVector(config.probabilities);
}

std::string config_json(const RunConfig& c, int indent) {
    json doc = json::object();
    doc["n"] = c.n;
    doc["partition"] = c.partition;
    doc["N"] = c.pieces;
    doc["depth_k"] = c.depth_k;
    doc["alphas"] = c.alphas;
    doc["g"] = c.g_source;
    doc["b"] = c.b_source;
    doc["lattice_depth"] = c.lattice_depth;
    doc["tolerance"] = c.tolerance;
    {
        const ProbabilityVector p = build_probabilities(c);
        const auto w = p.weights();
        doc["probabilities"] = std::vector<double>(w.begin(), w.end());
    }
    doc["seed"] = c.seed;
    doc["out"] = c.out;
    doc["max_iter"] = c.max_iter;
    doc["chaos_count"] = c.chaos_count;
    doc["burn_in"] = c.burn_in;
    doc["beta"] = c.beta;
    doc["k_max"] = c.k_max;
    doc["box_k_min"] = c.box_k_min;
    doc["box_k_max"] = c.box_k_max;
    doc["dim_lattice_depth"] = c.dim_lattice_depth;
    return doc.dump(indent);
}

}  // namespace hypersurf
