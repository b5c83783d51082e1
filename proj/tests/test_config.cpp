#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hypersurf/config.hpp"
#include "hypersurf/errors.hpp"
#include "hypersurf/pipeline.hpp"
#include "json.hpp"
#include "support.hpp"
#include "systems.hpp"

using namespace hypersurf;
namespace fs = std::filesystem;

namespace {

nlohmann::json example_doc() {
    return {{"n", 2},
            {"partition", "triangle"},
            {"depth_k", 1},
            {"alphas", {0.8, 0.8, 0.75, 0.75}},
            {"g", testsupport::kSeed},
            {"b", testsupport::kBase},
            {"lattice_depth", 6},
            {"tolerance", 1e-10},
            {"probabilities", {0.25, 0.25, 0.25, 0.25}},
            {"seed", 42},
            {"out", "./out"}};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hypersurf_test_" + name);
    fs::remove_all(dir);
    return dir;
}

RunConfig config_from(nlohmann::json doc, const fs::path& out) {
    doc["out"] = out.string();
    return parse_config(doc.dump());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Field named by the ValidationError raised for `doc`, or "" if it loads.
std::string failing_field(const nlohmann::json& doc) {
    try {
        parse_config(doc.dump());
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "";
}

std::string failure_message(const nlohmann::json& doc) {
    try {
        parse_config(doc.dump());
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("example config loads") {
    const RunConfig c = parse_config(example_doc().dump());
    CHECK(c.n == 2);
    CHECK(c.pieces == 4);
    CHECK(c.alphas == std::vector<double>{0.8, 0.8, 0.75, 0.75});
    CHECK(c.seed == 42);
    CHECK(c.dim_lattice_depth == 8);
    CHECK(build_system(c).contraction_factor() == 0.8);
}

TEST_CASE("semantic violations name the field") {
    auto doc = example_doc();
    doc["alphas"][0] = 1.0;
    CHECK(failing_field(doc) == "alphas");
    CHECK(failure_message(doc).find("scaling factor magnitude must be < 1") != std::string::npos);

    doc = example_doc();
    doc["b"] = "5 + x^3";
    CHECK(failing_field(doc) == "b");
    CHECK(failure_message(doc).find("vertex (0, 0.5)") != std::string::npos);

    doc = example_doc();
    doc["probabilities"] = {0.5, 0.5, 0.5, -0.5};
    CHECK(failing_field(doc) == "probabilities");
    doc["probabilities"] = {0.5, 0.5};
    CHECK(failing_field(doc) == "probabilities");
}

TEST_CASE("schema violations name the field") {
    auto doc = example_doc();
    doc.erase("seed");
    CHECK(failing_field(doc) == "seed");
    doc = example_doc();
    doc["lattice_depth"] = "six";
    CHECK(failing_field(doc) == "lattice_depth");
    doc = example_doc();
    doc["lattice_dept"] = 6;
    CHECK(failing_field(doc) == "lattice_dept");
    doc = example_doc();
    doc["partition"] = "square";
    CHECK(failing_field(doc) == "partition");
    doc = example_doc();
    doc["n"] = 1;
    CHECK(failing_field(doc) == "partition");
    doc = example_doc();
    doc["g"] = "sin(";
    CHECK(failing_field(doc) == "g");
    doc = example_doc();
    doc["tolerance"] = 0;
    CHECK(failing_field(doc) == "tolerance");
    doc = example_doc();
    doc["lattice_depth"] = 12;
    CHECK(failing_field(doc) == "lattice_depth");
    doc = example_doc();
    doc["box_k_min"] = 5;
    CHECK(failing_field(doc) == "box_k_max");
    CHECK_THROWS_AS(parse_config("{\"n\": 2,"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("interval configs") {
    nlohmann::json doc = {{"n", 1}, {"partition", "interval"}, {"N", 4}, {"depth_k", 1},
                          {"alphas", {0.6, -0.5, 0.5, -0.6}}, {"g", "sin(3*x) + x"},
                          {"b", "sin(3*x) + x + sin(4*pi*x)"}, {"lattice_depth", 8}, {"tolerance", 1e-10},
                          {"seed", 3}, {"out", "./o"}};
    const RunConfig c = parse_config(doc.dump());
    CHECK(c.pieces == 4);
    CHECK(build_partition(c).size() == 4);
    doc.erase("N");
    CHECK(failing_field(doc) == "N");
}

TEST_CASE("surface export") {
    const fs::path dir = scratch("surface");
    const RunConfig c = config_from(example_doc(), dir);
    std::ostringstream log;
    const SurfaceSummary s = run_surface(c, log);

    const auto rows = lines(slurp(dir / "surface.csv"));
    const std::size_t z6 = vertex_set(standard_triangle_partition(), 6).points.size();
    CHECK(z6 == 65 * 66 / 2);
    REQUIRE(rows.size() == z6 + 1);
    CHECK(s.rows == z6);
    CHECK(rows.front() == "x,y,f");
    CHECK(slurp(dir / "surface.csv").find('\r') == std::string::npos);

    // Rows are sorted lexicographically by (x, y) and carry round-trip digits.
    std::vector<Point> pts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double x = 0, y = 0, f = 0;
        REQUIRE(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &x, &y, &f) == 3);
        pts.emplace_back(x, y);
        if (x == 0.5 && y == 0.5) CHECK(std::abs(f - 5.375) <= 1e-9);
    }
    CHECK(std::is_sorted(pts.begin(), pts.end(), lex_less));

    const auto obj = lines(slurp(dir / "surface.obj"));
    std::size_t v = 0, f = 0;
    for (const std::string& l : obj) {
        v += l.rfind("v ", 0) == 0 ? 1 : 0;
        if (l.rfind("f ", 0) == 0) {
            ++f;
            int a = 0, b = 0, cc = 0;
            REQUIRE(std::sscanf(l.c_str(), "f %d %d %d", &a, &b, &cc) == 3);
            CHECK((a >= 1 && b >= 1 && cc >= 1));
            CHECK((static_cast<std::size_t>(std::max({a, b, cc})) <= z6));
        }
    }
    CHECK(v == z6);
    CHECK(f == 4096);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    for (const char* key : {"n", "partition", "N", "depth_k", "alphas", "g", "b", "lattice_depth", "tolerance",
                            "probabilities", "seed", "out", "max_iter", "chaos_count", "burn_in", "beta", "k_max",
                            "box_k_min", "box_k_max", "dim_lattice_depth"})
        CHECK_MESSAGE(manifest["config"].contains(key), std::string(key));
    CHECK(manifest["iterations"] == s.iterations);
    CHECK(manifest.contains("last_residual"));
    fs::remove_all(dir);
}

TEST_CASE("surface and chaos exports are deterministic") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    auto doc = example_doc();
    doc["chaos_count"] = 20000;
    std::ostringstream log;
    run_surface(config_from(doc, a), log, {Exec::serial, nullptr});
    run_surface(config_from(doc, b), log, {Exec::parallel, nullptr});
    run_chaos(config_from(doc, a), log, {Exec::serial, nullptr});
    run_chaos(config_from(doc, b), log, {Exec::parallel, nullptr});
    for (const std::string name : {"surface.csv", "surface.obj", "chaos_base.csv", "chaos_graph.csv"})
        CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
    // The manifests differ only in the output directory.
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    ma["config"].erase("out");
    mb["config"].erase("out");
    CHECK(ma == mb);
    CHECK(lines(slurp(a / "chaos_graph.csv")).size() == 20001);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("alpha zero surface equals g") {
    const fs::path dir = scratch("alpha0");
    auto doc = example_doc();
    doc["alphas"] = {0, 0, 0, 0};
    std::ostringstream log;
    run_surface(config_from(doc, dir), log);
    const Expression g = Expression::parse(testsupport::kSeed, 2);
    const auto rows = lines(slurp(dir / "surface.csv"));
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double x = 0, y = 0, f = 0;
        std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &x, &y, &f);
        worst = std::max(worst, std::abs(f - g.evaluate(x, y)));
    }
    CHECK(worst <= 1e-14);
    fs::remove_all(dir);
}

TEST_CASE("depth-2 config interpolates Z_2") {
    const fs::path dir = scratch("depth2");
    auto doc = example_doc();
    doc["depth_k"] = 2;
    doc["b"] = testsupport::kBaseDepth2;
    const RunConfig c = config_from(doc, dir);
    const FractalSystem sys = build_system(c);
    const auto wa = sys.word_alphas();
    CHECK(wa[0] == doctest::Approx(0.64));
    CHECK(wa[Word{3, 4}.lex_index(4)] == doctest::Approx(0.5625));
    CHECK(wa[Word{1, 4}.lex_index(4)] == doctest::Approx(0.6));
    std::ostringstream log;
    run_surface(c, log);
    const auto rows = lines(slurp(dir / "surface.csv"));
    const auto z2 = vertex_set(standard_triangle_partition(), 2).points;
    REQUIRE(z2.size() == 15);
    const Expression g = Expression::parse(testsupport::kSeed, 2);
    std::size_t matched = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double x = 0, y = 0, f = 0;
        std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &x, &y, &f);
        for (const Point& v : z2)
            if (v[0] == x && v[1] == y) {
                ++matched;
                CHECK(std::abs(f - g.evaluate(v)) <= 1e-9);
            }
    }
    CHECK(matched == 15);
    fs::remove_all(dir);
}

TEST_CASE("verify on the example passes and reports the bounds") {
    const fs::path dir = scratch("verify");
    std::ostringstream report;
    const int status = run_verify(config_from(example_doc(), dir), report);
    CHECK(status == 0);
    CHECK(report.str().find("graph dimension in [2, 2]") != std::string::npos);
    CHECK(report.str().find("[FAIL]") == std::string::npos);
    CHECK(slurp(dir / "verify.txt") == report.str());
    fs::remove_all(dir);
}

TEST_CASE("verify rejects a corrupted partition") {
    const fs::path dir = scratch("corrupt");
    const Partition std_part = standard_triangle_partition();
    std::vector<SimilarityMap> maps;
    for (const auto& m : std_part.maps()) maps.emplace_back(2, 0.6, m.orthogonal(), m.translation());
    std::ostringstream report;
    const int status = run_verify(config_from(example_doc(), dir), Partition(std_part.domain(), maps), report);
    CHECK(status != 0);
    CHECK(report.str().find("[FAIL] partition: A1 (cover)") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify on alpha zero has vanishing residuals") {
    const fs::path dir = scratch("verify0");
    auto doc = example_doc();
    doc["alphas"] = {0, 0, 0, 0};
    std::ostringstream report;
    CHECK(run_verify(config_from(doc, dir), report) == 0);
    CHECK(report.str().find("max |f - T f| = 0 ") != std::string::npos);
    CHECK(report.str().find("on Z_1 = 0 ") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify is independent of the execution policy") {
    const fs::path a = scratch("vs"), b = scratch("vp");
    std::ostringstream ra, rb;
    run_verify(config_from(example_doc(), a), ra, {Exec::serial, nullptr});
    run_verify(config_from(example_doc(), b), rb, {Exec::parallel, nullptr});
    CHECK(ra.str() == rb.str());
    fs::remove_all(a);
    fs::remove_all(b);
}

}  // TEST_SUITE
