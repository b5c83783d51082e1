#include "hypersurf/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hypersurf/errors.hpp"
#include "hypersurf/format.hpp"
#include "json.hpp"

namespace hypersurf {

namespace {

using nlohmann::json;

// Hard-check limits used by verify.
constexpr double kContractionSlack = 1e-12;
constexpr double kInterpolationLimit = 1e-9;
constexpr double kSelfResidualLimit = 1e-8;
constexpr std::size_t kSelfResidualSamples = 10000;
constexpr double kInvarianceLimit = 0.02;
constexpr double kPushforwardLimit = 0.02;
constexpr std::size_t kGraphSamples = 10000;
constexpr double kGraphEvalTol = 1e-8;
constexpr double kGraphLimit = 1e-6;
constexpr int kContractionPairs = 50;
constexpr std::size_t kPartitionSamples = 20000;
constexpr int kJoinupSamples = 16;
constexpr int kSandwichKMin = 2;
constexpr int kSandwichKMax = 5;

// Stream keys derived from the config seed, one per independent random use.
enum class Stream : std::uint64_t { partition = 11, contraction, residual, chaos_base, graph, measure };

std::uint64_t stream_seed(const RunConfig& c, Stream s) {
    return CounterRng(c.seed).derive_key(static_cast<std::uint64_t>(s));
}

void note(const RunOptions& o, const std::string& msg) {
    if (o.verbose) *o.verbose << msg << '\n';
}

std::filesystem::path output_dir(const RunConfig& c) {
    std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

FixedPointResult solve(const FractalSystem& system, const RunConfig& c, int depth, const RunOptions& o) {
    FixedPointResult r = fixed_point(system, depth, c.tolerance, c.max_iter, o.exec);
    note(o, "fixed point at lattice depth " + std::to_string(depth) + ": " + std::to_string(r.iterations) +
                " iterations, last residual " + fmt6(r.residuals.empty() ? 0.0 : r.residuals.back()));
    return r;
}

std::vector<std::array<double, 3>> sorted_rows(const PointCloud& cloud) {
    std::vector<std::array<double, 3>> rows(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point p = cloud.point(i);
        rows[i] = {p[0], cloud.spatial_dim == 2 ? p[1] : 0.0, cloud.heights.empty() ? 0.0 : cloud.heights[i]};
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
    auto out = open_output(path);
    const bool two = cloud.spatial_dim == 2;
    const bool graph = !cloud.heights.empty();
    out << (two ? "x,y" : "x") << (graph ? ",z" : "") << '\n';
    for (const auto& r : sorted_rows(cloud)) {
        out << fmt17(r[0]);
        if (two) out << ',' << fmt17(r[1]);
        if (graph) out << ',' << fmt17(r[2]);
        out << '\n';
    }
    finish_output(out, path);
}

std::string word_pair(const std::pair<Word, Word>& w) { return w.first.to_string() + "|" + w.second.to_string(); }

std::string verdict(bool ok) { return ok ? "[PASS] " : "[FAIL] "; }

}  // namespace

void write_surface_csv(const GridFunction& f, std::ostream& out) {
    const Lattice& lat = f.lattice();
    const bool two = lat.dim() == 2;
    out << (two ? "x,y,f" : "x,f") << '\n';
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const Point& p = lat.point(i);
        out << fmt17(p[0]) << ',';
        if (two) out << fmt17(p[1]) << ',';
        out << fmt17(f[i]) << '\n';
    }
}

void write_surface_obj(const GridFunction& f, std::ostream& out) {
    const Lattice& lat = f.lattice();
    const bool two = lat.dim() == 2;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const Point& p = lat.point(i);
        out << "v " << fmt17(p[0]) << ' ' << fmt17(two ? p[1] : 0.0) << ' ' << fmt17(f[i]) << '\n';
    }
    for (const auto& cell : lat.cells()) {
        if (two)
            out << "f " << cell[0] + 1 << ' ' << cell[1] + 1 << ' ' << cell[2] + 1 << '\n';
        else
            out << "l " << cell[0] + 1 << ' ' << cell[1] + 1 << '\n';
    }
}

SurfaceSummary run_surface(const RunConfig& config, std::ostream& out, const RunOptions& options) {
    const FractalSystem system = build_system(config);
    const FixedPointResult r = solve(system, config, config.lattice_depth, options);
    SurfaceSummary s;
    s.dir = output_dir(config);
    s.rows = r.f.size();
    s.iterations = r.iterations;
    s.last_residual = r.residuals.empty() ? 0.0 : r.residuals.back();
    s.error_bound = r.error_bound;

    const auto csv_path = s.dir / "surface.csv";
    auto csv = open_output(csv_path);
    write_surface_csv(r.f, csv);
    finish_output(csv, csv_path);

    const auto obj_path = s.dir / "surface.obj";
    auto obj = open_output(obj_path);
    write_surface_obj(r.f, obj);
    finish_output(obj, obj_path);

    json manifest;
    manifest["config"] = json::parse(config_json(config));
    manifest["lattice_points"] = r.f.size();
    manifest["lattice_cells"] = r.f.lattice().cells().size();
    manifest["iterations"] = r.iterations;
    manifest["residuals"] = r.residuals;
    manifest["last_residual"] = s.last_residual;
    manifest["contraction"] = r.contraction;
    manifest["error_bound"] = r.error_bound;
    manifest["files"] = {"surface.csv", "surface.obj"};
    const auto man_path = s.dir / "manifest.json";
    auto man = open_output(man_path);
    man << manifest.dump(2) << '\n';
    finish_output(man, man_path);

    out << "surface: " << s.rows << " lattice points, " << s.iterations << " iterations, last residual "
        << fmt6(s.last_residual) << ", error bound " << fmt6(s.error_bound) << "\n";
    out << "wrote " << csv_path.string() << ", " << obj_path.string() << ", " << man_path.string() << "\n";
    return s;
}

void run_chaos(const RunConfig& config, std::ostream& out, const RunOptions& options) {
    const FractalSystem system = build_system(config);
    const ProbabilityVector p = build_probabilities(config);
    ChaosOptions opt;
    opt.burn_in = config.burn_in;
    const std::filesystem::path dir = output_dir(config);
    const PointCloud base =
        chaos_game(system, p, config.chaos_count, stream_seed(config, Stream::chaos_base), CloudMode::base, opt,
                   options.exec);
    const PointCloud graph =
        chaos_game(system, p, config.chaos_count, stream_seed(config, Stream::graph), CloudMode::graph, opt,
                   options.exec);
    note(options, "chaos game: " + std::to_string(config.chaos_count) + " points per cloud");
    write_cloud_csv(base, dir / "chaos_base.csv");
    write_cloud_csv(graph, dir / "chaos_graph.csv");
    out << "chaos: " << config.chaos_count << " base and " << config.chaos_count << " graph points (burn-in "
        << config.burn_in << ")\n";
    out << "wrote " << (dir / "chaos_base.csv").string() << ", " << (dir / "chaos_graph.csv").string() << "\n";
}

void run_dim(const RunConfig& config, std::ostream& out, const RunOptions& options) {
    const FractalSystem system = build_system(config);
    const FixedPointResult r = solve(system, config, config.dim_lattice_depth, options);
    const std::filesystem::path dir = output_dir(config);

    const DimensionEstimate est = box_dimension(r.f, config.box_k_min, config.box_k_max, options.exec);
    const auto rows = column_sandwich(r.f, config.box_k_min, config.box_k_max, options.exec);
    {
        const auto path = dir / "boxcount.csv";
        auto csv = open_output(path);
        csv << "k,delta,count,lower,upper\n";
        for (const SandwichRow& row : rows)
            csv << row.k << ',' << fmt17(row.delta) << ',' << row.count << ',' << fmt17(row.lower) << ','
                << fmt17(row.upper) << '\n';
        finish_output(csv, path);
    }
    const OscillationProfile prof = beta_ratio_profile(r.f, config.beta, config.k_max, options.exec);
    {
        const auto path = dir / "oscillation.csv";
        auto csv = open_output(path);
        csv << "k,total,ratio\n";
        for (std::size_t k = 0; k < prof.totals.size(); ++k)
            csv << k << ',' << fmt17(prof.totals[k]) << ',' << (k == 0 ? "" : fmt17(prof.ratios[k - 1])) << '\n';
        finish_output(csv, path);
    }

    out << "box counts (lattice depth " << config.dim_lattice_depth << ")\n";
    out << "   k         delta        count        upper\n";
    for (const SandwichRow& row : rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%4d  %12.6g %12zu %12.0f\n", row.k, row.delta, row.count, row.upper);
        out << line;
    }
    out << "slope " << fmt6(est.slope) << " (r^2 " << fmt6(est.r_squared) << ")\n";
    out << "oscillation profile beta = " << fmt6(config.beta) << "\n";
    out << "   k         total        ratio\n";
    for (std::size_t k = 0; k < prof.totals.size(); ++k) {
        char line[128];
        if (k == 0)
            std::snprintf(line, sizeof line, "%4zu  %12.6g\n", k, prof.totals[k]);
        else
            std::snprintf(line, sizeof line, "%4zu  %12.6g %12.6g\n", k, prof.totals[k], prof.ratios[k - 1]);
        out << line;
    }
    out << "max ratio " << fmt6(prof.max_ratio) << ", profile " << (prof.bounded ? "bounded" : "growing")
        << ", beta norm " << fmt6(prof.beta_norm) << "\n";
    const BoundReport b = theorem_bounds(system.alpha(), static_cast<int>(system.partition().size()), config.depth_k,
                                         config.beta);
    out << "theorem condition " << fmt6(b.condition_value) << (b.condition_holds ? " < 1" : " >= 1");
    if (b.condition_holds)
        out << ": graph dimension in [" << fmt6(*b.lower) << ", " << fmt6(*b.upper) << "], measure dimension <= "
            << fmt6(*b.measure_upper);
    out << "\n";
}

void run_measure(const RunConfig& config, std::ostream& out, const RunOptions& options) {
    const FractalSystem system = build_system(config);
    const ProbabilityVector p = build_probabilities(config);
    const std::filesystem::path dir = output_dir(config);
    const auto regions = standard_regions(system.partition());
    const PushforwardReport rep =
        pushforward_check(system, p, regions, config.chaos_count, stream_seed(config, Stream::measure), false,
                          options.exec);
    {
        const auto path = dir / "measure.csv";
        auto csv = open_output(path);
        csv << "region,lo_x,lo_y,hi_x,hi_y,base,graph,discrepancy\n";
        for (const RegionEstimate& e : rep.regions)
            csv << e.region.name << ',' << fmt17(e.region.lo[0]) << ',' << fmt17(e.region.lo[1]) << ','
                << fmt17(e.region.hi[0]) << ',' << fmt17(e.region.hi[1]) << ',' << fmt17(e.base) << ','
                << fmt17(e.graph) << ',' << fmt17(e.discrepancy) << '\n';
        finish_output(csv, path);
    }
    ChaosOptions opt;
    opt.burn_in = config.burn_in;
    const PointCloud base = chaos_game(system, p, config.chaos_count, stream_seed(config, Stream::chaos_base),
                                       CloudMode::base, opt, options.exec);
    {
        const auto path = dir / "pieces.csv";
        auto csv = open_output(path);
        csv << "word,p,empirical\n";
        for (int i = 1; i <= static_cast<int>(p.size()); ++i) {
            const Word w{i};
            csv << w.to_string() << ',' << fmt17(p[static_cast<std::size_t>(i - 1)]) << ','
                << fmt17(empirical_piece_probability(base, system.partition(), w)) << '\n';
        }
        finish_output(csv, path);
    }
    out << "measure: " << config.chaos_count << " points per cloud\n";
    for (const RegionEstimate& e : rep.regions)
        out << "  " << e.region.name << ": base " << fmt6(e.base) << ", graph " << fmt6(e.graph) << ", |diff| "
            << fmt6(e.discrepancy) << "\n";
    out << "max discrepancy " << fmt6(rep.max_discrepancy) << "\n";
}

int run_verify(const RunConfig& config, std::ostream& out, const RunOptions& options) {
    return run_verify(config, build_partition(config), out, options);
}

int run_verify(const RunConfig& config, const Partition& partition, std::ostream& out, const RunOptions& options) {
    std::ostringstream rep;
    int failures = 0;
    int hard = 0;
    auto check = [&](bool ok, const std::string& line) {
        ++hard;
        failures += ok ? 0 : 1;
        rep << verdict(ok) << line << '\n';
    };

    rep << "verify: n=" << config.n << " partition=" << config.partition << " N=" << partition.size()
        << " depth_k=" << config.depth_k << " lattice_depth=" << config.lattice_depth << " seed=" << config.seed
        << "\n";

    const PartitionReport pr = check_partition(partition, kPartitionSamples, stream_seed(config, Stream::partition));
    if (!pr.ok()) {
        for (const std::string& f : pr.failures) check(false, "partition: " + f);
        rep << "[SKIP] remaining checks need a valid partition\n";
    } else {
        check(true, "partition: cover, similarity and disjoint interiors (" + std::to_string(kPartitionSamples) +
                        " samples)");
        note(options, "partition ok");

        const FractalSystem system = build_system(config, partition);
        const ProbabilityVector p = build_probabilities(config);
        const double q = system.contraction_factor();
        const RbOperator op(system, make_lattice(partition, config.lattice_depth), options.exec);

        // Contraction on random grid pairs.
        double worst_ratio = 0.0;
        bool contraction_ok = true;
        const CounterRng pair_root(stream_seed(config, Stream::contraction));
        for (int t = 0; t < kContractionPairs; ++t) {
            CounterRng rng(pair_root.derive_key(static_cast<std::uint64_t>(t)));
            std::vector<double> a(op.lattice()->size()), b(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                a[i] = 20.0 * rng.next_uniform() - 10.0;
                b[i] = 20.0 * rng.next_uniform() - 10.0;
            }
            const GridFunction fa(op.lattice(), std::move(a)), fb(op.lattice(), std::move(b));
            const double before = sup_distance(fa, fb);
            const double after = sup_distance(op.apply(fa, options.exec), op.apply(fb, options.exec));
            contraction_ok = contraction_ok && after <= q * before + kContractionSlack;
            if (before > 0.0) worst_ratio = std::max(worst_ratio, after / before);
        }
        check(contraction_ok, "contraction: max ratio " + fmt6(worst_ratio) + " <= alpha_inf^k = " + fmt6(q) +
                                  " over " + std::to_string(kContractionPairs) + " random pairs");

        // Fixed point, geometric residual decay, interpolation and self-reference.
        std::optional<FixedPointResult> fp;
        try {
            fp = fixed_point(op, config.tolerance, config.max_iter, options.exec);
        } catch (const ConvergenceFailure& e) {
            check(false, std::string("convergence: ") + e.what());
        }
        if (fp) {
            bool geometric = true;
            for (std::size_t j = 1; j < fp->residuals.size(); ++j)
                geometric = geometric && fp->residuals[j] <= q * fp->residuals[j - 1] + kContractionSlack;
            check(geometric, "convergence: " + std::to_string(fp->iterations) + " iterations, last residual " +
                                 fmt6(fp->residuals.empty() ? 0.0 : fp->residuals.back()) +
                                 ", geometric decay with ratio <= " + fmt6(q));

            double interp = 0.0;
            const auto zk = vertex_set(partition, config.depth_k).points;
            for (const Point& v : zk) interp = std::max(interp, std::abs(fp->f.at(v) - system.g().evaluate(v)));
            check(interp <= kInterpolationLimit, "interpolation: max |f - g| on Z_" + std::to_string(config.depth_k) +
                                                     " = " + fmt6(interp) + " over " + std::to_string(zk.size()) +
                                                     " vertices");

            const double self = self_residual(op, fp->f, kSelfResidualSamples, stream_seed(config, Stream::residual));
            check(self <= kSelfResidualLimit, "self-reference: max |f - T f| = " + fmt6(self) + " over " +
                                                  std::to_string(kSelfResidualSamples) + " lattice points");

            const JoinupReport j = joinup_check(system, fp->f, kJoinupSamples);
            rep << "[INFO] join-up: " << j.faces << " shared faces, max mismatch " << fmt6(j.max_mismatch);
            if (j.max_mismatch > 0.0) rep << " on " << word_pair(j.worst_face);
            rep << ", max jump of f " << fmt6(j.max_jump);
            if (j.max_jump > 0.0) rep << " on " << word_pair(j.worst_jump_face);
            rep << "\n";
        }
        note(options, "fixed point checks done");

        // Invariant measure and its pushforward onto the graph.
        ChaosOptions opt;
        opt.burn_in = config.burn_in;
        const PointCloud base = chaos_game(system, p, config.chaos_count, stream_seed(config, Stream::chaos_base),
                                           CloudMode::base, opt, options.exec);
        double inv = 0.0;
        for (int i = 1; i <= static_cast<int>(p.size()); ++i)
            inv = std::max(inv, std::abs(empirical_piece_probability(base, partition, Word{i}) -
                                         p[static_cast<std::size_t>(i - 1)]));
        check(inv <= kInvarianceLimit, "invariance: max |mu(piece_i) - p_i| = " + fmt6(inv) + " over " +
                                           std::to_string(config.chaos_count) + " points");

        const auto regions = standard_regions(partition);
        const PushforwardReport push = pushforward_check(system, p, regions, config.chaos_count,
                                                         stream_seed(config, Stream::measure), false, options.exec);
        check(push.max_discrepancy <= kPushforwardLimit,
              "pushforward: max discrepancy " + fmt6(push.max_discrepancy) + " over " +
                  std::to_string(regions.size()) + " regions");

        const PointCloud graph = chaos_game(system, p, kGraphSamples, stream_seed(config, Stream::graph),
                                            CloudMode::graph, opt, options.exec);
        const PointEvaluator eval(system, kGraphEvalTol);
        std::vector<double> gaps(graph.size());
        kernels::for_each(options.exec, graph.size(),
                          [&](std::size_t i) { gaps[i] = std::abs(graph.heights[i] - eval.evaluate(graph.spatial[i])); });
        const double worst_gap = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
        const auto on_graph = std::count_if(gaps.begin(), gaps.end(), [](double g) { return g <= kGraphLimit; });
        check(static_cast<std::size_t>(on_graph) == graph.size(),
              "graph attractor: " + std::to_string(on_graph) + "/" + std::to_string(graph.size()) +
                  " points within " + fmt6(kGraphLimit) + " of f (max gap " + fmt6(worst_gap) + ")");
        note(options, "measure checks done");

        // Dimension: column sandwich, oscillation profile, slope and closed-form bounds.
        const FixedPointResult dim = fixed_point(system, config.dim_lattice_depth, config.tolerance, config.max_iter,
                                                 options.exec);
        const int s_max = std::min(kSandwichKMax, config.dim_lattice_depth);
        if (s_max >= kSandwichKMin) {
            bool upper_ok = true;
            std::string counts;
            for (const SandwichRow& row : column_sandwich(dim.f, kSandwichKMin, s_max, options.exec)) {
                upper_ok = upper_ok && row.upper_holds;
                counts += (counts.empty() ? "" : " ") + std::to_string(row.count) + "<=" + fmt6(row.upper);
            }
            check(upper_ok, "sandwich: N_delta <= sum(2 + ceil(R_w / delta)) for k = " +
                                std::to_string(kSandwichKMin) + ".." + std::to_string(s_max) + " (" + counts + ")");
        }
        const OscillationProfile prof = beta_ratio_profile(dim.f, config.beta, config.k_max, options.exec);
        rep << "[INFO] oscillation profile beta=" << fmt6(config.beta) << ": ratios";
        for (double r : prof.ratios) rep << ' ' << fmt6(r);
        rep << ", max " << fmt6(prof.max_ratio) << ", " << (prof.bounded ? "bounded" : "growing") << "\n";

        const DimensionEstimate est = box_dimension(dim.f, config.box_k_min, config.box_k_max, options.exec);
        rep << "[INFO] box-count slope k=" << config.box_k_min << ".." << config.box_k_max << " (lattice depth "
            << config.dim_lattice_depth << "): " << fmt6(est.slope) << " (r^2 " << fmt6(est.r_squared) << ")\n";

        if (config.n == 2) {
            const BoundReport b = theorem_bounds(system.alpha(), static_cast<int>(partition.size()), config.depth_k,
                                                 config.beta);
            rep << "[INFO] dimension bounds beta=" << fmt6(config.beta) << ": condition " << fmt6(b.condition_value);
            if (b.condition_holds)
                rep << " < 1, graph dimension in [" << fmt6(*b.lower) << ", " << fmt6(*b.upper)
                    << "], measure dimension <= " << fmt6(*b.measure_upper) << "\n";
            else
                rep << " >= 1, no bounds\n";
        } else {
            rep << "[INFO] dimension bounds: stated for surfaces only (n = 2)\n";
        }
    }

    rep << "result: " << (failures == 0 ? "PASS" : "FAIL") << " (" << (hard - failures) << "/" << hard
        << " hard checks passed)\n";

    const std::string text = rep.str();
    out << text;
    const auto dir = output_dir(config);
    const auto path = dir / "verify.txt";
    auto file = open_output(path);
    file << text;
    finish_output(file, path);
    return failures == 0 ? 0 : 1;
}

}  // namespace hypersurf
