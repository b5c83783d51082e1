#include "hypersurf/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypersurf/errors.hpp"
#include "hypersurf/format.hpp"

namespace hypersurf {

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ValidationError("probabilities", "at least one weight is required");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
            throw ValidationError("probabilities", "weights must be positive (p_" + std::to_string(i + 1) + " = " +
                                                       fmt6(weights_[i]) + ")");
        sum += weights_[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw ValidationError("probabilities", "weights must sum to 1 (sum = " + fmt17(sum) + ")");
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
    if (n == 0) throw InvalidArgument("uniform probability vector needs n >= 1");
    return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ProbabilityVector::word_probability(const Word& w) const {
    double p = 1.0;
    for (int letter : w.letters) {
        if (letter < 1 || static_cast<std::size_t>(letter) > weights_.size())
            throw InvalidArgument("word letter out of range");
        p *= weights_[static_cast<std::size_t>(letter - 1)];
    }
    return p;
}

std::vector<double> ProbabilityVector::word_probabilities(int k) const {
    std::vector<double> out{1.0};
    for (int level = 0; level < k; ++level) {
        std::vector<double> next;
        next.reserve(out.size() * weights_.size());
        for (double prefix : out)
            for (double w : weights_) next.push_back(prefix * w);
        out = std::move(next);
    }
    return out;
}

PointCloud chaos_game(const FractalSystem& system, const ProbabilityVector& p, std::size_t count,
                      std::uint64_t seed, CloudMode mode, const ChaosOptions& options, Exec exec) {
    const Partition& part = system.partition();
    if (p.size() != part.size()) throw InvalidArgument("probability vector size does not match the partition");
    if (options.burn_in < 0) throw InvalidArgument("burn_in must be non-negative");
    if (options.stream_length == 0) throw InvalidArgument("stream_length must be positive");

    const int dim = part.dim();
    PointCloud cloud;
    cloud.spatial_dim = dim;
    cloud.mode = mode;
    cloud.seed = seed;
    cloud.burn_in = options.burn_in;
    cloud.spatial.resize(count);
    if (mode == CloudMode::graph) cloud.heights.resize(count);
    if (count == 0) return cloud;

    const auto maps = system.word_maps();
    const auto alphas = system.word_alphas();
    std::vector<double> cumulative = p.word_probabilities(system.depth());
    std::partial_sum(cumulative.begin(), cumulative.end(), cumulative.begin());

    const Point start = part.domain().barycenter();
    const double start_height = system.g().evaluate(start);
    const CounterRng root(seed);
    const std::size_t streams = (count + options.stream_length - 1) / options.stream_length;
    const auto burn = static_cast<std::size_t>(options.burn_in);

    kernels::for_each(exec, streams, [&](std::size_t s) {
        CounterRng rng(root.derive_key(s));
        const std::size_t first = s * options.stream_length;
        const std::size_t last = std::min(count, first + options.stream_length);
        ExtVec x = start.ext();
        double y = start_height;
        for (std::size_t t = 0; t < burn + (last - first); ++t) {
            const double u = rng.next_uniform();
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            const auto w = std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
            const ExtVec next = maps[w].apply(x);
            if (mode == CloudMode::graph) {
                y = system.g().evaluate(Point::from_ext(next, dim)) -
                    alphas[w] * system.b().evaluate(Point::from_ext(x, dim)) + alphas[w] * y;
            }
            x = next;
            if (t >= burn) {
                const std::size_t slot = first + (t - burn);
                cloud.spatial[slot] = x;
                if (mode == CloudMode::graph) cloud.heights[slot] = y;
            }
        }
    });
    return cloud;
}

BoxRegion::BoxRegion(std::string name_, int dim_, std::array<double, 2> lo_, std::array<double, 2> hi_)
    : name(std::move(name_)), dim(dim_), lo(lo_), hi(hi_) {
    if (dim != 1 && dim != 2) throw InvalidArgument("box dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i]))
            throw InvalidArgument("box '" + name + "' must have finite extents with lo < hi");
    }
}

double empirical_probability(const PointCloud& cloud, const BoxRegion& region) {
    if (cloud.empty()) throw InvalidArgument("empirical probability of an empty cloud");
    if (region.dim != cloud.spatial_dim) throw InvalidArgument("region dimension does not match the cloud");
    std::size_t hits = 0;
    for (const ExtVec& x : cloud.spatial) hits += region.contains(x) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(cloud.size());
}

double empirical_piece_probability(const PointCloud& cloud, const Partition& partition, const Word& word) {
    if (cloud.empty()) throw InvalidArgument("empirical probability of an empty cloud");
    if (word.empty()) return 1.0;
    const std::size_t alphabet = partition.size();
    const std::size_t target = word.lex_index(alphabet);
    std::size_t hits = 0;
    for (const ExtVec& start : cloud.spatial) {
        ExtVec x = start;
        std::size_t w = 0;
        for (std::size_t step = 0; step < word.size(); ++step) {
            ExtVec pre{};
            const int letter = partition.locate_step(x, ExtReal(0), pre);
            w = w * alphabet + static_cast<std::size_t>(letter - 1);
            x = pre;
        }
        hits += w == target ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(cloud.size());
}

std::vector<BoxRegion> standard_regions(const Partition& partition) {
    const int dim = partition.dim();
    std::array<double, 2> lo{0, 0}, hi{0, 0};
    for (int a = 0; a < dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        lo[i] = hi[i] = partition.domain().vertices()[0][i];
        for (const Point& v : partition.domain().vertices()) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    auto frac = [&](std::size_t i, double t) { return lo[i] + t * (hi[i] - lo[i]); };
    auto piece_box = [&](int letter) {
        const SimilarityMap& m = partition.map(letter);
        std::array<double, 2> plo{0, 0}, phi{0, 0};
        bool first = true;
        for (const Point& v : partition.domain().vertices()) {
            const Point q = m.apply(v);
            for (std::size_t i = 0; i < static_cast<std::size_t>(dim); ++i) {
                plo[i] = first ? q[i] : std::min(plo[i], q[i]);
                phi[i] = first ? q[i] : std::max(phi[i], q[i]);
            }
            first = false;
        }
        return BoxRegion("piece_" + std::to_string(letter) + "_box", dim, plo, phi);
    };

    std::vector<BoxRegion> out;
    const double pad = 1e-9;
    out.emplace_back("domain_box", dim, std::array<double, 2>{lo[0] - pad, lo[1] - pad},
                     std::array<double, 2>{hi[0] + pad, hi[1] + pad});
    if (dim == 2) {
        out.emplace_back("left_half", 2, std::array<double, 2>{lo[0] - pad, lo[1] - pad},
                         std::array<double, 2>{frac(0, 0.5), hi[1] + pad});
        out.emplace_back("bottom_half", 2, std::array<double, 2>{lo[0] - pad, lo[1] - pad},
                         std::array<double, 2>{hi[0] + pad, frac(1, 0.5)});
        out.push_back(piece_box(2));
        out.push_back(piece_box(3));
        out.push_back(piece_box(1));
        out.emplace_back("inner_square", 2, std::array<double, 2>{frac(0, 0.25), frac(1, 0.25)},
                         std::array<double, 2>{frac(0, 0.5), frac(1, 0.5)});
        out.emplace_back("strip", 2, std::array<double, 2>{lo[0] - pad, frac(1, 0.1)},
                         std::array<double, 2>{hi[0] + pad, frac(1, 0.2)});
    } else {
        out.emplace_back("left_half", 1, std::array<double, 2>{lo[0] - pad, 0}, std::array<double, 2>{frac(0, 0.5), 0});
        for (int letter = 1; letter <= std::min<int>(3, static_cast<int>(partition.size())); ++letter)
            out.push_back(piece_box(letter));
        out.emplace_back("quarter", 1, std::array<double, 2>{frac(0, 0.25), 0}, std::array<double, 2>{frac(0, 0.5), 0});
        out.emplace_back("narrow", 1, std::array<double, 2>{frac(0, 0.1), 0}, std::array<double, 2>{frac(0, 0.2), 0});
        out.emplace_back("wide", 1, std::array<double, 2>{frac(0, 0.3), 0}, std::array<double, 2>{frac(0, 0.9), 0});
    }
    return out;
}

PushforwardReport pushforward_check(const FractalSystem& system, const ProbabilityVector& p,
                                    const std::vector<BoxRegion>& regions, std::size_t count, std::uint64_t seed,
                                    bool matched_seeds, Exec exec) {
    if (count < 1000) throw InvalidArgument("pushforward check needs at least 1000 points");
    const PointCloud base = chaos_game(system, p, count, seed, CloudMode::base, {}, exec);
    const std::uint64_t graph_seed = matched_seeds ? seed : CounterRng(seed).derive_key(1);
    const PointCloud graph = chaos_game(system, p, count, graph_seed, CloudMode::graph, {}, exec);
    PushforwardReport report;
    report.count = count;
    for (const BoxRegion& region : regions) {
        RegionEstimate e{region, empirical_probability(base, region), empirical_probability(graph, region), 0.0};
        e.discrepancy = std::abs(e.base - e.graph);
        report.max_discrepancy = std::max(report.max_discrepancy, e.discrepancy);
        report.regions.push_back(std::move(e));
    }
    return report;
}

}  // namespace hypersurf
