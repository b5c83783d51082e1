#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypersurf/fractal.hpp"
#include "hypersurf/geometry.hpp"
#include "hypersurf/kernels.hpp"

namespace hypersurf {

/// Base weights p_1..p_N (positive, summing to 1) and their depth-k word products.
class ProbabilityVector {
public:
    static constexpr double kSumTolerance = 1e-12;

    explicit ProbabilityVector(std::vector<double> weights);
    static ProbabilityVector uniform(std::size_t n);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }

    double word_probability(const Word& w) const;

    /// p_w for all N^k words in lexicographic order.
    std::vector<double> word_probabilities(int k) const;

private:
    std::vector<double> weights_;
};

enum class CloudMode { base, graph };

/// Chaos-game samples. Spatial coordinates are kept in extended precision so
/// graph points can be checked against the point evaluator without the
/// Hölder amplification of a double rounding; heights are doubles.
struct PointCloud {
    int spatial_dim = 2;
    CloudMode mode = CloudMode::base;
    std::uint64_t seed = 0;
    int burn_in = 0;
    std::vector<ExtVec> spatial;
    std::vector<double> heights;  // empty in base mode

    std::size_t size() const noexcept { return spatial.size(); }
    bool empty() const noexcept { return spatial.empty(); }
    /// Spatial part rounded to double.
    Point point(std::size_t i) const { return Point::from_ext(spatial[i], spatial_dim); }
};

struct ChaosOptions {
    int burn_in = 100;
    std::size_t stream_length = 16384;  // points per independent stream
};

/// Chaos game for the depth-k IFS {L_w} (base mode) or {(L_w, F_w)} (graph mode) with
///     F_w(x, y) = g(L_w x) - α_w b(x) + α_w y.
///
/// The output is split into consecutive streams of `stream_length` points.
/// Stream s uses the generator keyed by CounterRng(seed).derive_key(s), starts
/// at the domain barycenter (lifted to g(barycenter) in graph mode), and drops
/// its first `burn_in` iterates. Each step draws one uniform u and picks the
/// first word w (lexicographic) whose cumulative probability exceeds u.
/// Streams are concatenated in order, so the cloud is independent of the
/// worker count.
PointCloud chaos_game(const FractalSystem& system, const ProbabilityVector& p, std::size_t count,
                      std::uint64_t seed, CloudMode mode, const ChaosOptions& options = {},
                      Exec exec = Exec::parallel);

/// Axis-aligned half-open box [lo, hi) in the spatial coordinates.
struct BoxRegion {
    std::string name;
    int dim = 2;
    std::array<double, 2> lo{};
    std::array<double, 2> hi{};

    BoxRegion() = default;
    BoxRegion(std::string name, int dim, std::array<double, 2> lo, std::array<double, 2> hi);

    template <class Real>
    bool contains(const Vec2<Real>& p) const {
        for (int a = 0; a < dim; ++a) {
            const auto i = static_cast<std::size_t>(a);
            if (p[i] < Real(lo[i]) || !(p[i] < Real(hi[i]))) return false;
        }
        return true;
    }
};

/// Fraction of cloud points whose spatial part lies in the box. Throws InvalidArgument on an empty cloud.
double empirical_probability(const PointCloud& cloud, const BoxRegion& region);

/// Fraction of cloud points located (tie-broken) in the depth-|w| piece Δ_w.
double empirical_piece_probability(const PointCloud& cloud, const Partition& partition, const Word& word);

/// The fixed region suite for pushforward checks: the whole domain box, halves,
/// piece boxes and thinner strips.
std::vector<BoxRegion> standard_regions(const Partition& partition);

struct RegionEstimate {
    BoxRegion region;
    double base = 0.0;   // μ(E) from the base cloud
    double graph = 0.0;  // μ_α(S(E)) from the graph cloud
    double discrepancy = 0.0;
};

struct PushforwardReport {
    std::size_t count = 0;
    std::vector<RegionEstimate> regions;
    double max_discrepancy = 0.0;
};

/// Compares μ(E) with μ_α(S(E)) on each region. By default the graph cloud uses
/// the derived seed CounterRng(seed).derive_key(1) so the two estimates are
/// independent; with matched seeds both clouds follow the same word sequence
/// and share their spatial parts exactly.
PushforwardReport pushforward_check(const FractalSystem& system, const ProbabilityVector& p,
                                    const std::vector<BoxRegion>& regions, std::size_t count, std::uint64_t seed,
                                    bool matched_seeds = false, Exec exec = Exec::parallel);

}  // namespace hypersurf
