#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hypersurf/fractal.hpp"
#include "hypersurf/geometry.hpp"
#include "hypersurf/kernels.hpp"
#include "hypersurf/lattice.hpp"
#include "hypersurf/measure.hpp"

namespace hypersurf {

using PointFunction = std::function<double(const Point&)>;

/// max - min of f over the closed piece Δ_w, sampled at the images under L_w of
/// a barycentric grid with `samples_per_axis` points per edge. A lower bound of
/// the true oscillation; exact for affine f.
double max_range(const PointFunction& f, const Partition& partition, const Word& word, int samples_per_axis);

/// max - min of grid values at the lattice points of the closed piece Δ_w.
double max_range(const GridFunction& f, const Word& word);

/// Per-word ranges over all N^k depth-k pieces, in lexicographic word order.
std::vector<double> piece_ranges(const GridFunction& f, int k, Exec exec = Exec::parallel);
std::vector<double> piece_ranges(const PointFunction& f, const Partition& partition, int k, int samples_per_axis,
                                 Exec exec = Exec::parallel);

/// ℛ(k, f): the sum of piece ranges over all depth-k words (closed pieces, shared faces in each).
double total_oscillation(const GridFunction& f, int k, Exec exec = Exec::parallel);
double total_oscillation(const PointFunction& f, const Partition& partition, int k, int samples_per_axis,
                         Exec exec = Exec::parallel);

struct OscillationProfile {
    double beta = 1.0;
    std::size_t alphabet = 0;
    std::vector<double> totals;  // ℛ(k) for k = 0..k_max; totals[0] is the global oscillation
    std::vector<double> ratios;  // ℛ(k) / N^{k(2-β)} for k = 1..k_max
    double max_ratio = 0.0;
    bool bounded = true;         // last ratio within 5% of the largest earlier one
    double sup_norm = 0.0;
    double beta_norm = 0.0;      // sup_norm + max_ratio
};

OscillationProfile beta_ratio_profile(const GridFunction& f, double beta, int k_max, Exec exec = Exec::parallel);
OscillationProfile beta_ratio_profile(const PointFunction& f, const Partition& partition, double beta, int k_max,
                                      int samples_per_axis, Exec exec = Exec::parallel);

/// Number of distinct half-open cubes [iδ, (i+1)δ) x ... containing at least one
/// sample. `coords` holds rows of `stride` coordinates (stride 1..3).
std::size_t box_count(std::span<const double> coords, std::size_t stride, double delta, Exec exec = Exec::parallel);

/// Cube count of a graph-mode cloud in (x, [y,] height) space.
std::size_t box_count(const PointCloud& cloud, double delta, Exec exec = Exec::parallel);

/// Cube count of the piecewise-linear surface through the grid values over the
/// depth-m cells. Each cell's footprint square and vertical cubes are those meeting
/// its open interior and open value range; vertical runs are merged per column.
/// Requires delta >= c^m so every cell fits inside one footprint square.
std::size_t box_count_surface(const GridFunction& f, double delta, Exec exec = Exec::parallel);

struct DimensionEstimate {
    std::vector<double> scales;
    std::vector<double> counts;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of log N_δ against log(1/δ). Needs >= 3 strictly decreasing scales and positive counts.
DimensionEstimate estimate_slope(std::span<const double> scales, std::span<const double> counts);

/// Surface box counts at δ = c^k for k = k_min..k_max and their slope.
DimensionEstimate box_dimension(const GridFunction& f, int k_min, int k_max, Exec exec = Exec::parallel);

struct BoundReport {
    double beta = 0.0;
    double condition_value = 0.0;  // max{α_∞^k, α_∞^k / N^{k(1-β)}}
    bool condition_holds = false;
    std::optional<double> lower;   // dimension bounds of the graph, present when the condition holds
    std::optional<double> upper;
    std::optional<double> measure_upper;  // upper bound on the dimension of μ_α
};

BoundReport theorem_bounds(const ScalingVector& alpha, int n_pieces, int k, double beta);

/// Column comparison at δ = c^k between the surface box count and piece ranges:
///     lower = N^k floor(min_w R_w / δ),  upper = Σ_w (2 + ceil(R_w / δ)).
struct SandwichRow {
    int k = 0;
    double delta = 0.0;
    std::size_t count = 0;
    double lower = 0.0;
    double upper = 0.0;
    bool upper_holds = false;
};

std::vector<SandwichRow> column_sandwich(const GridFunction& f, int k_min, int k_max, Exec exec = Exec::parallel);

}  // namespace hypersurf
