#include "hypersurf/dimension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <tuple>

#include "hypersurf/errors.hpp"

namespace hypersurf {

namespace {

std::vector<Point> reference_samples(const Simplex& domain, int per_edge) {
    if (per_edge < 2) throw InvalidArgument("samples_per_axis must be >= 2");
    const auto& v = domain.vertices();
    const double step = 1.0 / (per_edge - 1);
    std::vector<Point> out;
    if (domain.dim() == 1) {
        for (int i = 0; i < per_edge; ++i) out.emplace_back(v[0][0] + i * step * (v[1][0] - v[0][0]));
        return out;
    }
    for (int i = 0; i < per_edge; ++i) {
        for (int j = 0; i + j < per_edge; ++j) {
            const double a = i * step;
            const double b = j * step;
            out.emplace_back(v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
                             v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1]));
        }
    }
    return out;
}

double range_over(const PointFunction& f, const SimilarityMap& m, std::span<const Point> reference) {
    double lo = f(m.apply(reference[0]));
    double hi = lo;
    for (std::size_t i = 1; i < reference.size(); ++i) {
        const double v = f(m.apply(reference[i]));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

double ordered_sum(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

OscillationProfile finish_profile(std::vector<double> totals, std::size_t alphabet, double beta, double sup_norm) {
    OscillationProfile out;
    out.beta = beta;
    out.alphabet = alphabet;
    out.totals = std::move(totals);
    out.sup_norm = sup_norm;
    const double n = static_cast<double>(alphabet);
    for (std::size_t k = 1; k < out.totals.size(); ++k) {
        out.ratios.push_back(out.totals[k] / std::pow(n, static_cast<double>(k) * (2.0 - beta)));
        out.max_ratio = std::max(out.max_ratio, out.ratios.back());
    }
    if (out.ratios.size() >= 2) {
        const double earlier = *std::max_element(out.ratios.begin(), out.ratios.end() - 1);
        out.bounded = out.ratios.back() <= 1.05 * earlier;
    }
    out.beta_norm = out.sup_norm + out.max_ratio;
    return out;
}

void check_profile_args(double beta, int k_max) {
    if (!(beta >= 0.0 && beta <= 2.0)) throw InvalidArgument("beta must lie in [0, 2]");
    if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
}

using Key = std::array<std::int64_t, 3>;

std::int64_t cell_index(double v, double delta) { return static_cast<std::int64_t>(std::floor(v / delta)); }

// Cubes meeting the open interval (lo, hi), or the one containing lo when the interval is a point.
std::pair<std::int64_t, std::int64_t> open_span(double lo, double hi, double delta) {
    const std::int64_t first = cell_index(lo, delta);
    const auto last = static_cast<std::int64_t>(std::ceil(hi / delta)) - 1;
    return {first, std::max(first, last)};
}

}  // namespace

double max_range(const PointFunction& f, const Partition& partition, const Word& word, int samples_per_axis) {
    const auto reference = reference_samples(partition.domain(), samples_per_axis);
    return range_over(f, compose_word(partition, word), reference);
}

double max_range(const GridFunction& f, const Word& word) {
    const Lattice& lat = f.lattice();
    const int k = static_cast<int>(word.size());
    if (k > lat.depth()) throw InvalidArgument("word is deeper than the lattice");
    const SimilarityMap m = compose_word(lat.partition(), word);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Point& q : vertex_set(lat.partition(), lat.depth() - k).points) {
        const auto idx = lat.index_of(m.apply(q));
        if (!idx) throw InvalidArgument("piece point is not a lattice point");
        const double v = f[*idx];
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
    }
    return hi - lo;
}

std::vector<double> piece_ranges(const GridFunction& f, int k, Exec exec) {
    const auto members = f.lattice().piece_members(k);
    std::vector<double> out(members.offsets.size() - 1);
    kernels::piece_ranges(exec, f.values(), members.offsets, members.members, out);
    return out;
}

std::vector<double> piece_ranges(const PointFunction& f, const Partition& partition, int k, int samples_per_axis,
                                 Exec exec) {
    if (k < 0) throw InvalidArgument("k must be non-negative");
    const auto reference = reference_samples(partition.domain(), samples_per_axis);
    const auto maps = word_maps(partition, k);
    std::vector<double> out(maps.size());
    kernels::for_each(exec, maps.size(), [&](std::size_t w) { out[w] = range_over(f, maps[w], reference); });
    return out;
}

double total_oscillation(const GridFunction& f, int k, Exec exec) { return ordered_sum(piece_ranges(f, k, exec)); }

double total_oscillation(const PointFunction& f, const Partition& partition, int k, int samples_per_axis, Exec exec) {
    return ordered_sum(piece_ranges(f, partition, k, samples_per_axis, exec));
}

OscillationProfile beta_ratio_profile(const GridFunction& f, double beta, int k_max, Exec exec) {
    check_profile_args(beta, k_max);
    if (k_max > f.lattice().depth()) throw InvalidArgument("k_max exceeds the lattice depth");
    std::vector<double> totals;
    for (int k = 0; k <= k_max; ++k) totals.push_back(total_oscillation(f, k, exec));
    return finish_profile(std::move(totals), f.lattice().partition().size(), beta, f.sup_norm());
}

OscillationProfile beta_ratio_profile(const PointFunction& f, const Partition& partition, double beta, int k_max,
                                      int samples_per_axis, Exec exec) {
    check_profile_args(beta, k_max);
    std::vector<double> totals;
    for (int k = 0; k <= k_max; ++k) totals.push_back(total_oscillation(f, partition, k, samples_per_axis, exec));
    double sup = 0.0;
    for (const Point& p : reference_samples(partition.domain(), samples_per_axis)) sup = std::max(sup, std::abs(f(p)));
    return finish_profile(std::move(totals), partition.size(), beta, sup);
}

std::size_t box_count(std::span<const double> coords, std::size_t stride, double delta, Exec exec) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    if (stride < 1 || stride > 3) throw InvalidArgument("stride must be 1, 2 or 3");
    if (coords.size() % stride != 0) throw InvalidArgument("coordinate count is not a multiple of the stride");
    const std::size_t n = coords.size() / stride;
    std::vector<Key> keys(n);
    constexpr std::size_t kChunk = 4096;
    kernels::for_each(exec, (n + kChunk - 1) / kChunk, [&](std::size_t c) {
        for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
            Key key{0, 0, 0};
            for (std::size_t a = 0; a < stride; ++a) key[a] = cell_index(coords[i * stride + a], delta);
            keys[i] = key;
        }
    });
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::size_t box_count(const PointCloud& cloud, double delta, Exec exec) {
    const std::size_t stride = static_cast<std::size_t>(cloud.spatial_dim) + (cloud.heights.empty() ? 0 : 1);
    std::vector<double> coords;
    coords.reserve(cloud.size() * stride);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point p = cloud.point(i);
        for (int a = 0; a < cloud.spatial_dim; ++a) coords.push_back(p[static_cast<std::size_t>(a)]);
        if (!cloud.heights.empty()) coords.push_back(cloud.heights[i]);
    }
    return box_count(coords, stride, delta, exec);
}

std::size_t box_count_surface(const GridFunction& f, double delta, Exec exec) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    const Lattice& lat = f.lattice();
    const double spacing = std::pow(lat.partition().common_scale(), lat.depth());
    if (delta < spacing * (1.0 - 1e-12)) throw InvalidArgument("delta is finer than the lattice spacing");

    const int dim = lat.dim();
    const auto cells = lat.cells();
    const std::size_t verts = static_cast<std::size_t>(dim) + 1;

    struct Span {
        std::array<std::int64_t, 2> x0, x1;
        std::int64_t z0, z1;
    };
    auto cell_span = [&](std::size_t c) {
        Span s{};
        for (int a = 0; a < 2; ++a) {
            const auto ax = static_cast<std::size_t>(a);
            if (a >= dim) {
                s.x0[ax] = s.x1[ax] = 0;
                continue;
            }
            double lo = lat.point(cells[c][0])[ax], hi = lo;
            for (std::size_t j = 1; j < verts; ++j) {
                lo = std::min(lo, lat.point(cells[c][j])[ax]);
                hi = std::max(hi, lat.point(cells[c][j])[ax]);
            }
            std::tie(s.x0[ax], s.x1[ax]) = open_span(lo, hi, delta);
        }
        double zlo = f[cells[c][0]], zhi = zlo;
        for (std::size_t j = 1; j < verts; ++j) {
            zlo = std::min(zlo, f[cells[c][j]]);
            zhi = std::max(zhi, f[cells[c][j]]);
        }
        std::tie(s.z0, s.z1) = open_span(zlo, zhi, delta);
        return s;
    };

    // Pass 1: footprint squares per cell; pass 2: one vertical run per (cell, square).
    std::vector<std::size_t> offsets(cells.size() + 1, 0);
    kernels::for_each(exec, cells.size(), [&](std::size_t c) {
        const Span s = cell_span(c);
        offsets[c + 1] = static_cast<std::size_t>((s.x1[0] - s.x0[0] + 1) * (s.x1[1] - s.x0[1] + 1));
    });
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

    struct Run {
        std::int64_t ix, iy, lo, hi;
        bool operator<(const Run& o) const { return std::tie(ix, iy, lo, hi) < std::tie(o.ix, o.iy, o.lo, o.hi); }
    };
    std::vector<Run> runs(offsets.back());
    kernels::for_each(exec, cells.size(), [&](std::size_t c) {
        const Span s = cell_span(c);
        std::size_t slot = offsets[c];
        for (std::int64_t ix = s.x0[0]; ix <= s.x1[0]; ++ix)
            for (std::int64_t iy = s.x0[1]; iy <= s.x1[1]; ++iy) runs[slot++] = {ix, iy, s.z0, s.z1};
    });
    std::sort(runs.begin(), runs.end());

    std::size_t count = 0;
    std::size_t i = 0;
    while (i < runs.size()) {
        const std::int64_t ix = runs[i].ix, iy = runs[i].iy;
        std::int64_t lo = runs[i].lo, hi = runs[i].hi;
        for (++i; i < runs.size() && runs[i].ix == ix && runs[i].iy == iy; ++i) {
            if (runs[i].lo > hi + 1) {
                count += static_cast<std::size_t>(hi - lo + 1);
                lo = runs[i].lo;
                hi = runs[i].hi;
            } else {
                hi = std::max(hi, runs[i].hi);
            }
        }
        count += static_cast<std::size_t>(hi - lo + 1);
    }
    return count;
}

DimensionEstimate estimate_slope(std::span<const double> scales, std::span<const double> counts) {
    if (scales.size() != counts.size()) throw InvalidArgument("scales and counts differ in length");
    if (scales.size() < 3) throw InvalidArgument("slope estimation needs at least 3 scales");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw InvalidArgument("scales must be positive");
        if (!(counts[i] > 0.0)) throw InvalidArgument("counts must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) throw InvalidArgument("scales must be strictly decreasing");
    }
    const std::size_t n = scales.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(1.0 / scales[i]);
        y[i] = std::log(counts[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    DimensionEstimate out;
    out.scales.assign(scales.begin(), scales.end());
    out.counts.assign(counts.begin(), counts.end());
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (out.intercept + out.slope * x[i]);
        ss_res += r * r;
    }
    out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return out;
}

DimensionEstimate box_dimension(const GridFunction& f, int k_min, int k_max, Exec exec) {
    if (k_min < 0 || k_max > f.lattice().depth() || k_max - k_min < 2)
        throw InvalidArgument("box dimension needs 0 <= k_min, k_max <= lattice depth and at least 3 scales");
    const double c = f.lattice().partition().common_scale();
    std::vector<double> scales, counts;
    for (int k = k_min; k <= k_max; ++k) {
        scales.push_back(std::pow(c, k));
        counts.push_back(static_cast<double>(box_count_surface(f, scales.back(), exec)));
    }
    return estimate_slope(scales, counts);
}

BoundReport theorem_bounds(const ScalingVector& alpha, int n_pieces, int k, double beta) {
    if (!(beta >= 0.0 && beta <= 2.0)) throw InvalidArgument("beta must lie in [0, 2]");
    if (n_pieces < 1 || k < 1) throw InvalidArgument("N and k must be >= 1");
    const double ak = std::pow(alpha.max_abs(), k);
    BoundReport out;
    out.beta = beta;
    out.condition_value = std::max(ak, ak / std::pow(static_cast<double>(n_pieces), k * (1.0 - beta)));
    out.condition_holds = out.condition_value < 1.0;
    if (out.condition_holds) {
        out.lower = 2.0;
        out.upper = beta <= 1.0 ? 3.0 - beta : 2.0;
        out.measure_upper = out.upper;
    }
    return out;
}

std::vector<SandwichRow> column_sandwich(const GridFunction& f, int k_min, int k_max, Exec exec) {
    if (k_min < 0 || k_max > f.lattice().depth() || k_min > k_max) throw InvalidArgument("invalid k range");
    const double c = f.lattice().partition().common_scale();
    std::vector<SandwichRow> rows;
    for (int k = k_min; k <= k_max; ++k) {
        SandwichRow row;
        row.k = k;
        row.delta = std::pow(c, k);
        row.count = box_count_surface(f, row.delta, exec);
        const auto ranges = piece_ranges(f, k, exec);
        double min_range = ranges.front();
        for (double r : ranges) {
            min_range = std::min(min_range, r);
            row.upper += 2.0 + std::ceil(r / row.delta);
        }
        row.lower = static_cast<double>(ranges.size()) * std::floor(min_range / row.delta);
        row.upper_holds = static_cast<double>(row.count) <= row.upper;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hypersurf
