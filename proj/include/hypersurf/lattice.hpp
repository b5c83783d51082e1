#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hypersurf/expr.hpp"
#include "hypersurf/geometry.hpp"

namespace hypersurf {

/// The vertex set Z_m of a partition, indexed for exact lookup.
///
/// Every point has integer coordinates over the denominator D = (1/c)^m,
/// where c is the common similarity ratio. Inverse word maps send lattice
/// points of a depth-k piece onto Z_{m-k} ⊂ Z_m, so lookups never interpolate.
class Lattice {
public:
    Lattice(Partition partition, int depth);

    const Partition& partition() const noexcept { return partition_; }
    int depth() const noexcept { return depth_; }
    int dim() const noexcept { return partition_.dim(); }
    std::int64_t denominator() const noexcept { return denominator_; }

    std::size_t size() const noexcept { return points_.size(); }
    std::span<const Point> points() const noexcept { return points_; }
    const Point& point(std::size_t i) const { return points_[i]; }

    /// Index of the lattice point within 1e-9 / D of p, if any.
    std::optional<std::size_t> index_of(const Point& p) const;

    /// Depth-m cells (small simplices) as vertex-index tuples in lexicographic
    /// word order; the third entry is unused in dimension 1.
    std::span<const std::array<std::uint32_t, 3>> cells() const noexcept { return cells_; }

    /// Lattice points of the closed piece Δ_w for every depth-k word, grouped by
    /// word in lexicographic order (CSR layout: offsets has N^k + 1 entries).
    struct PieceMembers {
        std::vector<std::uint32_t> offsets;
        std::vector<std::uint32_t> members;
    };
    PieceMembers piece_members(int k) const;

private:
    Partition partition_;
    int depth_;
    std::int64_t denominator_ = 1;
    std::vector<Point> points_;
    std::vector<std::int32_t> table_;  // (D+1)^dim dense integer-coordinate lookup
    std::vector<std::array<std::uint32_t, 3>> cells_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

inline LatticePtr make_lattice(const Partition& partition, int depth) {
    return std::make_shared<const Lattice>(partition, depth);
}

/// Real values on a lattice; carrier for Read-Bajraktarević iteration.
class GridFunction {
public:
    GridFunction(LatticePtr lattice, std::vector<double> values);

    /// e sampled at every lattice point; throws EvaluationError on a non-finite value.
    static GridFunction sample(LatticePtr lattice, const Expression& e);

    const Lattice& lattice() const noexcept { return *lattice_; }
    const LatticePtr& lattice_ptr() const noexcept { return lattice_; }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Value at a lattice point; throws InvalidArgument off the lattice.
    double at(const Point& p) const;

    /// Piecewise-linear interpolation over the depth-m cells.
    double interpolate(const Point& p) const;

    double sup_norm() const;

private:
    LatticePtr lattice_;
    std::vector<double> values_;
};

/// ‖a − b‖_∞ over a shared lattice.
double sup_distance(const GridFunction& a, const GridFunction& b);

}  // namespace hypersurf
