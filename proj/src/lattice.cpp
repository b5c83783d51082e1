#include "hypersurf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypersurf/errors.hpp"

namespace hypersurf {

namespace {

std::int64_t lattice_denominator(const Partition& partition, int depth) {
    const double c = partition.common_scale();
    if (c <= 0.0 || c >= 1.0) throw InvalidArgument("lattice needs pieces with one common similarity ratio");
    const double inv = 1.0 / c;
    const double base = std::round(inv);
    if (std::abs(inv - base) > 1e-9) throw InvalidArgument("lattice needs an integer inverse similarity ratio");
    std::int64_t d = 1;
    for (int j = 0; j < depth; ++j) {
        d *= static_cast<std::int64_t>(base);
        if (d > (std::int64_t{1} << 24)) throw InvalidArgument("lattice depth too large");
    }
    return d;
}

}  // namespace

Lattice::Lattice(Partition partition, int depth) : partition_(std::move(partition)), depth_(depth) {
    if (depth < 0) throw InvalidArgument("lattice depth must be non-negative");
    denominator_ = lattice_denominator(partition_, depth);
    points_ = vertex_set(partition_, depth).points;

    const auto side = static_cast<std::size_t>(denominator_ + 1);
    const std::size_t table_size = dim() == 1 ? side : side * side;
    table_.assign(table_size, -1);

    const auto d = static_cast<double>(denominator_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::size_t slot = 0;
        for (int axis = 0; axis < dim(); ++axis) {
            const double scaled = points_[i][static_cast<std::size_t>(axis)] * d;
            const double r = std::round(scaled);
            if (std::abs(scaled - r) > 1e-6 || r < 0.0 || r > d)
                throw InvalidArgument("partition vertices are not aligned with the lattice");
            slot = slot * side + static_cast<std::size_t>(r);
        }
        table_[slot] = static_cast<std::int32_t>(i);
    }

    // Cells: depth-m word images of the domain, enumerated depth first in lexicographic order.
    const std::size_t verts = static_cast<std::size_t>(dim()) + 1;
    std::size_t cell_count = 1;
    for (int j = 0; j < depth; ++j) cell_count *= partition_.size();
    cells_.reserve(cell_count);
    auto descend = [&](auto&& self, const SimilarityMap& prefix, int level) -> void {
        if (level == depth_) {
            std::array<std::uint32_t, 3> cell{0, 0, 0};
            for (std::size_t j = 0; j < verts; ++j) {
                const auto idx = index_of(prefix.apply(partition_.domain().vertices()[j]));
                if (!idx) throw InvalidArgument("cell vertex is not a lattice point");
                cell[j] = static_cast<std::uint32_t>(*idx);
            }
            cells_.push_back(cell);
            return;
        }
        for (const auto& m : partition_.maps()) self(self, compose(prefix, m), level + 1);
    };
    descend(descend, SimilarityMap::identity(dim()), 0);
}

std::optional<std::size_t> Lattice::index_of(const Point& p) const {
    const auto side = static_cast<std::size_t>(denominator_ + 1);
    const auto d = static_cast<double>(denominator_);
    std::size_t slot = 0;
    for (int axis = 0; axis < dim(); ++axis) {
        const double scaled = p[static_cast<std::size_t>(axis)] * d;
        const double r = std::round(scaled);
        if (std::abs(scaled - r) > 1e-9 * std::max(1.0, d) || r < 0.0 || r > d) return std::nullopt;
        slot = slot * side + static_cast<std::size_t>(r);
    }
    const std::int32_t idx = table_[slot];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

Lattice::PieceMembers Lattice::piece_members(int k) const {
    if (k < 0 || k > depth_) throw InvalidArgument("piece depth must lie in [0, lattice depth]");
    const VertexSet reference = vertex_set(partition_, depth_ - k);
    const auto maps = word_maps(partition_, k);
    PieceMembers out;
    out.offsets.reserve(maps.size() + 1);
    out.members.reserve(maps.size() * reference.points.size());
    out.offsets.push_back(0);
    for (const auto& m : maps) {
        for (const auto& q : reference.points) {
            const auto idx = index_of(m.apply(q));
            if (!idx) throw InvalidArgument("piece point is not a lattice point");
            out.members.push_back(static_cast<std::uint32_t>(*idx));
        }
        out.offsets.push_back(static_cast<std::uint32_t>(out.members.size()));
    }
    return out;
}

GridFunction::GridFunction(LatticePtr lattice, std::vector<double> values)
    : lattice_(std::move(lattice)), values_(std::move(values)) {
    if (!lattice_) throw InvalidArgument("grid function needs a lattice");
    if (values_.size() != lattice_->size()) throw InvalidArgument("grid values do not match lattice size");
}

GridFunction GridFunction::sample(LatticePtr lattice, const Expression& e) {
    if (e.dimension() != lattice->dim()) throw InvalidArgument("expression dimension does not match lattice");
    std::vector<double> values(lattice->size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = e.evaluate(lattice->point(i));
        if (!std::isfinite(values[i]))
            throw EvaluationError("'" + e.source() + "' is not finite at a lattice point");
    }
    return GridFunction(std::move(lattice), std::move(values));
}

double GridFunction::at(const Point& p) const {
    const auto idx = lattice_->index_of(p);
    if (!idx) throw InvalidArgument("point is not on the lattice");
    return values_[*idx];
}

double GridFunction::interpolate(const Point& p) const {
    const Lattice& lat = *lattice_;
    if (lat.depth() == 0) {
        const auto w = lat.partition().domain().barycentric(p);
        double v = 0.0;
        for (int j = 0; j <= lat.dim(); ++j) v += w[j] * values_[lat.cells()[0][static_cast<std::size_t>(j)]];
        return v;
    }
    const Location loc = locate_point(lat.partition(), p, lat.depth());
    const auto& cell = lat.cells()[loc.word.lex_index(lat.partition().size())];
    const auto w = lat.partition().domain().barycentric(loc.preimage);
    double v = 0.0;
    for (int j = 0; j <= lat.dim(); ++j) v += w[j] * values_[cell[static_cast<std::size_t>(j)]];
    return v;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
    if (a.lattice_ptr() != b.lattice_ptr() && a.size() != b.size())
        throw InvalidArgument("grid functions live on different lattices");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace hypersurf
