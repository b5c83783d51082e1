#include "hypersurf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypersurf/errors.hpp"

namespace hypersurf {

Point Point::from_ext(const ExtVec& v, int dim) {
    if (dim == 1) return Point(static_cast<double>(v[0]));
    return Point(static_cast<double>(v[0]), static_cast<double>(v[1]));
}

double distance(const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

bool lex_less(const Point& a, const Point& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    return a[1] < b[1];
}

// ---------------------------------------------------------------------------
// SimilarityMap

SimilarityMap::SimilarityMap(int dim, double scale, Mat2 orthogonal, std::array<double, 2> translation)
    : dim_(dim), scale_(scale), orthogonal_(orthogonal), translation_(translation) {
    if (dim != 1 && dim != 2) throw InvalidArgument("similarity map dimension must be 1 or 2");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("similarity scale must be positive and finite");
    if (dim == 1) {
        orthogonal_ = {orthogonal[0], 0.0, 0.0, 0.0};
        translation_[1] = 0.0;
    }
    if (orthogonality_error() > 1e-12) throw InvalidArgument("similarity map matrix is not orthogonal");
}

SimilarityMap SimilarityMap::identity(int dim) { return SimilarityMap(dim, 1.0, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}); }

Point SimilarityMap::apply(const Point& p) const {
    const auto v = apply(Vec2<double>{p[0], p[1]});
    return dim_ == 1 ? Point(v[0]) : Point(v[0], v[1]);
}

Point SimilarityMap::inverse(const Point& p) const {
    const auto v = inverse(Vec2<double>{p[0], p[1]});
    return dim_ == 1 ? Point(v[0]) : Point(v[0], v[1]);
}

double SimilarityMap::orthogonality_error() const {
    const auto& o = orthogonal_;
    if (dim_ == 1) return std::abs(o[0] * o[0] - 1.0);
    const double a = o[0] * o[0] + o[2] * o[2] - 1.0;
    const double b = o[0] * o[1] + o[2] * o[3];
    const double d = o[1] * o[1] + o[3] * o[3] - 1.0;
    return std::max({std::abs(a), std::abs(b), std::abs(d)});
}

SimilarityMap compose(const SimilarityMap& outer, const SimilarityMap& inner) {
    if (outer.dim_ != inner.dim_) throw InvalidArgument("cannot compose maps of different dimension");
    const auto& a = outer.orthogonal_;
    const auto& b = inner.orthogonal_;
    const Mat2 product{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                       a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
    // outer(inner(x)) = c_o c_i O_o O_i x + c_o O_o t_i + t_o
    const auto t = outer.apply(Vec2<double>{inner.translation_[0], inner.translation_[1]});
    return SimilarityMap(outer.dim_, outer.scale_ * inner.scale_, product, {t[0], t[1]});
}

// ---------------------------------------------------------------------------
// Simplex

Simplex::Simplex(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() != 2 && vertices_.size() != 3) throw InvalidArgument("simplex needs 2 or 3 vertices");
    dim_ = static_cast<int>(vertices_.size()) - 1;
    for (const auto& v : vertices_) {
        if (v.dim != dim_) throw InvalidArgument("simplex vertex dimension mismatch");
        if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw InvalidArgument("simplex vertex is not finite");
    }
    if (dim_ == 1) {
        const double len = vertices_[1][0] - vertices_[0][0];
        if (len == 0.0) throw InvalidArgument("degenerate interval");
        inv_ = {1.0 / len, 0.0, 0.0, 0.0};
        heights_ = {std::abs(len), std::abs(len), 0.0};
        return;
    }
    const double e1x = vertices_[1][0] - vertices_[0][0], e1y = vertices_[1][1] - vertices_[0][1];
    const double e2x = vertices_[2][0] - vertices_[0][0], e2y = vertices_[2][1] - vertices_[0][1];
    const double det = e1x * e2y - e2x * e1y;
    if (std::abs(det) < 1e-300) throw InvalidArgument("triangle vertices are not affinely independent");
    inv_ = {e2y / det, -e2x / det, -e1y / det, e1x / det};
    for (int j = 0; j < 3; ++j) {
        const Point& a = vertices_[(j + 1) % 3];
        const Point& b = vertices_[(j + 2) % 3];
        heights_[j] = std::abs(det) / distance(a, b);
    }
}

Point Simplex::barycenter() const {
    double x = 0.0, y = 0.0;
    for (const auto& v : vertices_) {
        x += v[0];
        y += v[1];
    }
    const double n = static_cast<double>(vertices_.size());
    return dim_ == 1 ? Point(x / n) : Point(x / n, y / n);
}

bool Simplex::contains(const Point& p, double tol) const {
    return min_barycentric(Vec2<double>{p[0], p[1]}) >= -tol;
}

double Simplex::boundary_distance(const Point& p) const {
    const auto l = barycentric(p);
    double d = l[0] * heights_[0];
    for (int j = 1; j <= dim_; ++j) d = std::min(d, l[j] * heights_[j]);
    return d;
}

double Simplex::volume() const {
    if (dim_ == 1) return std::abs(vertices_[1][0] - vertices_[0][0]);
    return 0.5 / std::abs(inv_[0] * inv_[3] - inv_[1] * inv_[2]);
}

// ---------------------------------------------------------------------------
// Word

std::size_t Word::lex_index(std::size_t alphabet) const {
    std::size_t index = 0;
    for (int l : letters) index = index * alphabet + static_cast<std::size_t>(l - 1);
    return index;
}

Word Word::from_lex_index(std::size_t index, std::size_t alphabet, std::size_t length) {
    std::vector<int> letters(length);
    for (std::size_t j = length; j-- > 0;) {
        letters[j] = static_cast<int>(index % alphabet) + 1;
        index /= alphabet;
    }
    return Word(std::move(letters));
}

std::string Word::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t j = 0; j < letters.size(); ++j) os << (j ? "," : "") << letters[j];
    os << ')';
    return os.str();
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(Simplex domain, std::vector<SimilarityMap> maps)
    : domain_(std::move(domain)), maps_(std::move(maps)) {
    if (maps_.size() < 2) throw InvalidArgument("partition needs at least two maps");
    for (const auto& m : maps_)
        if (m.dim() != domain_.dim()) throw InvalidArgument("partition map dimension mismatch");
}

double Partition::common_scale() const noexcept {
    const double c = maps_.front().scale();
    for (const auto& m : maps_)
        if (std::abs(m.scale() - c) > 1e-15) return 0.0;
    return c;
}

bool operator==(const Partition& a, const Partition& b) {
    return a.domain_.vertices() == b.domain_.vertices() && a.maps_ == b.maps_;
}

Partition standard_triangle_partition() {
    Simplex domain({Point(0.0, 0.0), Point(1.0, 0.0), Point(0.0, 1.0)});
    const Mat2 id{1.0, 0.0, 0.0, 1.0};
    const Mat2 reflect{-1.0, 0.0, 0.0, -1.0};
    std::vector<SimilarityMap> maps{
        SimilarityMap(2, 0.5, id, {0.0, 0.0}),
        SimilarityMap(2, 0.5, id, {0.5, 0.0}),
        SimilarityMap(2, 0.5, id, {0.0, 0.5}),
        SimilarityMap(2, 0.5, reflect, {0.5, 0.5}),
    };
    return Partition(std::move(domain), std::move(maps));
}

Partition interval_partition(int pieces) {
    if (pieces < 2) throw InvalidArgument("interval partition needs N >= 2");
    std::vector<SimilarityMap> maps;
    maps.reserve(static_cast<std::size_t>(pieces));
    const double c = 1.0 / pieces;
    for (int i = 0; i < pieces; ++i) maps.emplace_back(1, c, Mat2{1.0, 0.0, 0.0, 0.0}, std::array<double, 2>{i * c, 0.0});
    return Partition(Simplex({Point(0.0), Point(1.0)}), std::move(maps));
}

SimilarityMap compose_word(const Partition& partition, const Word& word) {
    SimilarityMap result = SimilarityMap::identity(partition.dim());
    for (int letter : word.letters) {
        if (letter < 1 || static_cast<std::size_t>(letter) > partition.size())
            throw InvalidArgument("word letter " + std::to_string(letter) + " out of range 1.." +
                                  std::to_string(partition.size()));
        result = compose(result, partition.map(letter));
    }
    return result;
}

std::vector<SimilarityMap> word_maps(const Partition& partition, int depth) {
    if (depth < 0) throw InvalidArgument("word depth must be non-negative");
    std::vector<SimilarityMap> current{SimilarityMap::identity(partition.dim())};
    for (int level = 0; level < depth; ++level) {
        std::vector<SimilarityMap> next;
        next.reserve(current.size() * partition.size());
        for (const auto& prefix : current)
            for (const auto& m : partition.maps()) next.push_back(compose(prefix, m));
        current = std::move(next);
    }
    return current;
}

namespace {

void sort_unique(std::vector<Point>& points, double tol) {
    std::sort(points.begin(), points.end(), lex_less);
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (!out.empty() && std::abs(out.back()[0] - p[0]) <= tol && std::abs(out.back()[1] - p[1]) <= tol) continue;
        out.push_back(p);
    }
    points = std::move(out);
}

}  // namespace

VertexSet vertex_set(const Partition& partition, int depth) {
    if (depth < 0) throw InvalidArgument("vertex set depth must be non-negative");
    // V_{i w} = L_i(V_w), so Z_{j+1} = ∪_i L_i(Z_j).
    std::vector<Point> points = partition.domain().vertices();
    sort_unique(points, kVertexDedupTolerance);
    for (int level = 0; level < depth; ++level) {
        std::vector<Point> next;
        next.reserve(points.size() * partition.size());
        for (const auto& m : partition.maps())
            for (const auto& p : points) next.push_back(m.apply(p));
        sort_unique(next, kVertexDedupTolerance);
        points = std::move(next);
    }
    return VertexSet{depth, std::move(points)};
}

Location locate_point(const Partition& partition, const Point& x, int depth) {
    if (depth < 1) throw InvalidArgument("locate depth must be at least 1");
    if (x.dim != partition.dim()) throw InvalidArgument("point dimension does not match partition");
    if (!partition.domain().contains(x, kLocateTolerance))
        throw DomainError("point lies outside the domain simplex");
    Location loc;
    loc.word.letters.reserve(static_cast<std::size_t>(depth));
    Vec2<double> y{x[0], x[1]};
    for (int level = 0; level < depth; ++level) {
        Vec2<double> pre{};
        loc.word.letters.push_back(partition.locate_step(y, kLocateTolerance, pre));
        y = pre;
    }
    loc.preimage = partition.dim() == 1 ? Point(y[0]) : Point(y[0], y[1]);
    return loc;
}

Point label(const Partition& partition, const Point& v, const Word& word) {
    const Point q = compose_word(partition, word).inverse(v);
    for (const auto& vertex : partition.domain().vertices())
        if (distance(q, vertex) <= kLocateTolerance) return vertex;
    throw InvalidArgument("point is not a vertex of the piece " + word.to_string());
}

Point sample_uniform(const Simplex& simplex, CounterRng& rng) {
    const auto& v = simplex.vertices();
    if (simplex.dim() == 1) {
        const double u = rng.next_uniform();
        return Point(v[0][0] + u * (v[1][0] - v[0][0]));
    }
    double u = rng.next_uniform();
    double w = rng.next_uniform();
    if (u + w > 1.0) {
        u = 1.0 - u;
        w = 1.0 - w;
    }
    return Point(v[0][0] + u * (v[1][0] - v[0][0]) + w * (v[2][0] - v[0][0]),
                 v[0][1] + u * (v[1][1] - v[0][1]) + w * (v[2][1] - v[0][1]));
}

PartitionReport check_partition(const Partition& partition, std::size_t samples, std::uint64_t seed) {
    PartitionReport report;
    const Simplex& domain = partition.domain();
    const auto maps = partition.maps();

    for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto& m = maps[i];
        const std::string name = "map " + std::to_string(i + 1);
        if (m.orthogonality_error() > 1e-12) {
            report.orthogonal = false;
            report.failures.push_back("A2 (similarity): " + name + " has a non-orthogonal linear part");
        }
        if (!(m.scale() > 0.0 && m.scale() < 1.0)) {
            report.contractive = false;
            report.failures.push_back("A2 (similarity): " + name + " scale is not in (0,1)");
        }
        for (const auto& v : domain.vertices()) {
            if (!domain.contains(m.apply(v), kLocateTolerance)) {
                report.contained = false;
                report.failures.push_back("A1 (cover): piece " + std::to_string(i + 1) + " leaves the domain");
                break;
            }
        }
    }
    if (partition.common_scale() == 0.0) {
        report.congruent = false;
        report.failures.push_back("A3 (congruence): pieces have different similarity ratios");
    }

    CounterRng rng(seed);
    constexpr double kFaceMargin = 1e-3;
    for (std::size_t s = 0; s < samples; ++s) {
        const Point x = sample_uniform(domain, rng);
        std::size_t containing = 0;
        bool near_face = false;
        for (const auto& m : maps) {
            const Point q = m.inverse(x);
            const double margin = domain.min_barycentric(Vec2<double>{q[0], q[1]});
            if (margin >= -kLocateTolerance) ++containing;
            // distance from x to each face line of the piece: |λ_j| * c * h_j
            const auto l = domain.barycentric(q);
            for (int j = 0; j <= domain.dim(); ++j)
                if (std::abs(l[j]) * m.scale() * domain.height(j) <= kFaceMargin) near_face = true;
        }
        if (containing == 0) ++report.uncovered_samples;
        if (!near_face && containing != 1) ++report.overlapping_samples;
    }
    if (report.uncovered_samples > 0) {
        report.covered = false;
        report.failures.push_back("A1 (cover): " + std::to_string(report.uncovered_samples) +
                                  " domain samples lie in no piece");
    }
    if (report.overlapping_samples > 0) {
        report.disjoint = false;
        report.failures.push_back("A3 (disjoint interiors): " + std::to_string(report.overlapping_samples) +
                                  " interior samples lie in more than one piece");
    }
    return report;
}

}  // namespace hypersurf
