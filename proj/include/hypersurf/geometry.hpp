#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypersurf/rng.hpp"

namespace hypersurf {

/// Extended-precision scalar for orbit and descent computations. Graphs of
/// fractal functions are only Hölder continuous, so a 2^-53 perturbation of a
/// spatial coordinate can move the function value by ~1e-6; 113-bit (or
/// 64-bit x87) mantissas push that effect far below evaluation tolerances.
#if defined(__SIZEOF_FLOAT128__) && !defined(HYPERSURF_NO_FLOAT128)
using ExtReal = __float128;
#else
using ExtReal = long double;
#endif

template <class Real>
using Vec2 = std::array<Real, 2>;

using ExtVec = Vec2<ExtReal>;

/// A point of R^n for n in {1, 2}. Unused trailing coordinates are zero.
struct Point {
    std::array<double, 2> c{};
    int dim = 2;

    Point() = default;
    explicit Point(double x) : c{x, 0.0}, dim(1) {}
    Point(double x, double y) : c{x, y}, dim(2) {}

    double operator[](std::size_t i) const { return c[i]; }
    double& operator[](std::size_t i) { return c[i]; }

    ExtVec ext() const { return {ExtReal(c[0]), ExtReal(c[1])}; }
    static Point from_ext(const ExtVec& v, int dim);

    friend bool operator==(const Point& a, const Point& b) = default;
};

double distance(const Point& a, const Point& b);

/// Lexicographic (x, y) order used for every exported point list.
bool lex_less(const Point& a, const Point& b);

/// n x n orthogonal matrix stored row-major in a 2 x 2 block.
using Mat2 = std::array<double, 4>;

/// x -> scale * O * x + t with O orthogonal and scale > 0.
class SimilarityMap {
public:
    SimilarityMap(int dim, double scale, Mat2 orthogonal, std::array<double, 2> translation);

    static SimilarityMap identity(int dim);

    int dim() const noexcept { return dim_; }
    double scale() const noexcept { return scale_; }
    const Mat2& orthogonal() const noexcept { return orthogonal_; }
    const std::array<double, 2>& translation() const noexcept { return translation_; }

    Point apply(const Point& p) const;
    Point inverse(const Point& p) const;

    template <class Real>
    Vec2<Real> apply(const Vec2<Real>& p) const {
        const Real s(scale_);
        if (dim_ == 1) return {s * Real(orthogonal_[0]) * p[0] + Real(translation_[0]), Real(0)};
        return {s * (Real(orthogonal_[0]) * p[0] + Real(orthogonal_[1]) * p[1]) + Real(translation_[0]),
                s * (Real(orthogonal_[2]) * p[0] + Real(orthogonal_[3]) * p[1]) + Real(translation_[1])};
    }

    /// O^T (p - t) / scale.
    template <class Real>
    Vec2<Real> inverse(const Vec2<Real>& p) const {
        const Real inv_s = Real(1) / Real(scale_);
        const Real dx = p[0] - Real(translation_[0]);
        if (dim_ == 1) return {Real(orthogonal_[0]) * dx * inv_s, Real(0)};
        const Real dy = p[1] - Real(translation_[1]);
        return {(Real(orthogonal_[0]) * dx + Real(orthogonal_[2]) * dy) * inv_s,
                (Real(orthogonal_[1]) * dx + Real(orthogonal_[3]) * dy) * inv_s};
    }

    /// Max entry of |O^T O - I| over the dim x dim block.
    double orthogonality_error() const;

    /// outer ∘ inner.
    friend SimilarityMap compose(const SimilarityMap& outer, const SimilarityMap& inner);

    friend bool operator==(const SimilarityMap&, const SimilarityMap&) = default;

private:
    int dim_;
    double scale_;
    Mat2 orthogonal_;
    std::array<double, 2> translation_;
};

/// Convex hull of dim + 1 affinely independent points.
class Simplex {
public:
    explicit Simplex(std::vector<Point> vertices);

    int dim() const noexcept { return dim_; }
    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    Point barycenter() const;

    /// Barycentric coordinates; entries beyond dim + 1 are zero.
    template <class Real>
    std::array<Real, 3> barycentric(const Vec2<Real>& p) const {
        const Real dx = p[0] - Real(vertices_[0][0]);
        if (dim_ == 1) {
            const Real l1 = dx * Real(inv_[0]);
            return {Real(1) - l1, l1, Real(0)};
        }
        const Real dy = p[1] - Real(vertices_[0][1]);
        const Real l1 = Real(inv_[0]) * dx + Real(inv_[1]) * dy;
        const Real l2 = Real(inv_[2]) * dx + Real(inv_[3]) * dy;
        return {Real(1) - l1 - l2, l1, l2};
    }

    std::array<double, 3> barycentric(const Point& p) const { return barycentric(Vec2<double>{p[0], p[1]}); }

    /// Smallest barycentric coordinate; >= 0 exactly on the closed simplex.
    template <class Real>
    Real min_barycentric(const Vec2<Real>& p) const {
        const auto l = barycentric(p);
        Real m = l[0];
        for (int j = 1; j <= dim_; ++j) m = l[j] < m ? l[j] : m;
        return m;
    }

    bool contains(const Point& p, double tol) const;

    /// Euclidean distance from an inside point to the nearest face.
    double boundary_distance(const Point& p) const;

    double volume() const;

    /// Distance from vertex j to the opposite face.
    double height(int j) const { return heights_[static_cast<std::size_t>(j)]; }

private:
    int dim_;
    std::vector<Point> vertices_;
    Mat2 inv_{};                      // inverse of the edge matrix [v1-v0, v2-v0]
    std::array<double, 3> heights_{}; // distance from vertex j to the opposite face
};

/// A finite index sequence (i_1, ..., i_k) with 1-based letters in {1, ..., N}.
struct Word {
    std::vector<int> letters;

    Word() = default;
    Word(std::initializer_list<int> l) : letters(l) {}
    explicit Word(std::vector<int> l) : letters(std::move(l)) {}

    std::size_t size() const noexcept { return letters.size(); }
    bool empty() const noexcept { return letters.empty(); }
    int operator[](std::size_t i) const { return letters[i]; }

    /// Position in the lexicographic enumeration of {1..N}^k (0-based).
    std::size_t lex_index(std::size_t alphabet) const;
    static Word from_lex_index(std::size_t index, std::size_t alphabet, std::size_t length);

    std::string to_string() const;

    friend auto operator<=>(const Word&, const Word&) = default;
    friend bool operator==(const Word&, const Word&) = default;
};

/// A domain simplex together with N similarity maps onto its pieces.
class Partition {
public:
    Partition(Simplex domain, std::vector<SimilarityMap> maps);

    const Simplex& domain() const noexcept { return domain_; }
    std::span<const SimilarityMap> maps() const noexcept { return maps_; }
    const SimilarityMap& map(int letter) const { return maps_.at(static_cast<std::size_t>(letter - 1)); }
    std::size_t size() const noexcept { return maps_.size(); }
    int dim() const noexcept { return domain_.dim(); }

    /// Common similarity ratio when all maps share one, else 0.
    double common_scale() const noexcept;

    /// Lexicographically smallest letter whose piece contains p, and the preimage
    /// under that map. Containment is tested in preimage barycentrics with `tol`;
    /// if no piece qualifies (rounding outside Δ) the closest piece wins.
    template <class Real>
    int locate_step(const Vec2<Real>& p, Real tol, Vec2<Real>& preimage) const {
        int best = 0;
        Real best_margin(0);
        for (std::size_t i = 0; i < maps_.size(); ++i) {
            const Vec2<Real> q = maps_[i].inverse(p);
            const Real margin = domain_.min_barycentric(q);
            if (margin >= -tol) {
                preimage = q;
                return static_cast<int>(i) + 1;
            }
            if (best == 0 || margin > best_margin) {
                best = static_cast<int>(i) + 1;
                best_margin = margin;
                preimage = q;
            }
        }
        return best;
    }

    friend bool operator==(const Partition&, const Partition&);

private:
    Simplex domain_;
    std::vector<SimilarityMap> maps_;
};

/// Unit triangle (0,0),(1,0),(0,1) split into three corner pieces and a point-reflected middle piece.
Partition standard_triangle_partition();

/// [0, 1] split into N equal pieces, L_i(x) = (x + i - 1) / N.
Partition interval_partition(int pieces);

/// L_{i_1} ∘ ... ∘ L_{i_k}; the empty word gives the identity.
SimilarityMap compose_word(const Partition& partition, const Word& word);

/// All N^k depth-k word maps in lexicographic word order.
std::vector<SimilarityMap> word_maps(const Partition& partition, int depth);

/// Z_k: images of the domain vertices under all depth-k words, deduplicated.
struct VertexSet {
    int depth = 0;
    std::vector<Point> points;  // sorted lexicographically
};

inline constexpr double kVertexDedupTolerance = 1e-12;
inline constexpr double kLocateTolerance = 1e-9;

VertexSet vertex_set(const Partition& partition, int depth);

struct Location {
    Word word;
    Point preimage;
};

/// Depth-k word whose piece contains x (lexicographically smallest on shared faces) and L_w^{-1}(x).
Location locate_point(const Partition& partition, const Point& x, int depth);

/// L_w^{-1}(v) for a vertex v of the piece Δ_w; returns the matching domain vertex.
Point label(const Partition& partition, const Point& v, const Word& word);

/// Uniform sample of a simplex.
Point sample_uniform(const Simplex& simplex, CounterRng& rng);

/// Outcome of the structural checks on a partition (cover, similarity, disjoint interiors).
struct PartitionReport {
    bool orthogonal = true;  // every O_i satisfies O^T O = I
    bool contractive = true; // 0 < c_i < 1
    bool congruent = true;   // all pieces share one similarity ratio
    bool contained = true;   // every piece lies inside Δ
    bool covered = true;     // every sample of Δ lies in some piece
    bool disjoint = true;    // interior samples lie in exactly one piece
    std::size_t uncovered_samples = 0;
    std::size_t overlapping_samples = 0;
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
};

PartitionReport check_partition(const Partition& partition, std::size_t samples, std::uint64_t seed);

}  // namespace hypersurf
