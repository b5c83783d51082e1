#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hypersurf/expr.hpp"
#include "hypersurf/geometry.hpp"
#include "hypersurf/kernels.hpp"
#include "hypersurf/lattice.hpp"

namespace hypersurf {

/// Vertical scaling factors α_1..α_N, each |α_i| < 1.
class ScalingVector {
public:
    explicit ScalingVector(std::vector<double> alphas);

    std::size_t size() const noexcept { return alphas_.size(); }
    double operator[](std::size_t i) const { return alphas_[i]; }
    std::span<const double> values() const noexcept { return alphas_; }

    /// α_∞ = max |α_i|.
    double max_abs() const noexcept;

    /// α_w = α_{i_1} ⋯ α_{i_k}.
    double word_product(const Word& w) const;

private:
    std::vector<double> alphas_;
};

/// Partition, depth k, scaling vector and the seed/base pair (g, b).
/// Construction validates |g(v) - b(v)| < 1e-9 on every v in Z_k.
class FractalSystem {
public:
    static constexpr double kVertexAgreement = 1e-9;

    FractalSystem(Partition partition, int depth, ScalingVector alpha, Expression g, Expression b);

    const Partition& partition() const noexcept { return partition_; }
    int depth() const noexcept { return depth_; }
    const ScalingVector& alpha() const noexcept { return alpha_; }
    const Expression& g() const noexcept { return g_; }
    const Expression& b() const noexcept { return b_; }

    /// α_∞^k, the Lipschitz constant of the operator in the sup norm.
    double contraction_factor() const noexcept { return contraction_; }

    /// True when b is the same expression as g (degenerate mode, f = g).
    bool base_equals_seed() const { return b_.structurally_equal(g_); }

    /// Depth-k word maps and their α products, both in lexicographic word order.
    std::span<const SimilarityMap> word_maps() const noexcept { return word_maps_; }
    std::span<const double> word_alphas() const noexcept { return word_alphas_; }

private:
    Partition partition_;
    int depth_;
    ScalingVector alpha_;
    Expression g_;
    Expression b_;
    double contraction_;
    std::vector<SimilarityMap> word_maps_;
    std::vector<double> word_alphas_;
};

/// The Read-Bajraktarević operator restricted to one lattice.
///
/// For a lattice point x in Δ_w (tie-broken), with y = L_w^{-1}(x) also a lattice point,
///     (T f)(x) = g(x) + α_w (f(y) - b(y)).
/// The per-point data (g(x), α_w, index of y, b(y)) is precomputed, so one
/// application is a gather.
class RbOperator {
public:
    RbOperator(const FractalSystem& system, LatticePtr lattice, Exec exec = Exec::parallel);

    const FractalSystem& system() const noexcept { return system_; }
    const LatticePtr& lattice() const noexcept { return lattice_; }

    GridFunction apply(const GridFunction& f, Exec exec = Exec::parallel) const;

    /// g sampled on the lattice (the initial iterate).
    GridFunction seed() const;

    /// |f(x_p) - (T f)(x_p)| at lattice point p.
    double residual_at(std::span<const double> f, std::size_t p) const;

    /// Lexicographic index of the depth-k word owning lattice point p.
    std::uint32_t word_index(std::size_t p) const { return word_[p]; }

    kernels::RbPlanView view() const noexcept { return {g_, scale_, b_pre_, pre_}; }

private:
    FractalSystem system_;
    LatticePtr lattice_;
    std::vector<double> g_;
    std::vector<double> scale_;
    std::vector<double> b_pre_;
    std::vector<std::uint32_t> pre_;
    std::vector<std::uint32_t> word_;
};

/// One application of the operator to f on f's own lattice.
GridFunction rb_apply(const FractalSystem& system, const GridFunction& f, Exec exec = Exec::parallel);

struct FixedPointResult {
    GridFunction f;
    int iterations = 0;
    std::vector<double> residuals;  // ‖f_{j+1} - f_j‖_∞ per step
    double contraction = 0.0;       // α_∞^k
    double error_bound = 0.0;       // a posteriori bound on ‖f - f^α‖_∞ at the lattice
};

/// Banach iteration from f_0 = g, stopping once ‖f_{j+1} - f_j‖ <= tol (1 - q) / q.
/// Throws ConvergenceFailure after max_iter steps.
FixedPointResult fixed_point(const RbOperator& op, double tol, int max_iter, Exec exec = Exec::parallel);
FixedPointResult fixed_point(const FractalSystem& system, int lattice_depth, double tol, int max_iter,
                             Exec exec = Exec::parallel);

/// Pointwise evaluation of f^α by descent through the functional equation
///     f(x) = g(x) + α_w (f - b)(L_w^{-1} x).
/// The spatial orbit is carried in extended precision because f^α is only
/// Hölder continuous. Descent stops once |α-product| · B <= tol, where
/// B = 2 ‖T g - g‖ / (1 - q) bounds ‖f^α - g‖_∞ (the factor 2 covers the
/// lattice estimate of the sup).
class PointEvaluator {
public:
    PointEvaluator(const FractalSystem& system, double tol);

    double operator()(const Point& x) const;
    double evaluate(const ExtVec& x) const;

    double bound() const noexcept { return bound_; }
    double tolerance() const noexcept { return tol_; }
    int max_levels() const noexcept { return max_levels_; }

private:
    FractalSystem system_;
    double tol_;
    double bound_ = 0.0;
    int max_levels_ = 0;
};

double evaluate_point(const FractalSystem& system, const Point& x, double tol);

/// Max |f(x) - (T f)(x)| over `sample_count` lattice points drawn with the given seed.
double self_residual(const FractalSystem& system, const GridFunction& f, std::size_t sample_count,
                     std::uint64_t seed);
double self_residual(const RbOperator& op, const GridFunction& f, std::size_t sample_count, std::uint64_t seed);

struct JoinupReport {
    std::size_t faces = 0;
    double max_mismatch = 0.0;              // |α_i (f-b)(L_i^{-1} x) - α_j (f-b)(L_j^{-1} x)| on shared faces
    std::pair<Word, Word> worst_face;
    double max_jump = 0.0;                  // |f(x) - (g(x) + α_j (f-b)(L_j^{-1} x))| at face lattice points
    std::pair<Word, Word> worst_jump_face;
};

/// Join-up diagnostic over every pair of depth-k pieces sharing a face.
JoinupReport joinup_check(const FractalSystem& system, const GridFunction& f, int samples_per_face);

}  // namespace hypersurf
