#include "hypersurf/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "hypersurf/errors.hpp"
#include "hypersurf/format.hpp"

namespace hypersurf {

ScalingVector::ScalingVector(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    if (alphas_.empty()) throw ValidationError("alphas", "at least one scaling factor is required");
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
        if (!std::isfinite(alphas_[i]) || std::abs(alphas_[i]) >= 1.0)
            throw ValidationError("alphas", "scaling factor magnitude must be < 1 (alpha_" + std::to_string(i + 1) +
                                                " = " + fmt6(alphas_[i]) + ")");
    }
}

double ScalingVector::max_abs() const noexcept {
    double m = 0.0;
    for (double a : alphas_) m = std::max(m, std::abs(a));
    return m;
}

double ScalingVector::word_product(const Word& w) const {
    double p = 1.0;
    for (int letter : w.letters) {
        if (letter < 1 || static_cast<std::size_t>(letter) > alphas_.size())
            throw InvalidArgument("word letter out of range");
        p *= alphas_[static_cast<std::size_t>(letter - 1)];
    }
    return p;
}

FractalSystem::FractalSystem(Partition partition, int depth, ScalingVector alpha, Expression g, Expression b)
    : partition_(std::move(partition)),
      depth_(depth),
      alpha_(std::move(alpha)),
      g_(std::move(g)),
      b_(std::move(b)) {
    if (depth_ < 1) throw ValidationError("depth_k", "depth must be >= 1");
    if (alpha_.size() != partition_.size())
        throw ValidationError("alphas", "expected " + std::to_string(partition_.size()) + " scaling factors, got " +
                                            std::to_string(alpha_.size()));
    if (g_.dimension() != partition_.dim()) throw ValidationError("g", "expression dimension does not match n");
    if (b_.dimension() != partition_.dim()) throw ValidationError("b", "expression dimension does not match n");

    for (const Point& v : vertex_set(partition_, depth_).points) {
        const double gv = g_.evaluate(v);
        const double bv = b_.evaluate(v);
        if (!std::isfinite(gv)) throw ValidationError("g", "not finite at vertex " + point_string(v));
        if (!std::isfinite(bv)) throw ValidationError("b", "not finite at vertex " + point_string(v));
        if (std::abs(gv - bv) >= kVertexAgreement)
            throw ValidationError("b", "b must equal g on Z_" + std::to_string(depth_) + " but differs at vertex " +
                                           point_string(v) + " (g = " + fmt6(gv) + ", b = " + fmt6(bv) + ")");
    }

    contraction_ = std::pow(alpha_.max_abs(), depth_);
    word_maps_ = hypersurf::word_maps(partition_, depth_);
    word_alphas_.reserve(word_maps_.size());
    for (std::size_t i = 0; i < word_maps_.size(); ++i)
        word_alphas_.push_back(alpha_.word_product(Word::from_lex_index(i, partition_.size(), depth_)));
}

RbOperator::RbOperator(const FractalSystem& system, LatticePtr lattice, Exec exec)
    : system_(system), lattice_(std::move(lattice)) {
    if (!lattice_) throw InvalidArgument("operator needs a lattice");
    if (!(lattice_->partition() == system_.partition()))
        throw InvalidArgument("lattice belongs to a different partition");
    if (lattice_->depth() < system_.depth())
        throw InvalidArgument("lattice depth must be at least the system depth");

    const std::size_t n = lattice_->size();
    g_.resize(n);
    scale_.resize(n);
    b_pre_.resize(n);
    pre_.resize(n);
    word_.resize(n);
    const std::size_t alphabet = system_.partition().size();
    kernels::for_each(exec, n, [&](std::size_t p) {
        const Point& x = lattice_->point(p);
        const Location loc = locate_point(system_.partition(), x, system_.depth());
        const auto pre = lattice_->index_of(loc.preimage);
        if (!pre) throw InvalidArgument("misaligned lattice: preimage of " + point_string(x) + " is not a lattice point");
        const std::size_t w = loc.word.lex_index(alphabet);
        const Point& y = lattice_->point(*pre);
        g_[p] = system_.g().evaluate(x);
        b_pre_[p] = system_.b().evaluate(y);
        if (!std::isfinite(g_[p]) || !std::isfinite(b_pre_[p]))
            throw EvaluationError("g or b is not finite near " + point_string(x));
        scale_[p] = system_.word_alphas()[w];
        pre_[p] = static_cast<std::uint32_t>(*pre);
        word_[p] = static_cast<std::uint32_t>(w);
    });
}

GridFunction RbOperator::apply(const GridFunction& f, Exec exec) const {
    if (f.size() != lattice_->size()) throw InvalidArgument("misaligned lattice: grid size does not match operator");
    std::vector<double> out(f.size());
    kernels::rb_apply(exec, view(), f.values(), out);
    return GridFunction(lattice_, std::move(out));
}

GridFunction RbOperator::seed() const { return GridFunction(lattice_, g_); }

double RbOperator::residual_at(std::span<const double> f, std::size_t p) const {
    return std::abs(f[p] - (g_[p] + scale_[p] * (f[pre_[p]] - b_pre_[p])));
}

GridFunction rb_apply(const FractalSystem& system, const GridFunction& f, Exec exec) {
    return RbOperator(system, f.lattice_ptr(), exec).apply(f, exec);
}

FixedPointResult fixed_point(const RbOperator& op, double tol, int max_iter, Exec exec) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
    const double q = op.system().contraction_factor();
    const double threshold = q > 0.0 ? tol * (1.0 - q) / q : 0.0;

    GridFunction f = op.seed();
    std::vector<double> next(f.size());
    std::vector<double> residuals;
    for (int j = 1; j <= max_iter; ++j) {
        kernels::rb_apply(exec, op.view(), f.values(), next);
        const double r = kernels::max_abs_diff(exec, next, f.values());
        residuals.push_back(r);
        std::copy(next.begin(), next.end(), f.values().begin());
        if (q == 0.0 || r <= threshold) {
            const double bound = q > 0.0 ? q / (1.0 - q) * r : 0.0;
            return {std::move(f), j, std::move(residuals), q, bound};
        }
    }
    throw ConvergenceFailure("fixed point iteration did not reach tolerance " + fmt6(tol) + " in " +
                                 std::to_string(max_iter) + " iterations (last residual " + fmt6(residuals.back()) +
                                 ")",
                             residuals.back(), max_iter);
}

FixedPointResult fixed_point(const FractalSystem& system, int lattice_depth, double tol, int max_iter, Exec exec) {
    return fixed_point(RbOperator(system, make_lattice(system.partition(), lattice_depth), exec), tol, max_iter,
                       exec);
}

namespace {

// Lattice depth for the a priori bound: at least the system depth and about 4096 cells.
int bound_lattice_depth(const FractalSystem& system) {
    const auto n = static_cast<double>(system.partition().size());
    const int fine = static_cast<int>(std::ceil(std::log(4096.0) / std::log(n) - 1e-9));
    return std::max(system.depth(), fine);
}

}  // namespace

PointEvaluator::PointEvaluator(const FractalSystem& system, double tol) : system_(system), tol_(tol) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const double q = system_.contraction_factor();
    if (q == 0.0) return;
    const RbOperator op(system_, make_lattice(system_.partition(), bound_lattice_depth(system_)));
    const GridFunction g = op.seed();
    const double step = sup_distance(op.apply(g), g);
    bound_ = 2.0 * step / (1.0 - q);
    if (bound_ > tol_) max_levels_ = static_cast<int>(std::ceil(std::log(tol_ / bound_) / std::log(q))) + 1;
}

double PointEvaluator::operator()(const Point& x) const {
    if (x.dim != system_.partition().dim()) throw InvalidArgument("point dimension does not match the system");
    return evaluate(x.ext());
}

double PointEvaluator::evaluate(const ExtVec& start) const {
    const Partition& part = system_.partition();
    const int dim = part.dim();
    if (static_cast<double>(part.domain().min_barycentric(start)) < -kLocateTolerance)
        throw DomainError("point " + point_string(Point::from_ext(start, dim)) + " lies outside the domain");

    const std::size_t alphabet = part.size();
    const int k = system_.depth();
    const ExtReal exact(0);
    ExtVec x = start;
    double acc = 0.0;
    double mult = 1.0;
    for (int level = 0; level < max_levels_ && std::abs(mult) * bound_ > tol_; ++level) {
        std::size_t w = 0;
        ExtVec y = x;
        for (int step = 0; step < k; ++step) {
            ExtVec pre{};
            const int letter = part.locate_step(y, exact, pre);
            w = w * alphabet + static_cast<std::size_t>(letter - 1);
            y = pre;
        }
        acc += mult * system_.g().evaluate(Point::from_ext(x, dim));
        mult *= system_.word_alphas()[w];
        acc -= mult * system_.b().evaluate(Point::from_ext(y, dim));
        x = y;
    }
    return acc + mult * system_.g().evaluate(Point::from_ext(x, dim));
}

double evaluate_point(const FractalSystem& system, const Point& x, double tol) {
    return PointEvaluator(system, tol)(x);
}

double self_residual(const RbOperator& op, const GridFunction& f, std::size_t sample_count, std::uint64_t seed) {
    if (f.size() != op.lattice()->size()) throw InvalidArgument("misaligned lattice: grid size does not match operator");
    CounterRng rng(seed);
    double worst = 0.0;
    for (std::size_t s = 0; s < sample_count; ++s)
        worst = std::max(worst, op.residual_at(f.values(), rng.next_below(f.size())));
    return worst;
}

double self_residual(const FractalSystem& system, const GridFunction& f, std::size_t sample_count,
                     std::uint64_t seed) {
    return self_residual(RbOperator(system, f.lattice_ptr()), f, sample_count, seed);
}

JoinupReport joinup_check(const FractalSystem& system, const GridFunction& f, int samples_per_face) {
    const Partition& part = system.partition();
    const Lattice& lat = f.lattice();
    if (!(lat.partition() == part)) throw InvalidArgument("grid belongs to a different partition");
    if (lat.depth() < system.depth()) throw InvalidArgument("grid depth must be at least the system depth");
    if (samples_per_face < 2) throw InvalidArgument("samples_per_face must be >= 2");

    const int dim = part.dim();
    const int k = system.depth();
    const auto maps = system.word_maps();
    const auto alphas = system.word_alphas();
    const std::size_t alphabet = part.size();

    // f - b on the lattice, interpolated piecewise linearly between lattice points.
    std::vector<double> diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = f[i] - system.b().evaluate(lat.point(i));
    const GridFunction fb(f.lattice_ptr(), std::move(diff));

    // Vertices of each depth-k piece in integer coordinates over (1/c)^k.
    const double ck = std::pow(part.common_scale(), k);
    auto key = [&](const Point& p) {
        return std::pair<long long, long long>{std::llround(p[0] / ck), dim == 2 ? std::llround(p[1] / ck) : 0};
    };
    std::vector<std::vector<std::pair<long long, long long>>> keys(maps.size());
    std::vector<std::vector<Point>> verts(maps.size());
    for (std::size_t w = 0; w < maps.size(); ++w) {
        for (const Point& v : part.domain().vertices()) {
            verts[w].push_back(maps[w].apply(v));
            keys[w].push_back(key(verts[w].back()));
        }
    }

    auto side_value = [&](std::size_t w, const Point& x, auto&& value_of) {
        return alphas[w] * value_of(maps[w].inverse(x));
    };
    auto interpolated = [&](const Point& y) { return fb.interpolate(y); };
    auto exact = [&](const Point& y) {
        const auto idx = lat.index_of(y);
        if (!idx) throw InvalidArgument("face preimage is not a lattice point");
        return fb[*idx];
    };

    const auto subdiv = static_cast<long long>(std::llround(std::pow(1.0 / part.common_scale(), lat.depth() - k)));
    JoinupReport report;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = i + 1; j < maps.size(); ++j) {
            std::vector<Point> shared;
            for (std::size_t a = 0; a < keys[i].size(); ++a)
                for (std::size_t b = 0; b < keys[j].size(); ++b)
                    if (keys[i][a] == keys[j][b]) shared.push_back(verts[i][a]);
            if (static_cast<int>(shared.size()) != dim) continue;
            ++report.faces;
            const std::pair<Word, Word> face{Word::from_lex_index(i, alphabet, k), Word::from_lex_index(j, alphabet, k)};

            auto on_face = [&](double t) {
                if (dim == 1) return shared[0];
                return Point(shared[0][0] + t * (shared[1][0] - shared[0][0]),
                             shared[0][1] + t * (shared[1][1] - shared[0][1]));
            };

            const int samples = dim == 1 ? 1 : samples_per_face;
            for (int s = 0; s < samples; ++s) {
                const Point x = on_face(samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1));
                const double m = std::abs(side_value(i, x, interpolated) - side_value(j, x, interpolated));
                if (m > report.max_mismatch) {
                    report.max_mismatch = m;
                    report.worst_face = face;
                }
            }

            const long long points = dim == 1 ? 1 : subdiv + 1;
            for (long long s = 0; s < points; ++s) {
                const Point x = on_face(points == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(subdiv));
                const auto idx = lat.index_of(x);
                if (!idx) throw InvalidArgument("face point is not a lattice point");
                const double gx = system.g().evaluate(x);
                for (std::size_t w : {i, j}) {
                    const double jump = std::abs(f[*idx] - (gx + side_value(w, x, exact)));
                    if (jump > report.max_jump) {
                        report.max_jump = jump;
                        report.worst_jump_face = face;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace hypersurf
