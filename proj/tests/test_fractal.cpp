#include <cmath>

#include "doctest.h"
#include "hypersurf/errors.hpp"
#include "hypersurf/fractal.hpp"
#include "support.hpp"
#include "systems.hpp"

using namespace hypersurf;
using testsupport::example_system;
using testsupport::make_system;

namespace {

GridFunction random_grid(const LatticePtr& lat, CounterRng& rng, double scale) {
    std::vector<double> v(lat->size());
    for (double& x : v) x = testsupport::uniform(rng, -scale, scale);
    return GridFunction(lat, std::move(v));
}

}  // namespace

TEST_SUITE("fractal") {

TEST_CASE("scaling vector") {
    const ScalingVector a({0.8, -0.8, 0.75, 0.75});
    CHECK(a.max_abs() == 0.8);
    CHECK(a.word_product(Word{1, 4}) == 0.8 * 0.75);
    CHECK(a.word_product(Word{}) == 1.0);
    CHECK_THROWS_WITH_AS(ScalingVector({1.0, 0.5}), doctest::Contains("scaling factor magnitude must be < 1"),
                         ValidationError);
    CHECK_THROWS_AS(ScalingVector({-1.2}), ValidationError);
}

TEST_CASE("system validation") {
    CHECK_NOTHROW(example_system());
    CHECK_THROWS_AS(make_system({0.5, 0.5, 0.5}), ValidationError);
    CHECK_THROWS_WITH_AS(make_system({0.5, 0.5, 0.5, 0.5}, testsupport::kSeed, "5 + x^3"),
                         doctest::Contains("vertex (0, 0.5)"), ValidationError);
    CHECK_THROWS_AS(make_system({0.5, 0.5, 0.5, 0.5}, testsupport::kSeed, testsupport::kBase, 0), ValidationError);
}

TEST_CASE("seed and base agree on Z_1 but not on Z_2") {
    const Expression g = Expression::parse(testsupport::kSeed, 2);
    const Expression b = Expression::parse(testsupport::kBase, 2);
    for (const Point& v : vertex_set(standard_triangle_partition(), 1).points)
        CHECK(std::abs(g.evaluate(v) - b.evaluate(v)) < 1e-12);
    CHECK(std::abs(g.evaluate(0.25, 0.25) - b.evaluate(0.25, 0.25) - 1.0) < 1e-12);
    CHECK_THROWS_WITH_AS(make_system({0.64, 0.64, 0.6, 0.6}, testsupport::kSeed, testsupport::kBase, 2),
                         doctest::Contains("(0.25, 0.25)"), ValidationError);
    const Expression b2 = Expression::parse(testsupport::kBaseDepth2, 2);
    for (int k = 1; k <= 2; ++k)
        for (const Point& v : vertex_set(standard_triangle_partition(), k).points)
            CHECK(std::abs(g.evaluate(v) - b2.evaluate(v)) < 1e-12);
}

TEST_CASE("zero scaling returns g for any input grid") {
    const FractalSystem sys = make_system({0, 0, 0, 0});
    const auto lat = make_lattice(sys.partition(), 4);
    CounterRng rng(1);
    const GridFunction f = random_grid(lat, rng, 10.0);
    const GridFunction out = rb_apply(sys, f);
    const GridFunction g = GridFunction::sample(lat, sys.g());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == g[i]);
}

TEST_CASE("b = g makes g a fixed point") {
    const FractalSystem sys = make_system({0.8, 0.8, 0.75, 0.75}, testsupport::kSeed, testsupport::kSeed);
    CHECK(sys.base_equals_seed());
    const auto lat = make_lattice(sys.partition(), 5);
    const GridFunction g = GridFunction::sample(lat, sys.g());
    const GridFunction out = rb_apply(sys, g);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == g[i]);
    const FixedPointResult r = fixed_point(sys, 5, 1e-10, 100);
    CHECK(r.iterations == 1);
    for (std::size_t i = 0; i < r.f.size(); ++i) CHECK(r.f[i] == g[i]);
}

TEST_CASE("contraction over random grid pairs") {
    const FractalSystem sys = example_system();
    const RbOperator op(sys, make_lattice(sys.partition(), 6));
    CounterRng rng(2024);
    for (int t = 0; t < 50; ++t) {
        const double scale = std::ldexp(1.0, static_cast<int>(rng.next_below(12)) - 6);
        const GridFunction f1 = random_grid(op.lattice(), rng, scale);
        const GridFunction f2 = random_grid(op.lattice(), rng, scale);
        const double lhs = sup_distance(op.apply(f1), op.apply(f2));
        CHECK(lhs <= 0.8 * sup_distance(f1, f2) + 1e-12);
    }
}

TEST_CASE("depth-2 contraction factor") {
    const FractalSystem sys = make_system({0.64, 0.64, 0.6, 0.6}, testsupport::kSeed, testsupport::kBaseDepth2, 2);
    CHECK(sys.contraction_factor() == doctest::Approx(0.64 * 0.64));
    CHECK(sys.word_alphas()[Word{1, 4}.lex_index(4)] == 0.64 * 0.6);
}

TEST_CASE("misaligned lattices are rejected") {
    const FractalSystem sys = make_system({0.5, 0.5, 0.5, 0.5}, testsupport::kSeed, testsupport::kBaseDepth2, 2);
    CHECK_THROWS_AS(RbOperator(sys, make_lattice(sys.partition(), 1)), InvalidArgument);
    const FractalSystem sys1 = example_system();
    const auto lat = make_lattice(sys1.partition(), 3);
    const RbOperator op(sys1, lat);
    const auto other = make_lattice(sys1.partition(), 4);
    CHECK_THROWS_AS(op.apply(GridFunction::sample(other, sys1.g())), InvalidArgument);
    CHECK_THROWS_AS(RbOperator(FractalSystem(interval_partition(4), 1, ScalingVector({0.5, 0.5, 0.5, 0.5}),
                                             Expression::parse("x", 1), Expression::parse("x", 1)),
                               lat),
                    InvalidArgument);
}

TEST_CASE("fixed point of the example system") {
    const FractalSystem sys = example_system();
    const FixedPointResult r = fixed_point(sys, 6, 1e-10, 1000);
    CHECK(r.iterations <= 120);
    for (std::size_t j = 0; j + 1 < r.residuals.size(); ++j) CHECK(r.residuals[j + 1] <= 0.8 * r.residuals[j] + 1e-12);
    CHECK(r.residuals.back() <= 1e-10 * 0.2 / 0.8);
    for (const Point& v : vertex_set(sys.partition(), 1).points)
        CHECK(std::abs(r.f.at(v) - sys.g().evaluate(v)) <= 1e-9);
    CHECK(std::abs(r.f.at(Point(0.5, 0.5)) - 5.375) <= 1e-9);
    CHECK(self_residual(sys, r.f, 10000, 7) <= 1e-9);
}

TEST_CASE("zero scaling converges in one iteration") {
    const FractalSystem sys = make_system({0, 0, 0, 0});
    const FixedPointResult r = fixed_point(sys, 5, 1e-10, 10);
    CHECK(r.iterations == 1);
    const GridFunction g = GridFunction::sample(r.f.lattice_ptr(), sys.g());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.f[i] == g[i]);
    CHECK(self_residual(sys, r.f, 1000, 3) <= 1e-14);
}

TEST_CASE("iteration limit raises convergence failure with the last residual") {
    const FractalSystem sys = example_system();
    try {
        // On a depth-m lattice the iteration settles after m + 1 sweeps, so stop well before that.
        fixed_point(sys, 6, 1e-10, 3);
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.last_residual() > 0.0);
    }
    CHECK_THROWS_AS(fixed_point(sys, 4, 0.0, 5), InvalidArgument);
}

TEST_CASE("self residual of an unconverged grid is reported") {
    const FractalSystem sys = make_system({0.95, 0.95, 0.95, 0.95});
    const RbOperator op(sys, make_lattice(sys.partition(), 5));
    const GridFunction one = op.apply(op.seed());
    const double r = self_residual(op, one, 2000, 5);
    CHECK(r > 1e-10);
    // A single step moves the residual from ‖Tg - g‖ to at most α ‖Tg - g‖.
    CHECK(r <= 0.95 * sup_distance(one, op.seed()) + 1e-12);
}

TEST_CASE("point evaluator agrees with the grid at every depth-6 lattice point") {
    const FractalSystem sys = example_system();
    const double tol = 1e-10;
    const FixedPointResult r = fixed_point(sys, 6, tol, 1000);
    const PointEvaluator eval(sys, tol);
    CHECK(eval.bound() > 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.f.size(); ++i)
        worst = std::max(worst, std::abs(eval(r.f.lattice().point(i)) - r.f[i]));
    CHECK(worst <= 2 * tol);
    CHECK_THROWS_AS(eval(Point(0.9, 0.9)), DomainError);
}

TEST_CASE("point evaluator on degenerate systems") {
    const FractalSystem zero = make_system({0, 0, 0, 0});
    CHECK(evaluate_point(zero, Point(0.3, 0.2), 1e-10) == zero.g().evaluate(0.3, 0.2));
    const FractalSystem same = make_system({0.8, 0.8, 0.75, 0.75}, testsupport::kSeed, testsupport::kSeed);
    CHECK(std::abs(evaluate_point(same, Point(0.3, 0.2), 1e-10) - same.g().evaluate(0.3, 0.2)) <= 1e-12);
}

TEST_CASE("depth-2 system interpolates Z_2") {
    const FractalSystem sys = make_system({0.64, 0.64, 0.6, 0.6}, testsupport::kSeed, testsupport::kBaseDepth2, 2);
    const FixedPointResult r = fixed_point(sys, 6, 1e-10, 1000);
    const auto z2 = vertex_set(sys.partition(), 2).points;
    CHECK(z2.size() == 15);
    for (const Point& v : z2) CHECK(std::abs(r.f.at(v) - sys.g().evaluate(v)) <= 1e-9);
}

TEST_CASE("join-up diagnostics") {
    SUBCASE("b = g") {
        const FractalSystem sys = make_system({0.8, 0.8, 0.75, 0.75}, testsupport::kSeed, testsupport::kSeed);
        const FixedPointResult r = fixed_point(sys, 5, 1e-10, 100);
        const JoinupReport j = joinup_check(sys, r.f, 9);
        CHECK(j.faces == 3);
        CHECK(j.max_mismatch <= 1e-12);
        CHECK(j.max_jump <= 1e-12);
    }
    SUBCASE("zero scaling") {
        const FractalSystem sys = make_system({0, 0, 0, 0});
        const FixedPointResult r = fixed_point(sys, 5, 1e-10, 100);
        const JoinupReport j = joinup_check(sys, r.f, 9);
        CHECK(j.max_jump <= 1e-12);
        CHECK(j.max_mismatch <= 1e-12);
    }
    SUBCASE("example system is measured") {
        const FractalSystem sys = example_system();
        const FixedPointResult r = fixed_point(sys, 6, 1e-10, 1000);
        const JoinupReport j = joinup_check(sys, r.f, 17);
        CHECK(j.faces == 3);
        CHECK(std::isfinite(j.max_mismatch));
        CHECK(std::isfinite(j.max_jump));
        MESSAGE("example join-up mismatch " << j.max_mismatch << " on " << j.worst_face.first.to_string() << "|"
                                            << j.worst_face.second.to_string() << ", jump " << j.max_jump);
    }
}

TEST_CASE("interval systems") {
    const FractalSystem sys(interval_partition(4), 1, ScalingVector({0.5, -0.4, 0.3, 0.6}),
                            Expression::parse("sin(3*x) + x", 1), Expression::parse("sin(3*x) + x + sin(4*pi*x)", 1));
    const FixedPointResult r = fixed_point(sys, 6, 1e-11, 1000);
    for (const Point& v : vertex_set(sys.partition(), 1).points)
        CHECK(std::abs(r.f.at(v) - sys.g().evaluate(v)) <= 1e-10);
    const PointEvaluator eval(sys, 1e-11);
    for (std::size_t i = 0; i < r.f.size(); i += 7) CHECK(std::abs(eval(r.f.lattice().point(i)) - r.f[i]) <= 2e-11);
    const JoinupReport j = joinup_check(sys, r.f, 2);
    CHECK(j.faces == 3);
    MESSAGE("interval join-up jump " << j.max_jump);
}

}  // TEST_SUITE
