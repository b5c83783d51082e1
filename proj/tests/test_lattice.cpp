#include <cmath>

#include "doctest.h"
#include "hypersurf/errors.hpp"
#include "hypersurf/lattice.hpp"
#include "support.hpp"

using namespace hypersurf;

TEST_SUITE("lattice") {

TEST_CASE("lattice points and exact lookup") {
    const auto lat = make_lattice(standard_triangle_partition(), 4);
    CHECK(lat->denominator() == 16);
    CHECK(lat->size() == 17 * 18 / 2);
    for (std::size_t i = 0; i < lat->size(); ++i) CHECK(lat->index_of(lat->point(i)) == i);
    CHECK_FALSE(lat->index_of(Point(1.0 / 3.0, 0.0)).has_value());
    CHECK_FALSE(lat->index_of(Point(0.75, 0.75)).has_value());
    CHECK(lat->cells().size() == 256);
}

TEST_CASE("inverse word maps send piece points onto the coarser lattice") {
    const Partition part = standard_triangle_partition();
    const auto lat = make_lattice(part, 5);
    const auto coarse = make_lattice(part, 3);
    const auto members = lat->piece_members(2);
    const auto maps = word_maps(part, 2);
    REQUIRE(members.offsets.size() == maps.size() + 1);
    for (std::size_t w = 0; w < maps.size(); ++w) {
        CHECK(members.offsets[w + 1] - members.offsets[w] == coarse->size());
        for (auto j = members.offsets[w]; j < members.offsets[w + 1]; ++j) {
            const Point pre = maps[w].inverse(lat->point(members.members[j]));
            CHECK(coarse->index_of(pre).has_value());
        }
    }
}

TEST_CASE("interval lattice") {
    const auto lat = make_lattice(interval_partition(3), 2);
    CHECK(lat->denominator() == 9);
    CHECK(lat->size() == 10);
    CHECK(lat->index_of(Point(4.0 / 9.0)) == 4u);
    CHECK(lat->cells().size() == 9);
}

TEST_CASE("sampling and interpolation") {
    const auto lat = make_lattice(standard_triangle_partition(), 3);
    const Expression lin = Expression::parse("1 + 2*x - 3*y", 2);
    const GridFunction f = GridFunction::sample(lat, lin);
    CHECK(f.at(Point(0.5, 0.25)) == lin.evaluate(0.5, 0.25));
    CHECK_THROWS_AS(f.at(Point(0.3, 0.3)), InvalidArgument);
    CounterRng rng(4);
    for (int t = 0; t < 500; ++t) {
        const Point p = testsupport::triangle_point(rng);
        CHECK(std::abs(f.interpolate(p) - lin.evaluate(p)) <= 1e-12);
    }
    CHECK(f.sup_norm() == doctest::Approx(3.0));
}

TEST_CASE("non-finite samples are rejected") {
    const auto lat = make_lattice(interval_partition(2), 2);
    CHECK_THROWS_AS(GridFunction::sample(lat, Expression::parse("1 / x", 1)), EvaluationError);
    CHECK_THROWS_AS(GridFunction::sample(lat, Expression::parse("x^-1", 1)), EvaluationError);
}

TEST_CASE("misaligned construction") {
    const auto lat = make_lattice(interval_partition(2), 2);
    CHECK_THROWS_AS(GridFunction(lat, std::vector<double>(3, 0.0)), InvalidArgument);
}

}  // TEST_SUITE
