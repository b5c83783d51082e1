#pragma once

// Shared generators and independent oracles for the test suites.

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "hypersurf/geometry.hpp"
#include "hypersurf/rng.hpp"

namespace testsupport {

using hypersurf::CounterRng;
using hypersurf::Point;

inline double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); }

/// Uniform point of the unit triangle by rejection (independent of sample_uniform).
inline Point triangle_point(CounterRng& rng) {
    for (;;) {
        const double x = rng.next_uniform();
        const double y = rng.next_uniform();
        if (x + y <= 1.0) return Point(x, y);
    }
}

/// Point-in-triangle oracle by signed areas.
inline bool in_triangle(const Point& p, const Point& a, const Point& b, const Point& c, double tol) {
    auto cross = [](const Point& o, const Point& u, const Point& v) {
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0]);
    };
    const double area = cross(a, b, c);
    const double s1 = cross(a, b, p) / area;
    const double s2 = cross(b, c, p) / area;
    const double s3 = cross(c, a, p) / area;
    return s1 >= -tol && s2 >= -tol && s3 >= -tol;
}

/// Brute-force dyadic lattice of the unit triangle at depth k: all (i, j) / 2^k with i + j <= 2^k.
inline std::set<std::pair<long, long>> dyadic_lattice(int k) {
    const long d = 1L << k;
    std::set<std::pair<long, long>> out;
    for (long i = 0; i <= d; ++i)
        for (long j = 0; i + j <= d; ++j) out.insert({i, j});
    return out;
}

inline std::pair<long, long> to_dyadic(const Point& p, int k) {
    const double d = std::ldexp(1.0, k);
    return {std::lround(p[0] * d), std::lround(p[1] * d)};
}

}  // namespace testsupport
