#pragma once

// Reference systems used across the suites.

#include <string>
#include <vector>

#include "hypersurf/fractal.hpp"

namespace testsupport {

inline const std::string kSeed = "5 + x^3 + y^2 + sin(2*pi*x)*sin(2*pi*y)";
inline const std::string kBase = "5 + x^3 + y^2";
// Agrees with kSeed on the depth-2 vertex set: the extra term cancels sin(2πx)sin(2πy) there.
inline const std::string kBaseDepth2 = "5 + x^3 + y^2 + sin(2*pi*x)*sin(2*pi*y) - sin(4*pi*x)*sin(4*pi*y)";

inline hypersurf::FractalSystem make_system(std::vector<double> alphas, const std::string& g = kSeed,
                                            const std::string& b = kBase, int depth = 1) {
    using namespace hypersurf;
    return FractalSystem(standard_triangle_partition(), depth, ScalingVector(std::move(alphas)),
                         Expression::parse(g, 2), Expression::parse(b, 2));
}

inline hypersurf::FractalSystem example_system() { return make_system({0.8, 0.8, 0.75, 0.75}); }

}  // namespace testsupport
