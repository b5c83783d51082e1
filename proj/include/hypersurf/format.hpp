#pragma once

#include <string>

#include "hypersurf/geometry.hpp"

namespace hypersurf {

/// Round-trip decimal form of a double (17 significant digits).
std::string fmt17(double v);

/// Short human-readable form (%.6g).
std::string fmt6(double v);

/// "(x, y)" or "(x)" with %.6g coordinates.
std::string point_string(const Point& p);

}  // namespace hypersurf
