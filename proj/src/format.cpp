#include "hypersurf/format.hpp"

#include <cstdio>

namespace hypersurf {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string point_string(const Point& p) {
    if (p.dim == 1) return "(" + fmt6(p[0]) + ")";
    return "(" + fmt6(p[0]) + ", " + fmt6(p[1]) + ")";
}

}  // namespace hypersurf
