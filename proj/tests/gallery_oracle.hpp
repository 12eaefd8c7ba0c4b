#pragma once

// Closed-form slant angles of the gallery fixtures, evaluated directly in double
// precision without the expression parser.

#include <cmath>
#include <string>

namespace slantkit::testing {

// cos(theta_j) as a function of r = |x|^2.
inline double gallery_cosine(const std::string& id, int j, double r, double g, double d) {
    const double jj = j;
    if (id == "ex1") return (jj * jj - 1) / (jj * jj + 1);
    if (id == "ex3") return (jj - 1) / std::sqrt(2 * (jj * jj + 1));
    if (id == "ex4") return (r + g) / std::sqrt(r * r + 2 * g * r + jj * jj * d * d + g * g);
    if (id == "ex5") return (r + g - 1) / std::sqrt(2 * r * r + 2 * (g + jj - 1) * r + g * g - 2 * g + jj * jj + 1);
    if (id == "ex8") {
        const double s = (jj - 1) * d + g;
        return (r + s) / std::sqrt(r * r + 2 * s * r + d * d + s * s);
    }
    return (r + jj + g - 2) / std::sqrt(2 * r * r + 2 * (jj + g - 1) * r + jj * jj + g * g + 2 * jj * g - 4 * (jj + g) + 5);
}

inline double gallery_theta(const std::string& id, int j, double r, double g, double d) {
    return std::acos(gallery_cosine(id, j, r, g, d));
}

}  // namespace slantkit::testing
