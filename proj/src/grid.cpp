#include "pshenv/grid.hpp"

#include "pshenv/error.hpp"

#include <cmath>
#include <string>

namespace pshenv {

namespace {

void check_periodic_count(const char* name, int n) {
    if (n < 8) {
        throw InputError(std::string(name) + " = " + std::to_string(n) + " is below the minimum of 8");
    }
    if (n % 2 != 0) {
        throw InputError(std::string(name) + " = " + std::to_string(n) + " must be even");
    }
}

}  // namespace

TorusGrid build_torus(int nx1, int nx2, bool offset) {
    check_periodic_count("nx1", nx1);
    check_periodic_count("nx2", nx2);
    return TorusGrid{nx1, nx2, offset};
}

ProductGrid build_grid(int nx1, int nx2, int nt, bool offset) {
    TorusGrid torus = build_torus(nx1, nx2, offset);
    if (nt < 9) {
        throw InputError("nt = " + std::to_string(nt) + " is below the minimum of 9");
    }
    return ProductGrid{torus, nt};
}

double periodic_distance(double a, double b) noexcept {
    double d = std::fmod(std::abs(a - b), 1.0);
    return std::min(d, 1.0 - d);
}

}  // namespace pshenv
