#pragma once

#include <cstddef>
#include <cstdint>

namespace pshenv {

/// Uniform periodic grid on the unit torus T² = R²/Z², the model for X.
///
/// Node (i1, i2) sits at ((i1 + s)/nx1, (i2 + s)/nx2) with s = 1/2 when the
/// half-cell offset is enabled and s = 0 otherwise. With the offset on, no node
/// lands on a lattice point k/nx, which keeps the log singularities of the model
/// weights off the grid.
struct TorusGrid {
    int nx1 = 0;
    int nx2 = 0;
    bool offset = false;

    std::size_t size() const noexcept { return static_cast<std::size_t>(nx1) * nx2; }
    double h1() const noexcept { return 1.0 / nx1; }
    double h2() const noexcept { return 1.0 / nx2; }
    double shift() const noexcept { return offset ? 0.5 : 0.0; }
    double x1(int i1) const noexcept { return (i1 + shift()) / nx1; }
    double x2(int i2) const noexcept { return (i2 + shift()) / nx2; }

    std::size_t index(int i1, int i2) const noexcept {
        return static_cast<std::size_t>(i1) + static_cast<std::size_t>(nx1) * i2;
    }
    int wrap1(int i1) const noexcept { return ((i1 % nx1) + nx1) % nx1; }
    int wrap2(int i2) const noexcept { return ((i2 % nx2) + nx2) % nx2; }

    bool operator==(const TorusGrid&) const = default;
};

/// Discretization of M = T² × [0, 1] in reduced coordinates (x1, x2, t):
/// periodic in x, Dirichlet in t. The t-axis carries nt nodes including both
/// boundary lines, so h_t = 1/(nt - 1). Storage order is x1 fastest, then x2,
/// then t.
struct ProductGrid {
    TorusGrid torus;
    int nt = 0;

    int nx1() const noexcept { return torus.nx1; }
    int nx2() const noexcept { return torus.nx2; }
    std::size_t plane() const noexcept { return torus.size(); }
    std::size_t size() const noexcept { return plane() * static_cast<std::size_t>(nt); }
    double ht() const noexcept { return 1.0 / (nt - 1); }
    double t(int k) const noexcept { return static_cast<double>(k) / (nt - 1); }

    std::size_t index(int i1, int i2, int k) const noexcept {
        return torus.index(i1, i2) + plane() * static_cast<std::size_t>(k);
    }
    bool is_boundary_level(int k) const noexcept { return k == 0 || k == nt - 1; }
    /// Number of nodes strictly inside the t-interval.
    std::size_t interior_size() const noexcept {
        return plane() * static_cast<std::size_t>(nt - 2);
    }

    bool operator==(const ProductGrid&) const = default;
};

/// Validates counts and returns the torus grid. Throws InputError when either
/// count is below 8 or odd.
TorusGrid build_torus(int nx1, int nx2, bool offset);

/// Validates counts and returns the product grid. Throws InputError when the
/// torus counts are invalid or nt < 9.
ProductGrid build_grid(int nx1, int nx2, int nt, bool offset);

/// Periodic distance on the unit circle.
double periodic_distance(double a, double b) noexcept;

}  // namespace pshenv
