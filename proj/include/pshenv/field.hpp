#pragma once

#include "pshenv/grid.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pshenv {

/// Real samples on the torus grid (a function on X, independent of t).
class SurfaceField {
public:
    SurfaceField() = default;
    explicit SurfaceField(const TorusGrid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    SurfaceField(const TorusGrid& grid, std::vector<double> values);

    /// Samples f(x1, x2) at every node.
    static SurfaceField sample(const TorusGrid& grid,
                               const std::function<double(double, double)>& f);

    const TorusGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double& operator()(int i1, int i2) { return values_[grid_.index(i1, i2)]; }
    double operator()(int i1, int i2) const { return values_[grid_.index(i1, i2)]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double max() const;
    double min() const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// Real samples on the product grid. Solver unknowns must stay finite;
/// singular model evaluations may hold -inf but never NaN.
class Field {
public:
    Field() = default;
    explicit Field(const ProductGrid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    Field(const ProductGrid& grid, std::vector<double> values);

    static Field sample(const ProductGrid& grid,
                        const std::function<double(double, double, double)>& f);

    const ProductGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double& operator()(int i1, int i2, int k) { return values_[grid_.index(i1, i2, k)]; }
    double operator()(int i1, int i2, int k) const { return values_[grid_.index(i1, i2, k)]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& storage() noexcept { return values_; }

    /// The t-level k as a surface field.
    SurfaceField level(int k) const;
    void set_level(int k, const SurfaceField& s);

    double max() const;
    double min() const;
    bool all_finite() const;
    bool any_nan() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

private:
    ProductGrid grid_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);

/// π*s: extends a surface field constantly in t.
Field pullback(const SurfaceField& s, const ProductGrid& grid);

/// Extends a function of t constantly in x.
Field t_profile(const ProductGrid& grid, const std::function<double(double)>& f);

/// sup |a - b| over all nodes. Throws InputError on grid mismatch.
double sup_distance(const Field& a, const Field& b);

/// sup |a - b| over nodes with 0 < k < nt-1.
double sup_distance_interior(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b, const char* what);

}  // namespace pshenv
