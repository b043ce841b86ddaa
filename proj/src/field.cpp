#include "pshenv/field.hpp"

#include "pshenv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pshenv {

SurfaceField::SurfaceField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw InputError("surface field: value count does not match grid");
    }
}

SurfaceField SurfaceField::sample(const TorusGrid& grid,
                                  const std::function<double(double, double)>& f) {
    SurfaceField s(grid);
    for (int i2 = 0; i2 < grid.nx2; ++i2) {
        for (int i1 = 0; i1 < grid.nx1; ++i1) {
            s(i1, i2) = f(grid.x1(i1), grid.x2(i2));
        }
    }
    return s;
}

double SurfaceField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double SurfaceField::min() const { return *std::min_element(values_.begin(), values_.end()); }

Field::Field(const ProductGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw InputError("field: value count does not match grid");
    }
}

Field Field::sample(const ProductGrid& grid,
                    const std::function<double(double, double, double)>& f) {
    Field u(grid);
    for (int k = 0; k < grid.nt; ++k) {
        for (int i2 = 0; i2 < grid.nx2(); ++i2) {
            for (int i1 = 0; i1 < grid.nx1(); ++i1) {
                u(i1, i2, k) = f(grid.torus.x1(i1), grid.torus.x2(i2), grid.t(k));
            }
        }
    }
    return u;
}

SurfaceField Field::level(int k) const {
    const std::size_t n = grid_.plane();
    auto first = values_.begin() + static_cast<std::ptrdiff_t>(n * k);
    return SurfaceField(grid_.torus, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
}

void Field::set_level(int k, const SurfaceField& s) {
    if (!(s.grid() == grid_.torus)) {
        throw InputError("set_level: surface grid does not match");
    }
    std::copy(s.values().begin(), s.values().end(),
              values_.begin() + static_cast<std::ptrdiff_t>(grid_.plane() * k));
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Field::any_nan() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(*this, o, "field +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(*this, o, "field -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }

Field pullback(const SurfaceField& s, const ProductGrid& grid) {
    if (!(s.grid() == grid.torus)) {
        throw InputError("pullback: surface grid does not match product grid");
    }
    Field u(grid);
    for (int k = 0; k < grid.nt; ++k) u.set_level(k, s);
    return u;
}

Field t_profile(const ProductGrid& grid, const std::function<double(double)>& f) {
    Field u(grid);
    const std::size_t n = grid.plane();
    for (int k = 0; k < grid.nt; ++k) {
        const double v = f(grid.t(k));
        std::fill_n(u.storage().begin() + static_cast<std::ptrdiff_t>(n * k), n, v);
    }
    return u;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!(a.grid() == b.grid())) {
        throw InputError(std::string(what) + ": grid mismatch");
    }
}

double sup_distance(const Field& a, const Field& b) {
    require_same_grid(a, b, "sup_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

double sup_distance_interior(const Field& a, const Field& b) {
    require_same_grid(a, b, "sup_distance_interior");
    const auto& g = a.grid();
    double s = 0.0;
    for (std::size_t i = g.plane(); i < g.size() - g.plane(); ++i) {
        s = std::max(s, std::abs(a[i] - b[i]));
    }
    return s;
}

}  // namespace pshenv
