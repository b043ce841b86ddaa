#include "pshenv/annulus.hpp"

#include <cmath>

namespace pshenv {

double annulus_potential_value(double t, AnnulusMetric metric, double kappa_A) noexcept {
    if (metric == AnnulusMetric::flat) return 2.0 * kappa_A * t * (t - 1.0);
    return kappa_A * (std::exp(-2.0 * t) - (std::exp(-2.0) - 1.0) * t - 1.0);
}

Field annulus_potential(const ProductGrid& grid, AnnulusMetric metric, double kappa_A) {
    return t_profile(grid, [=](double t) { return annulus_potential_value(t, metric, kappa_A); });
}

}  // namespace pshenv
