#pragma once

#include "pshenv/base_form.hpp"
#include "pshenv/field.hpp"

namespace pshenv {

/// Rotationally symmetric potential of the annulus reference form in the strip
/// coordinate, vanishing at t = 0 and t = 1. For the Euclidean metric,
///   f(t) = κ_A (e^{-2t} - (e^{-2} - 1) t - 1),  f_tt/4 = κ_A e^{-2t};
/// for the flat metric, f(t) = 2κ_A t(t - 1),  f_tt/4 = κ_A.
double annulus_potential_value(double t, AnnulusMetric metric = AnnulusMetric::euclidean,
                               double kappa_A = 1.0) noexcept;

/// p*f sampled on the product grid.
Field annulus_potential(const ProductGrid& grid, AnnulusMetric metric = AnnulusMetric::euclidean,
                        double kappa_A = 1.0);

}  // namespace pshenv
