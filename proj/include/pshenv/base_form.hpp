#pragma once

#include "pshenv/field.hpp"

#include <cmath>

namespace pshenv {

/// Reference metric on the annulus factor, in the strip coordinate t.
enum class AnnulusMetric {
    euclidean,  ///< ω_ww̄ = κ_A e^{-2t}, the pullback of the Euclidean form
    flat,       ///< ω_ww̄ = κ_A, the strip form itself
};

/// The semipositive form α on X (coefficient a = α_zz̄) paired with the product
/// reference ω whose X-part is ω_zz̄ ≡ 1.
struct BaseForm {
    SurfaceField a;
    double kappa_A = 1.0;
    double eps_cap = 1.0;
    AnnulusMetric metric = AnnulusMetric::euclidean;

    double omega_ww(double t) const noexcept {
        return metric == AnnulusMetric::euclidean ? kappa_A * std::exp(-2.0 * t) : kappa_A;
    }
    const TorusGrid& grid() const noexcept { return a.grid(); }
};

/// a(x) = 1 - (λ/8)(cos 2πx1 + cos 2πx2), unnormalized; λ ∈ [0, 4].
BaseForm make_degenerate_form(double lambda, const TorusGrid& grid);

/// Rescales a by 1/max(a) so that 0 ≤ a ≤ 1.
BaseForm normalized(BaseForm base);

/// a ≡ value.
BaseForm make_constant_form(double value, const TorusGrid& grid,
                            AnnulusMetric metric = AnnulusMetric::euclidean);

}  // namespace pshenv
