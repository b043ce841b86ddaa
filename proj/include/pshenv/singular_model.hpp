#pragma once

#include "pshenv/base_form.hpp"
#include "pshenv/derivatives.hpp"
#include "pshenv/field.hpp"

#include <array>
#include <vector>

namespace pshenv {

/// Endpoint potentials φ₀ (at t = 0) and φ₁ (at t = 1) on X.
struct EndpointPair {
    SurfaceField phi0;
    SurfaceField phi1;
};

/// The gap constant C with φ₁ - (C-1) ≤ φ₀ ≤ φ₁ + (C-1), padded by 1/16 so the
/// regularized maximum reproduces the endpoint exactly on each boundary level.
double gap_constant(const EndpointPair& ends);

/// S(x) = sin²(πx1) + sin²(πx2); vanishes only at the lattice point (0, 0).
double log_model_S(double x1, double x2) noexcept;

/// Singular weight ψ = (c/2) log S + shift, degeneracy profile F with
/// e^F = (1 + 1/a₀ + 1/a₁)⁻¹ ≤ min(1, a₀, a₁) and the combination ψ̃ = ψ + (δ/2C) F with
/// B₀ = 2C/δ, C the measured quasi-psh constant of F.
struct SingularModel {
    ProductGrid grid;
    double c = 0.0;  ///< log coefficient; 0 gives a bounded weight
    double delta = 1.0;
    double C_F = 1.0;  ///< quasi-psh constant: i∂∂̄F ≥ -C_F ω off the mask
    double B0 = 2.0;
    double c_pos = 1.0;
    double psi_shift = 0.0;  ///< ψ = (c/2) log S + psi_shift
    double F_shift = 0.0;    ///< subtracted so that sup F ≤ 0 on kept nodes
    double mask_radius = 0.0;
    std::vector<std::array<double, 2>> singular_points;

    Field psi;
    Field F;
    Field tilde_psi;
    NodeMask mask;  ///< 1 where a node is kept (outside the singular neighbourhoods)

    /// sup over kept nodes of (|∇ψ| + |∇²ψ|) e^{B₀ψ}.
    double certificate_constant = 0.0;

    double psi_at(double x1, double x2) const noexcept;
    bool masked(std::size_t node) const noexcept { return mask[node] == 0; }
};

struct SingularModelOptions {
    double mask_cells = 4.0;  ///< mask radius in grid cells around each singular point
};

/// Builds ψ from the log model, F from the endpoints' X-factor densities
/// a_i = a + Δφ_i/4, and ψ̃. The harmonic combination keeps F smooth where the
/// two densities cross, so C_F stays bounded under refinement. ψ is normalized to sup = -1 and then
/// lowered further if needed so that ψ ≤ max(φ₀ - Ct, φ₁ - C(1-t)) + f ≤ φ on
/// the grid. c = 0 is accepted and gives a bounded model.
/// Throws InputError when a_φ < 0 somewhere, or when F is not finite on a kept
/// node.
SingularModel make_singular_model(double c, const BaseForm& base, const EndpointPair& ends,
                                  double delta, int nt, const SingularModelOptions& opts = {});

/// sup over kept nodes of (|∇ψ| + |∇²ψ|) e^{Bψ}.
double psi_certificate(const SingularModel& m, double B);

/// Node mask of points at periodic distance ≥ radius from every point.
NodeMask distance_mask(const ProductGrid& grid, const std::vector<std::array<double, 2>>& points,
                       double radius);

/// s_zz̄ = (s_x1x1 + s_x2x2)/4 on the torus, five-point stencil.
SurfaceField ddbar_x(const SurfaceField& s);

}  // namespace pshenv
