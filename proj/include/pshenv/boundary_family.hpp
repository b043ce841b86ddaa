#pragma once

#include "pshenv/base_form.hpp"
#include "pshenv/field.hpp"
#include "pshenv/singular_model.hpp"

#include <vector>

namespace pshenv {

/// One member φ_ε of the boundary family together with what was measured on it.
struct FamilyLevel {
    double eps = 0.0;
    Field phi_eps;
    SurfaceField v;         ///< normalized Kähler potential entering φ_ε
    double C_eps = 0.0;     ///< offset subtracted from π*v
    double deriv_global = 0.0;    ///< sup (|∇φ_ε| + |∇²φ_ε|) e^{B₀ψ} over kept nodes
    double deriv_boundary = 0.0;  ///< same, restricted to the two t-levels next to each boundary
    double key_margin = 0.0;      ///< min over kept interior nodes of λ_min - (e^F + ε/2)
    std::size_t key_node = 0;     ///< node attaining key_margin
};

struct BoundaryFamily {
    ProductGrid grid;
    BaseForm base;
    EndpointPair endpoints;
    double C_gap = 0.0;
    double beta0 = 1.0;
    double v_sup_ref = 0.0;  ///< sup of the reference potential used to normalize v
    double spread = 0.5;
    Field f;                 ///< annulus potential
    Field phi;               ///< ε-free subsolution
    std::vector<FamilyLevel> levels;  ///< in the order of eps_list

    bool has(double eps) const noexcept;
    const FamilyLevel& level(double eps) const;
    const Field& phi_eps(double eps) const { return level(eps).phi_eps; }
    std::vector<double> eps_list() const;
};

struct FamilyOptions {
    double beta0 = 1.0;
    double spread = 0.5;
    /// Allowed shortfall in the discrete key positivity, to absorb the O(h²)
    /// error of second differences of a regularized maximum.
    double key_tolerance = 1e-9;
};

/// φ = reg_max{π*φ₀ - Ct, π*φ₁ - C(1-t)} + p*f, and for each ε
///   φ_ε = reg_max{π*φ₀ - Ct, π*φ₁ - C(1-t), π*v - C'} + p*f,
/// where v solves a + ε/4 + Δv/4 = e^{β₀v} shifted down by the sup of the
/// solution of a + 1/2 + Δv/4 = e^{β₀v}, and C' = -log(ε/4) + C + 2. Building
/// φ_ε from the potential at ε/2 turns the positivity e^ψ ω into the strengthened
///   α + εω + i∂∂̄φ_ε ≥ (e^F + ε/2) ω,
/// which is verified at every kept interior node.
/// Throws InputError naming the node on a key positivity violation.
BoundaryFamily build_boundary_family(const EndpointPair& ends, const BaseForm& base,
                                     const SingularModel& model, const std::vector<double>& eps_list,
                                     const FamilyOptions& opts = {});

}  // namespace pshenv
