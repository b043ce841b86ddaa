#pragma once

#include "pshenv/boundary_family.hpp"
#include "pshenv/field.hpp"
#include "pshenv/singular_model.hpp"

#include <string>
#include <vector>

namespace pshenv {

/// Solution of Δ_ω h = rhs with Dirichlet data, where throughout
///   Δ_ω u = u_zz̄/ω_zz̄ + u_ww̄/ω_ww̄ = (u_x1x1 + u_x2x2)/4 + u_tt/(4 ω_ww̄).
struct ObstacleSolution {
    Field h;
    double eps = 0.0;              ///< family member used as boundary data; 0 for the barrier
    double residual_norm = 0.0;    ///< relative residual of the linear system
};

/// Solves Δ_ω u = rhs (constant) with u = boundary on the two t-levels. The
/// operator is diagonalized by the periodic FFT in x, leaving one tridiagonal
/// system in t per Fourier mode.
/// Throws SolveError if the relative residual exceeds 1e-10.
ObstacleSolution solve_dirichlet(const Field& boundary, const BaseForm& base, double rhs);

/// h_ε: Δ_ω h = -4 (twice the complex dimension) with h = φ_ε on t = 0, 1.
ObstacleSolution solve_obstacle(const BoundaryFamily& family, double eps);

/// b: Δ_ω b = -1 with b = 0 on t = 0, 1.
ObstacleSolution solve_barrier(const ProductGrid& grid, const BaseForm& base);

struct CertificateEntry {
    int order = 0;
    double B = 0.0;            ///< smallest stable exponent on the ladder, or -1 if none
    double weighted_sup = 0.0;         ///< coarse-grid sup |∇^j h| e^{Bψ}
    double refinement_ratio = 0.0;     ///< fine / coarse weighted sup
};

struct CertificateReport {
    std::vector<CertificateEntry> entries;
    bool barrier_sandwich = false;  ///< h_ε ≤ φ_ε + e^{-Bψ} b holds at barrier_B
    double barrier_B = 0.0;         ///< smallest scanned B for the sandwich, or -1 if none
};

/// For each order j ≤ max_order, scans B over the ladder for the smallest
/// exponent whose weighted sup over kept nodes of |∇^j h| e^{Bψ} changes by at
/// most a factor 2 between `coarse` and `fine`. The barrier sandwich is then
/// scanned from the largest certified exponent upward: the rest of the ladder,
/// then doubling up to B = 64. Report only.
CertificateReport appendix_certificates(const ObstacleSolution& coarse, const SingularModel& coarse_model,
                                        const ObstacleSolution& fine, const SingularModel& fine_model,
                                        const BoundaryFamily& coarse_family, const ObstacleSolution& barrier,
                                        int max_order = 2,
                                        const std::vector<double>& ladder = {0.0, 1.0, 2.0, 4.0, 8.0});

std::string to_json(const CertificateReport& r);

}  // namespace pshenv
