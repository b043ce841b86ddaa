#pragma once

#include "pshenv/base_form.hpp"
#include "pshenv/field.hpp"

#include <complex>
#include <vector>

namespace pshenv {

/// Which implementation of the stencil kernels to run.
enum class Exec {
    serial,    ///< plain nested loops, the reference
    parallel,  ///< fused OpenMP loops
};

/// Samples of g̃ = α + εω + i∂∂̄u at the interior nodes 0 < k < nt-1, in the
/// reduced coordinates z = x1 + i x2, w = t - iθ. Entry j belongs to product
/// node j + plane.
struct HermitianFormField {
    ProductGrid grid;
    std::vector<double> gzz;
    std::vector<double> gww;
    std::vector<std::complex<double>> gzw;

    std::size_t size() const noexcept { return gzz.size(); }
    std::size_t node(std::size_t j) const noexcept { return j + grid.plane(); }
    double det(std::size_t j) const noexcept { return gzz[j] * gww[j] - std::norm(gzw[j]); }
};

/// Centered second differences:
///   g_zz̄ = a + ε + (u_x1x1 + u_x2x2)/4,
///   g_ww̄ = ε ω_ww̄(t) + u_tt/4,
///   g_zw̄ = (u_x1t + i u_x2t)/4.
/// The t-boundary levels of u act as Dirichlet closure and must be finite.
HermitianFormField hermitian_hessian(const Field& u, const BaseForm& base, double eps,
                                     Exec exec = Exec::parallel);

/// g_zz̄ g_ww̄ - |g_zw̄|² at interior nodes; the two boundary levels are set to 0.
Field ma_density(const HermitianFormField& H);

/// Smallest eigenvalue of g̃ relative to ω (ω_zz̄ = 1, ω_ww̄ from the base),
/// at interior nodes; boundary levels are set to +inf.
Field min_eigenvalue(const HermitianFormField& H, const BaseForm& base);

/// Nodes failing (ε/2)·tr_g̃ ω ≥ bound, evaluated in the multiplied form
/// (ε/2)(g_ww̄ + ω_ww̄ g_zz̄) ≥ bound·det so that a determinant at roundoff
/// level counts as an unbounded trace rather than a sign flip.
std::size_t trace_bound_violations(const HermitianFormField& H, const BaseForm& base,
                                   double eps, double bound);

}  // namespace pshenv
