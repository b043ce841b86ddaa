#pragma once

#include "pshenv/base_form.hpp"

#include <vector>

namespace pshenv {

struct KahlerSolveOptions {
    int max_iter = 100;
    double tol = 1e-11;  ///< on sup |residual|
    double damping_min = 1.0 / (1 << 20);
};

/// v on the periodic X-grid solving the one-dimensional complex Monge-Ampère
/// equation
///   a + ε/2 + (v_x1x1 + v_x2x2)/4 = e^{β₀ v}
/// by damped Newton. The exponential makes the operator strictly monotone, so
/// the solution is unique and the Jacobian is negative definite.
/// Throws SolveError (with the residual history) on non-convergence.
SurfaceField solve_kahler_potential(const BaseForm& base, double eps, double beta0,
                                    const KahlerSolveOptions& opts = {});

/// sup |a + ε/2 + Δv/4 - e^{β₀ v}| for a candidate v.
double kahler_residual(const BaseForm& base, double eps, double beta0, const SurfaceField& v);

}  // namespace pshenv
