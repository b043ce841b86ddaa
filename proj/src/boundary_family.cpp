#include "pshenv/boundary_family.hpp"

#include "pshenv/annulus.hpp"
#include "pshenv/derivatives.hpp"
#include "pshenv/error.hpp"
#include "pshenv/hermitian.hpp"
#include "pshenv/kahler_potential.hpp"
#include "pshenv/reg_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pshenv {

bool BoundaryFamily::has(double eps) const noexcept {
    return std::any_of(levels.begin(), levels.end(), [eps](const FamilyLevel& l) { return l.eps == eps; });
}

const FamilyLevel& BoundaryFamily::level(double eps) const {
    for (const FamilyLevel& l : levels) {
        if (l.eps == eps) return l;
    }
    throw InputError("boundary family has no member at eps = " + std::to_string(eps));
}

std::vector<double> BoundaryFamily::eps_list() const {
    std::vector<double> e;
    for (const FamilyLevel& l : levels) e.push_back(l.eps);
    return e;
}

namespace {

void measure(FamilyLevel& lvl, const BaseForm& base, const SingularModel& model, double key_tol) {
    const Field& phi = lvl.phi_eps;
    const ProductGrid& g = phi.grid();

    const DerivativeStats ds = derivative_stats(phi, model.mask);
    double glob = 0.0, bnd = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const bool near = k <= 2 || k >= g.nt - 3;
        for (std::size_t p = 0; p < g.plane(); ++p) {
            const std::size_t i = p + g.plane() * static_cast<std::size_t>(k);
            if (!model.mask[i]) continue;
            const double w = (ds.grad[i] + ds.hess_norm[i]) * std::exp(model.B0 * model.psi[i]);
            glob = std::max(glob, w);
            if (near) bnd = std::max(bnd, w);
        }
    }
    lvl.deriv_global = glob;
    lvl.deriv_boundary = bnd;

    const HermitianFormField H = hermitian_hessian(phi, base, lvl.eps);
    const Field lam = min_eigenvalue(H, base);
    double margin = std::numeric_limits<double>::infinity();
    std::size_t node = 0;
    for (std::size_t j = 0; j < H.size(); ++j) {
        const std::size_t i = H.node(j);
        if (!model.mask[i]) continue;
        const double m = lam[i] - (std::exp(model.F[i]) + 0.5 * lvl.eps);
        if (m < margin) {
            margin = m;
            node = i;
        }
    }
    lvl.key_margin = margin;
    lvl.key_node = node;
    if (margin < -key_tol) {
        const std::size_t plane = g.plane();
        const auto k = node / plane;
        const auto i2 = (node % plane) / static_cast<std::size_t>(g.nx1());
        const auto i1 = node % static_cast<std::size_t>(g.nx1());
        std::ostringstream msg;
        msg << "build_boundary_family: key positivity fails at node (" << i1 << ", " << i2 << ", " << k
            << ") for eps = " << lvl.eps << ": lambda_min - (e^F + eps/2) = " << margin;
        throw InputError(msg.str());
    }
}

}  // namespace

BoundaryFamily build_boundary_family(const EndpointPair& ends, const BaseForm& base,
                                     const SingularModel& model, const std::vector<double>& eps_list,
                                     const FamilyOptions& opts) {
    const ProductGrid& g = model.grid;
    if (!(base.grid() == g.torus) || !(ends.phi0.grid() == g.torus) || !(ends.phi1.grid() == g.torus)) {
        throw InputError("build_boundary_family: inputs do not share the grid");
    }
    for (double e : eps_list) {
        if (!(e > 0.0 && e <= 1.0)) {
            throw InputError("build_boundary_family: eps must lie in (0, 1]");
        }
    }

    BoundaryFamily fam;
    fam.grid = g;
    fam.base = base;
    fam.endpoints = ends;
    fam.C_gap = gap_constant(ends);
    fam.beta0 = opts.beta0;
    fam.spread = opts.spread;
    fam.f = annulus_potential(g, base.metric, base.kappa_A);

    const double C = fam.C_gap;
    const Field p0 = pullback(ends.phi0, g);
    const Field p1 = pullback(ends.phi1, g);
    Field b1 = p0 - t_profile(g, [C](double t) { return C * t; });
    Field b2 = p1 - t_profile(g, [C](double t) { return C * (1.0 - t); });
    fam.phi = reg_max({&b1, &b2}, opts.spread) + fam.f;

    const SurfaceField v_ref = solve_kahler_potential(base, 1.0, opts.beta0);
    fam.v_sup_ref = v_ref.max();

    for (double eps : eps_list) {
        FamilyLevel lvl;
        lvl.eps = eps;
        lvl.v = solve_kahler_potential(base, 0.5 * eps, opts.beta0);
        for (double& x : lvl.v.values()) x -= fam.v_sup_ref;
        lvl.C_eps = -std::log(eps / 4.0) + C + 2.0;
        Field b3 = pullback(lvl.v, g);
        for (double& x : b3.values()) x -= lvl.C_eps;
        lvl.phi_eps = reg_max({&b1, &b2, &b3}, opts.spread) + fam.f;
        measure(lvl, base, model, opts.key_tolerance);
        fam.levels.push_back(std::move(lvl));
    }
    return fam;
}

}  // namespace pshenv
