#include "pshenv/hermitian.hpp"

#include "pshenv/error.hpp"
#include "pshenv/kernels.hpp"

#include <cmath>
#include <limits>

namespace pshenv {

namespace {

std::vector<double> omega_levels(const ProductGrid& grid, const BaseForm& base) {
    std::vector<double> w(grid.nt);
    for (int k = 0; k < grid.nt; ++k) w[k] = base.omega_ww(grid.t(k));
    return w;
}

}  // namespace

HermitianFormField hermitian_hessian(const Field& u, const BaseForm& base, double eps, Exec exec) {
    const ProductGrid& g = u.grid();
    if (!(base.grid() == g.torus)) {
        throw InputError("hermitian_hessian: base form lives on a different torus grid");
    }
    if (!(eps >= 0.0)) {
        throw InputError("hermitian_hessian: eps must be nonnegative");
    }
    for (int k : {0, g.nt - 1}) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                if (!std::isfinite(u(i1, i2, k))) {
                    throw InputError("hermitian_hessian: Dirichlet data missing at t-boundary level " +
                                     std::to_string(k));
                }
            }
        }
    }
    const std::vector<double> om = omega_levels(g, base);
    HermitianFormField H;
    if (exec == Exec::serial) {
        kernels::serial::hermitian_hessian(g, u.values(), base.a.values(), om, eps, H);
    } else {
        kernels::omp::hermitian_hessian(g, u.values(), base.a.values(), om, eps, H);
    }
    return H;
}

Field ma_density(const HermitianFormField& H) {
    Field d(H.grid, 0.0);
    for (std::size_t j = 0; j < H.size(); ++j) d[H.node(j)] = H.det(j);
    return d;
}

Field min_eigenvalue(const HermitianFormField& H, const BaseForm& base) {
    Field lam(H.grid, std::numeric_limits<double>::infinity());
    const std::size_t plane = H.grid.plane();
    for (std::size_t j = 0; j < H.size(); ++j) {
        const int k = static_cast<int>(H.node(j) / plane);
        const double om = base.omega_ww(H.grid.t(k));
        const double gw = H.gww[j] / om;
        const double disc =
            std::sqrt((H.gzz[j] - gw) * (H.gzz[j] - gw) + 4.0 * std::norm(H.gzw[j]) / om);
        const double lmax = 0.5 * (H.gzz[j] + gw + disc);
        lam[H.node(j)] = lmax > 0.0 ? (H.det(j) / om) / lmax : 0.5 * (H.gzz[j] + gw - disc);
    }
    return lam;
}

std::size_t trace_bound_violations(const HermitianFormField& H, const BaseForm& base, double eps,
                                   double bound) {
    const std::size_t plane = H.grid.plane();
    std::size_t bad = 0;
    for (std::size_t j = 0; j < H.size(); ++j) {
        const int k = static_cast<int>(H.node(j) / plane);
        const double om = base.omega_ww(H.grid.t(k));
        // tr_g̃ ω = (ω_zz̄ g_ww̄ + ω_ww̄ g_zz̄) / det g̃ with ω_zz̄ = 1
        const double lhs = 0.5 * eps * (H.gww[j] + om * H.gzz[j]);
        if (!(lhs >= bound * H.det(j))) ++bad;
    }
    return bad;
}

}  // namespace pshenv
