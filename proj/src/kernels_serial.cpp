#include "pshenv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pshenv::kernels::serial {

namespace {

struct Entries {
    double gzz;
    double gww;
    std::complex<double> gzw;
};

Entries entries_at(const ProductGrid& g, std::span<const double> u, std::span<const double> a,
                   std::span<const double> omega_ww, double eps, int i1, int i2, int k) {
    const TorusGrid& x = g.torus;
    const int l = x.wrap1(i1 - 1), r = x.wrap1(i1 + 1);
    const int d = x.wrap2(i2 - 1), up = x.wrap2(i2 + 1);
    auto U = [&](int j1, int j2, int kk) { return u[g.index(j1, j2, kk)]; };

    const double h1 = x.h1(), h2 = x.h2(), ht = g.ht();
    const double c = U(i1, i2, k);
    const double u11 = (U(l, i2, k) - 2.0 * c + U(r, i2, k)) / (h1 * h1);
    const double u22 = (U(i1, d, k) - 2.0 * c + U(i1, up, k)) / (h2 * h2);
    const double utt = (U(i1, i2, k - 1) - 2.0 * c + U(i1, i2, k + 1)) / (ht * ht);
    const double u1t = (U(r, i2, k + 1) - U(r, i2, k - 1) - U(l, i2, k + 1) + U(l, i2, k - 1)) /
                       (4.0 * h1 * ht);
    const double u2t = (U(i1, up, k + 1) - U(i1, up, k - 1) - U(i1, d, k + 1) + U(i1, d, k - 1)) /
                       (4.0 * h2 * ht);

    Entries e;
    e.gzz = a[x.index(i1, i2)] + eps + 0.25 * (u11 + u22);
    e.gww = eps * omega_ww[k] + 0.25 * utt;
    e.gzw = std::complex<double>(0.25 * u1t, 0.25 * u2t);
    return e;
}

double log_add_exp(double p, double q) {
    const double m = std::max(p, q);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log1p(std::exp(-std::abs(p - q)));
}

}  // namespace

void hermitian_hessian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> a, std::span<const double> omega_ww, double eps,
                       HermitianFormField& out) {
    out.grid = grid;
    out.gzz.assign(grid.interior_size(), 0.0);
    out.gww.assign(grid.interior_size(), 0.0);
    out.gzw.assign(grid.interior_size(), {});
    for (int k = 1; k < grid.nt - 1; ++k) {
        for (int i2 = 0; i2 < grid.nx2(); ++i2) {
            for (int i1 = 0; i1 < grid.nx1(); ++i1) {
                const Entries e = entries_at(grid, u, a, omega_ww, eps, i1, i2, k);
                const std::size_t j = grid.index(i1, i2, k) - grid.plane();
                out.gzz[j] = e.gzz;
                out.gww[j] = e.gww;
                out.gzw[j] = e.gzw;
            }
        }
    }
}

BermanSummary berman(const ProductGrid& grid, const BermanInputs& in, const BermanOutputs& out) {
    const TorusGrid& x = grid.torus;
    const double h1 = x.h1(), h2 = x.h2(), ht = grid.ht();
    const double log_shift = 2.0 * std::log(in.eps / 4.0);
    const double log_eta = in.eta > 0.0 ? std::log(in.eta) : -std::numeric_limits<double>::infinity();

    BermanSummary s;
    s.sup_residual = 0.0;
    s.min_gzz = std::numeric_limits<double>::infinity();
    s.min_rho = std::numeric_limits<double>::infinity();
    s.min_lambda = std::numeric_limits<double>::infinity();

    for (int k = 1; k < grid.nt - 1; ++k) {
        const double om = in.omega_ww[k];
        for (int i2 = 0; i2 < grid.nx2(); ++i2) {
            for (int i1 = 0; i1 < grid.nx1(); ++i1) {
                const Entries e = entries_at(grid, in.u, in.a, in.omega_ww, in.eps, i1, i2, k);
                const std::size_t n = grid.index(i1, i2, k);
                const std::size_t j = n - grid.plane();

                const double det = e.gzz * e.gww - std::norm(e.gzw);
                const double rho = det / om;
                const double lt = in.beta * (in.u[n] - in.h[n]) + log_shift;

                double r;
                if (in.eta > 0.0) {
                    r = std::log(rho + in.eta) - log_add_exp(lt, log_eta);
                } else {
                    r = std::log(rho) - lt;
                }
                out.residual[j] = r;
                if (!out.rho.empty()) out.rho[j] = rho;

                s.sup_residual = std::max(s.sup_residual, std::abs(r));
                if (std::isnan(r)) s.sup_residual = std::numeric_limits<double>::infinity();
                s.min_gzz = std::min(s.min_gzz, e.gzz);
                s.min_rho = std::min(s.min_rho, rho);

                const double gw = e.gww / om;
                const double tr = e.gzz + gw;
                const double disc = std::sqrt((e.gzz - gw) * (e.gzz - gw) + 4.0 * std::norm(e.gzw) / om);
                const double lmax = 0.5 * (tr + disc);
                const double lmin = lmax > 0.0 ? rho / lmax : 0.5 * (tr - disc);
                s.min_lambda = std::min(s.min_lambda, lmin);

                if (out.jacobian.empty()) continue;

                const double scale = 1.0 / (om * (rho + in.eta));
                const double sigma =
                    in.eta > 0.0 ? 1.0 / (1.0 + std::exp(log_eta - lt)) : 1.0;
                const double wx1 = 0.25 * e.gww / (h1 * h1);
                const double wx2 = 0.25 * e.gww / (h2 * h2);
                const double wt = 0.25 * e.gzz / (ht * ht);
                const double c1 = -0.5 * e.gzw.real() / (4.0 * h1 * ht);
                const double c2 = -0.5 * e.gzw.imag() / (4.0 * h2 * ht);

                double* J = out.jacobian.data() + j * kStencilWidth;
                J[0] = -2.0 * (wx1 + wx2 + wt) * scale - in.beta * sigma;
                J[1] = wx1 * scale;
                J[2] = wx1 * scale;
                J[3] = wx2 * scale;
                J[4] = wx2 * scale;
                J[5] = wt * scale;
                J[6] = wt * scale;
                // (d1, dk) corners: sign d1·dk
                J[7] = c1 * scale;    // (-1, -1)
                J[8] = -c1 * scale;   // (-1, +1)
                J[9] = -c1 * scale;   // (+1, -1)
                J[10] = c1 * scale;   // (+1, +1)
                J[11] = c2 * scale;
                J[12] = -c2 * scale;
                J[13] = -c2 * scale;
                J[14] = c2 * scale;
            }
        }
    }
    return s;
}

void complex_laplacian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out) {
    const TorusGrid& x = grid.torus;
    const double h1 = x.h1(), h2 = x.h2(), ht = grid.ht();
    for (int k = 1; k < grid.nt - 1; ++k) {
        for (int i2 = 0; i2 < grid.nx2(); ++i2) {
            for (int i1 = 0; i1 < grid.nx1(); ++i1) {
                auto U = [&](int j1, int j2, int kk) {
                    return u[grid.index(x.wrap1(j1), x.wrap2(j2), kk)];
                };
                const double c = U(i1, i2, k);
                const double u11 = (U(i1 - 1, i2, k) - 2.0 * c + U(i1 + 1, i2, k)) / (h1 * h1);
                const double u22 = (U(i1, i2 - 1, k) - 2.0 * c + U(i1, i2 + 1, k)) / (h2 * h2);
                const double utt = (U(i1, i2, k - 1) - 2.0 * c + U(i1, i2, k + 1)) / (ht * ht);
                out[grid.index(i1, i2, k) - grid.plane()] =
                    0.25 * (u11 + u22) + 0.25 * utt / omega_ww[k];
            }
        }
    }
}

}  // namespace pshenv::kernels::serial
