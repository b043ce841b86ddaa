#include "pshenv/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pshenv::kernels {

namespace {

// Pointers to the nine x-rows a node at (i2, k) reads: rows i2-1, i2, i2+1 at
// levels k-1, k, k+1.
struct Rows {
    const double* c[3][3];  // [dk+1][d2+1]
};

inline Rows rows_at(const ProductGrid& g, const double* u, int i2, int k) {
    const TorusGrid& x = g.torus;
    const int r2[3] = {x.wrap2(i2 - 1), i2, x.wrap2(i2 + 1)};
    Rows r{};
    for (int dk = 0; dk < 3; ++dk) {
        for (int d2 = 0; d2 < 3; ++d2) {
            r.c[dk][d2] = u + g.index(0, r2[d2], k + dk - 1);
        }
    }
    return r;
}

struct Second {
    double u11, u22, utt, u1t, u2t;
};

inline Second second_differences(const Rows& R, int i1, int l, int r, double ih11, double ih22,
                                 double ihtt, double ih1t, double ih2t) {
    const double c = R.c[1][1][i1];
    Second s;
    s.u11 = (R.c[1][1][l] - 2.0 * c + R.c[1][1][r]) * ih11;
    s.u22 = (R.c[1][0][i1] - 2.0 * c + R.c[1][2][i1]) * ih22;
    s.utt = (R.c[0][1][i1] - 2.0 * c + R.c[2][1][i1]) * ihtt;
    s.u1t = (R.c[2][1][r] - R.c[0][1][r] - R.c[2][1][l] + R.c[0][1][l]) * ih1t;
    s.u2t = (R.c[2][2][i1] - R.c[0][2][i1] - R.c[2][0][i1] + R.c[0][0][i1]) * ih2t;
    return s;
}

struct Spacing {
    double ih11, ih22, ihtt, ih1t, ih2t;
    explicit Spacing(const ProductGrid& g) {
        const double h1 = g.torus.h1(), h2 = g.torus.h2(), ht = g.ht();
        ih11 = 1.0 / (h1 * h1);
        ih22 = 1.0 / (h2 * h2);
        ihtt = 1.0 / (ht * ht);
        ih1t = 1.0 / (4.0 * h1 * ht);
        ih2t = 1.0 / (4.0 * h2 * ht);
    }
};

}  // namespace

namespace omp {

void hermitian_hessian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> a, std::span<const double> omega_ww, double eps,
                       HermitianFormField& out) {
    const std::size_t n = grid.interior_size();
    out.grid = grid;
    out.gzz.resize(n);
    out.gww.resize(n);
    out.gzw.resize(n);

    const Spacing sp(grid);
    const int nx1 = grid.nx1(), nx2 = grid.nx2(), rows = nx2 * (grid.nt - 2);
    const double* up = u.data();

#pragma omp parallel for schedule(static)
    for (int row = 0; row < rows; ++row) {
        const int i2 = row % nx2;
        const int k = 1 + row / nx2;
        const Rows R = rows_at(grid, up, i2, k);
        const double* arow = a.data() + static_cast<std::size_t>(nx1) * i2;
        const double ew = eps * omega_ww[k];
        const std::size_t base = static_cast<std::size_t>(row) * nx1;
        for (int i1 = 0; i1 < nx1; ++i1) {
            const int l = i1 == 0 ? nx1 - 1 : i1 - 1;
            const int r = i1 == nx1 - 1 ? 0 : i1 + 1;
            const Second s = second_differences(R, i1, l, r, sp.ih11, sp.ih22, sp.ihtt, sp.ih1t, sp.ih2t);
            out.gzz[base + i1] = arow[i1] + eps + 0.25 * (s.u11 + s.u22);
            out.gww[base + i1] = ew + 0.25 * s.utt;
            out.gzw[base + i1] = {0.25 * s.u1t, 0.25 * s.u2t};
        }
    }
}

BermanSummary berman(const ProductGrid& grid, const BermanInputs& in, const BermanOutputs& out) {
    const Spacing sp(grid);
    const int nx1 = grid.nx1(), nx2 = grid.nx2(), rows = nx2 * (grid.nt - 2);
    const std::size_t plane = grid.plane();
    const double log_shift = 2.0 * std::log(in.eps / 4.0);
    const bool floored = in.eta > 0.0;
    const double log_eta = floored ? std::log(in.eta) : 0.0;
    const bool want_rho = !out.rho.empty();
    const bool want_jac = !out.jacobian.empty();
    const double* up = in.u.data();
    const double* hp = in.h.data();

    double sup_r = 0.0;
    double min_gzz = std::numeric_limits<double>::infinity();
    double min_rho = std::numeric_limits<double>::infinity();
    double min_lam = std::numeric_limits<double>::infinity();
    bool saw_nan = false;

#pragma omp parallel for schedule(static) reduction(max : sup_r) \
    reduction(min : min_gzz, min_rho, min_lam) reduction(|| : saw_nan)
    for (int row = 0; row < rows; ++row) {
        const int i2 = row % nx2;
        const int k = 1 + row / nx2;
        const Rows R = rows_at(grid, up, i2, k);
        const double* arow = in.a.data() + static_cast<std::size_t>(nx1) * i2;
        const double om = in.omega_ww[k];
        const double inv_om = 1.0 / om;
        const double ew = in.eps * om;
        const std::size_t base = static_cast<std::size_t>(row) * nx1;

        for (int i1 = 0; i1 < nx1; ++i1) {
            const int l = i1 == 0 ? nx1 - 1 : i1 - 1;
            const int r = i1 == nx1 - 1 ? 0 : i1 + 1;
            const Second s = second_differences(R, i1, l, r, sp.ih11, sp.ih22, sp.ihtt, sp.ih1t, sp.ih2t);
            const double gzz = arow[i1] + in.eps + 0.25 * (s.u11 + s.u22);
            const double gww = ew + 0.25 * s.utt;
            const double p = 0.25 * s.u1t, q = 0.25 * s.u2t;
            const double rho = (gzz * gww - (p * p + q * q)) * inv_om;

            const std::size_t j = base + i1;
            const std::size_t n = j + plane;
            const double lt = in.beta * (up[n] - hp[n]) + log_shift;
            double res;
            double sigma = 1.0;
            if (floored) {
                // log(τ + η) with τ = e^{lt}
                const double m = std::max(lt, log_eta);
                const double log_tau_eta = m + std::log1p(std::exp(-std::abs(lt - log_eta)));
                res = std::log(rho + in.eta) - log_tau_eta;
                sigma = 1.0 / (1.0 + std::exp(log_eta - lt));
            } else {
                res = std::log(rho) - lt;
            }
            out.residual[j] = res;
            if (want_rho) out.rho[j] = rho;

            if (std::isnan(res)) saw_nan = true;
            sup_r = std::max(sup_r, std::abs(res));
            min_gzz = std::min(min_gzz, gzz);
            min_rho = std::min(min_rho, rho);
            const double gw = gww * inv_om;
            const double disc = std::sqrt((gzz - gw) * (gzz - gw) + 4.0 * (p * p + q * q) * inv_om);
            const double lmax = 0.5 * (gzz + gw + disc);
            min_lam = std::min(min_lam, lmax > 0.0 ? rho / lmax : 0.5 * (gzz + gw - disc));

            if (!want_jac) continue;
            const double scale = inv_om / (rho + in.eta);
            const double wx1 = 0.25 * gww * sp.ih11 * scale;
            const double wx2 = 0.25 * gww * sp.ih22 * scale;
            const double wt = 0.25 * gzz * sp.ihtt * scale;
            const double c1 = -0.5 * p * sp.ih1t * scale;
            const double c2 = -0.5 * q * sp.ih2t * scale;
            double* J = out.jacobian.data() + j * kStencilWidth;
            J[0] = -2.0 * (wx1 + wx2 + wt) - in.beta * sigma;
            J[1] = wx1;
            J[2] = wx1;
            J[3] = wx2;
            J[4] = wx2;
            J[5] = wt;
            J[6] = wt;
            J[7] = c1;
            J[8] = -c1;
            J[9] = -c1;
            J[10] = c1;
            J[11] = c2;
            J[12] = -c2;
            J[13] = -c2;
            J[14] = c2;
        }
    }

    BermanSummary s;
    s.sup_residual = saw_nan ? std::numeric_limits<double>::infinity() : sup_r;
    s.min_gzz = min_gzz;
    s.min_rho = min_rho;
    s.min_lambda = min_lam;
    return s;
}

void complex_laplacian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out) {
    const Spacing sp(grid);
    const int nx1 = grid.nx1(), nx2 = grid.nx2(), rows = nx2 * (grid.nt - 2);
    const double* up = u.data();

#pragma omp parallel for schedule(static)
    for (int row = 0; row < rows; ++row) {
        const int i2 = row % nx2;
        const int k = 1 + row / nx2;
        const Rows R = rows_at(grid, up, i2, k);
        const double wt = 0.25 / omega_ww[k];
        const std::size_t base = static_cast<std::size_t>(row) * nx1;
        for (int i1 = 0; i1 < nx1; ++i1) {
            const int l = i1 == 0 ? nx1 - 1 : i1 - 1;
            const int r = i1 == nx1 - 1 ? 0 : i1 + 1;
            const double c = R.c[1][1][i1];
            const double u11 = (R.c[1][1][l] - 2.0 * c + R.c[1][1][r]) * sp.ih11;
            const double u22 = (R.c[1][0][i1] - 2.0 * c + R.c[1][2][i1]) * sp.ih22;
            const double utt = (R.c[0][1][i1] - 2.0 * c + R.c[2][1][i1]) * sp.ihtt;
            out[base + i1] = 0.25 * (u11 + u22) + wt * utt;
        }
    }
}

}  // namespace omp

BermanSummary berman(Exec exec, const ProductGrid& grid, const BermanInputs& in,
                     const BermanOutputs& out) {
    return exec == Exec::serial ? serial::berman(grid, in, out) : omp::berman(grid, in, out);
}

void complex_laplacian(Exec exec, const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out) {
    if (exec == Exec::serial) {
        serial::complex_laplacian(grid, u, omega_ww, out);
    } else {
        omp::complex_laplacian(grid, u, omega_ww, out);
    }
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace pshenv::kernels
