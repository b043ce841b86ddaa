#include "pshenv/obstacle.hpp"

#include "pshenv/derivatives.hpp"
#include "pshenv/error.hpp"

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace pshenv {

namespace {

// y = A u for the row-scaled operator -(ω_ww̄ (u_11 + u_22) + u_tt) on interior
// levels, with boundary levels of u taken as given.
void apply_dirichlet(const ProductGrid& g, const std::vector<double>& om, const Field& u,
                     std::vector<double>& y) {
    const TorusGrid& x = g.torus;
    const double i11 = 1.0 / (x.h1() * x.h1()), i22 = 1.0 / (x.h2() * x.h2());
    const double itt = 1.0 / (g.ht() * g.ht());
    y.assign(g.interior_size(), 0.0);
    for (int k = 1; k < g.nt - 1; ++k) {
        for (int i2 = 0; i2 < x.nx2; ++i2) {
            for (int i1 = 0; i1 < x.nx1; ++i1) {
                const double c = u(i1, i2, k);
                const double lx = (u(x.wrap1(i1 - 1), i2, k) + u(x.wrap1(i1 + 1), i2, k) - 2.0 * c) * i11 +
                                  (u(i1, x.wrap2(i2 - 1), k) + u(i1, x.wrap2(i2 + 1), k) - 2.0 * c) * i22;
                const double lt = (u(i1, i2, k - 1) + u(i1, i2, k + 1) - 2.0 * c) * itt;
                y[g.index(i1, i2, k) - g.plane()] = -(om[k] * lx + lt);
            }
        }
    }
}

}  // namespace

ObstacleSolution solve_dirichlet(const Field& boundary, const BaseForm& base, double rhs) {
    const ProductGrid& g = boundary.grid();
    if (!(base.grid() == g.torus)) {
        throw InputError("solve_dirichlet: base form lives on a different grid");
    }
    if (!boundary.all_finite()) throw InputError("solve_dirichlet: non-finite boundary data");
    const TorusGrid& x = g.torus;
    const std::size_t plane = g.plane();
    const int nlev = g.nt - 2;
    const int nc1 = x.nx1 / 2 + 1;
    const std::size_t cplane = static_cast<std::size_t>(nc1) * x.nx2;
    const double i11 = 1.0 / (x.h1() * x.h1()), i22 = 1.0 / (x.h2() * x.h2());
    const double itt = 1.0 / (g.ht() * g.ht());
    std::vector<double> om(g.nt);
    for (int k = 0; k < g.nt; ++k) om[k] = base.omega_ww(g.t(k));

    // Right-hand side of -(ω_ww̄ (u_11 + u_22) + u_tt) = -4 ω_ww̄ rhs with the
    // Dirichlet levels moved across.
    std::vector<double> b(g.interior_size());
    for (int k = 1; k < g.nt - 1; ++k) {
        for (std::size_t p = 0; p < plane; ++p) {
            double r = -4.0 * om[k] * rhs;
            if (k == 1) r += itt * boundary[p];
            if (k == g.nt - 2) r += itt * boundary[p + plane * (g.nt - 1)];
            b[(k - 1) * plane + p] = r;
        }
    }

    // The operator is diagonal in the periodic Fourier modes of each level, which
    // leaves one tridiagonal system in t per mode.
    std::vector<std::complex<double>> bh(cplane * nlev);
    const int dims[2] = {x.nx2, x.nx1};
    fftw_plan fwd = fftw_plan_many_dft_r2c(2, dims, nlev, b.data(), nullptr, 1, static_cast<int>(plane),
                                           reinterpret_cast<fftw_complex*>(bh.data()), nullptr, 1,
                                           static_cast<int>(cplane), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    std::vector<double> c(nlev);
    for (int m2 = 0; m2 < x.nx2; ++m2) {
        const double s2 = std::sin(std::numbers::pi * m2 / x.nx2);
        for (int m1 = 0; m1 < nc1; ++m1) {
            const double s1 = std::sin(std::numbers::pi * m1 / x.nx1);
            const double mu = 4.0 * (i11 * s1 * s1 + i22 * s2 * s2);
            const std::size_t p = static_cast<std::size_t>(m1) + static_cast<std::size_t>(nc1) * m2;
            // Thomas sweep; diagonally dominant, no pivoting needed.
            double cprev = 0.0;
            for (int l = 0; l < nlev; ++l) {
                const double diag = om[l + 1] * mu + 2.0 * itt;
                const double den = diag + itt * cprev;
                c[l] = -itt / den;
                auto& v = bh[l * cplane + p];
                v = (l > 0 ? v + itt * bh[(l - 1) * cplane + p] : v) / den;
                cprev = c[l];
            }
            for (int l = nlev - 2; l >= 0; --l) bh[l * cplane + p] -= c[l] * bh[(l + 1) * cplane + p];
        }
    }

    std::vector<double> sol(g.interior_size());
    fftw_plan inv = fftw_plan_many_dft_c2r(2, dims, nlev, reinterpret_cast<fftw_complex*>(bh.data()), nullptr, 1,
                                           static_cast<int>(cplane), sol.data(), nullptr, 1,
                                           static_cast<int>(plane), FFTW_ESTIMATE);
    fftw_execute(inv);
    fftw_destroy_plan(inv);
    const double scale = 1.0 / static_cast<double>(plane);

    ObstacleSolution s;
    s.h = boundary;
    for (std::size_t i = 0; i < sol.size(); ++i) s.h[i + plane] = sol[i] * scale;

    std::vector<double> Ah;
    apply_dirichlet(g, om, s.h, Ah);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < Ah.size(); ++i) {
        const double r = Ah[i] + 4.0 * om[1 + i / plane] * rhs;
        rn += r * r;
        bn += b[i] * b[i];
    }
    const double rel = std::sqrt(rn) / std::max(std::sqrt(bn), 1e-300);
    if (!(rel <= 1e-10)) {
        throw SolveError("solve_dirichlet: relative residual " + std::to_string(rel) + " exceeds 1e-10");
    }
    s.residual_norm = rel;
    return s;
}

ObstacleSolution solve_obstacle(const BoundaryFamily& family, double eps) {
    ObstacleSolution s = solve_dirichlet(family.phi_eps(eps), family.base, -4.0);
    s.eps = eps;
    return s;
}

ObstacleSolution solve_barrier(const ProductGrid& grid, const BaseForm& base) {
    return solve_dirichlet(Field(grid, 0.0), base, -1.0);
}

namespace {

constexpr double kMaxBarrierB = 64.0;

Field derivative_of_order(const Field& h, const NodeMask& mask, int order) {
    if (order == 0) {
        Field a = h;
        for (double& v : a.values()) v = std::abs(v);
        return a;
    }
    if (order == 3) return third_derivative_norm(h, mask);
    const DerivativeStats ds = derivative_stats(h, mask);
    return order == 1 ? ds.grad : ds.hess_norm;
}

double weighted_sup(const Field& d, const SingularModel& m, double B) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (m.mask[i]) s = std::max(s, d[i] * std::exp(B * m.psi[i]));
    }
    return s;
}

}  // namespace

CertificateReport appendix_certificates(const ObstacleSolution& coarse, const SingularModel& coarse_model,
                                        const ObstacleSolution& fine, const SingularModel& fine_model,
                                        const BoundaryFamily& coarse_family, const ObstacleSolution& barrier,
                                        int max_order, const std::vector<double>& ladder) {
    CertificateReport rep;
    double sandwich_B = 0.0;
    for (int j = 1; j <= max_order; ++j) {
        const Field dc = derivative_of_order(coarse.h, coarse_model.mask, j);
        const Field df = derivative_of_order(fine.h, fine_model.mask, j);
        CertificateEntry e;
        e.order = j;
        e.B = -1.0;
        for (double B : ladder) {
            const double sc = weighted_sup(dc, coarse_model, B);
            const double sf = weighted_sup(df, fine_model, B);
            // Sups at roundoff level (vanishing derivatives) count as stable.
            const bool negligible = sc < 1e-9 && sf < 1e-9;
            const double ratio = negligible ? 1.0 : (sc > 0.0 ? sf / sc : INFINITY);
            e.weighted_sup = sc;
            e.refinement_ratio = ratio;
            if (ratio <= 2.0 && ratio >= 0.5) {
                e.B = B;
                break;
            }
        }
        sandwich_B = std::max(sandwich_B, e.B);
        rep.entries.push_back(e);
    }

    const Field& phi = coarse_family.phi_eps(coarse.eps);
    auto sandwich_holds = [&](double B) {
        for (std::size_t i = 0; i < coarse.h.size(); ++i) {
            if (!coarse_model.mask[i]) continue;
            const double bound = phi[i] + std::exp(-B * coarse_model.psi[i]) * barrier.h[i];
            if (coarse.h[i] > bound + 1e-10) return false;
        }
        return true;
    };
    std::vector<double> trial;
    for (double B : ladder) {
        if (B >= sandwich_B) trial.push_back(B);
    }
    for (double B = std::max({1.0, sandwich_B, trial.empty() ? 0.0 : trial.back()}) * 2.0; B <= kMaxBarrierB;
         B *= 2.0) {
        trial.push_back(B);
    }
    rep.barrier_B = -1.0;
    for (double B : trial) {
        if (sandwich_holds(B)) {
            rep.barrier_sandwich = true;
            rep.barrier_B = B;
            break;
        }
    }
    return rep;
}

std::string to_json(const CertificateReport& r) {
    nlohmann::json j;
    j["barrier_sandwich"] = r.barrier_sandwich;
    j["barrier_B"] = r.barrier_B;
    for (const CertificateEntry& e : r.entries) {
        j["entries"].push_back({{"order", e.order},
                                {"B", e.B},
                                {"weighted_sup", e.weighted_sup},
                                {"refinement_ratio", e.refinement_ratio}});
    }
    return j.dump(2);
}

}  // namespace pshenv
