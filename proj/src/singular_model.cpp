#include "pshenv/singular_model.hpp"

#include "pshenv/annulus.hpp"
#include "pshenv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pshenv {

double gap_constant(const EndpointPair& ends) {
    if (!(ends.phi0.grid() == ends.phi1.grid())) {
        throw InputError("gap_constant: endpoints live on different grids");
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < ends.phi0.size(); ++i) {
        gap = std::max(gap, std::abs(ends.phi0[i] - ends.phi1[i]));
    }
    if (!std::isfinite(gap)) {
        throw InputError("gap_constant: endpoints do not share a singularity type");
    }
    return 1.0 + gap + 1.0 / 16.0;
}

double log_model_S(double x1, double x2) noexcept {
    const double s1 = std::sin(std::numbers::pi * x1);
    const double s2 = std::sin(std::numbers::pi * x2);
    return s1 * s1 + s2 * s2;
}

double SingularModel::psi_at(double x1, double x2) const noexcept {
    if (c == 0.0) return psi_shift;
    return 0.5 * c * std::log(log_model_S(x1, x2)) + psi_shift;
}

NodeMask distance_mask(const ProductGrid& grid, const std::vector<std::array<double, 2>>& points,
                       double radius) {
    NodeMask m(grid.size(), 1);
    const TorusGrid& x = grid.torus;
    for (int i2 = 0; i2 < x.nx2; ++i2) {
        for (int i1 = 0; i1 < x.nx1; ++i1) {
            bool keep = true;
            for (const auto& p : points) {
                const double d1 = periodic_distance(x.x1(i1), p[0]);
                const double d2 = periodic_distance(x.x2(i2), p[1]);
                if (std::hypot(d1, d2) < radius) keep = false;
            }
            if (keep) continue;
            for (int k = 0; k < grid.nt; ++k) m[grid.index(i1, i2, k)] = 0;
        }
    }
    return m;
}

SurfaceField ddbar_x(const SurfaceField& s) {
    const TorusGrid& g = s.grid();
    const double i11 = 0.25 / (g.h1() * g.h1()), i22 = 0.25 / (g.h2() * g.h2());
    SurfaceField out(g);
    for (int i2 = 0; i2 < g.nx2; ++i2) {
        for (int i1 = 0; i1 < g.nx1; ++i1) {
            const double c = s(i1, i2);
            out(i1, i2) = (s(g.wrap1(i1 - 1), i2) - 2.0 * c + s(g.wrap1(i1 + 1), i2)) * i11 +
                          (s(i1, g.wrap2(i2 - 1)) - 2.0 * c + s(i1, g.wrap2(i2 + 1))) * i22;
        }
    }
    return out;
}

double psi_certificate(const SingularModel& m, double B) {
    const DerivativeStats ds = derivative_stats(m.psi, m.mask);
    double cert = 0.0;
    for (std::size_t i = 0; i < m.psi.size(); ++i) {
        if (!m.mask[i]) continue;
        cert = std::max(cert, (ds.grad[i] + ds.hess_norm[i]) * std::exp(B * m.psi[i]));
    }
    return cert;
}

SingularModel make_singular_model(double c, const BaseForm& base, const EndpointPair& ends,
                                  double delta, int nt, const SingularModelOptions& opts) {
    if (!(c >= 0.0)) throw InputError("make_singular_model: c must be nonnegative");
    if (!(delta > 0.0)) throw InputError("make_singular_model: delta must be positive");
    const TorusGrid& tg = base.grid();
    if (!(ends.phi0.grid() == tg) || !(ends.phi1.grid() == tg)) {
        throw InputError("make_singular_model: base and endpoints do not share the grid");
    }

    SingularModel m;
    m.grid = ProductGrid{tg, nt};
    m.c = c;
    m.delta = delta;
    if (c > 0.0) m.singular_points.push_back({0.0, 0.0});
    m.mask_radius = opts.mask_cells * std::max(tg.h1(), tg.h2());
    m.mask = distance_mask(m.grid, m.singular_points, m.mask_radius);

    // F from the X-factor of the endpoints.
    const SurfaceField l0 = ddbar_x(ends.phi0);
    const SurfaceField l1 = ddbar_x(ends.phi1);
    SurfaceField logF(tg);
    double fmax = -std::numeric_limits<double>::infinity();
    for (int i2 = 0; i2 < tg.nx2; ++i2) {
        for (int i1 = 0; i1 < tg.nx1; ++i1) {
            const double a0 = base.a(i1, i2) + l0(i1, i2);
            const double a1 = base.a(i1, i2) + l1(i1, i2);
            const bool kept = m.mask[m.grid.index(i1, i2, 0)] != 0;
            if (std::min(a0, a1) < 0.0 && kept) {
                throw InputError("make_singular_model: a_phi = " + std::to_string(std::min(a0, a1)) +
                                 " < 0 at node (" + std::to_string(i1) + ", " + std::to_string(i2) + ")");
            }
            const double v = (a0 > 0.0 && a1 > 0.0) ? -std::log1p(1.0 / a0 + 1.0 / a1)
                                                    : -std::numeric_limits<double>::infinity();
            if (kept && !std::isfinite(v)) {
                throw InputError("make_singular_model: F is not finite at kept node (" +
                                 std::to_string(i1) + ", " + std::to_string(i2) + ")");
            }
            if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
                throw InputError("make_singular_model: F unbounded above");
            }
            logF(i1, i2) = v;
            if (kept) fmax = std::max(fmax, v);
        }
    }
    m.F_shift = std::max(0.0, fmax);
    for (double& v : logF.values()) v -= m.F_shift;

    // Quasi-psh constant of F off the mask.
    const SurfaceField hf = ddbar_x(logF);
    double worst = 0.0;
    for (int i2 = 0; i2 < tg.nx2; ++i2) {
        for (int i1 = 0; i1 < tg.nx1; ++i1) {
            if (m.mask[m.grid.index(i1, i2, 0)] && std::isfinite(hf(i1, i2))) {
                worst = std::max(worst, -hf(i1, i2));
            }
        }
    }
    m.C_F = std::max(1.0, worst);
    m.B0 = 2.0 * m.C_F / delta;

    // ψ: log model with sup = -1, then pushed under the lower envelope of φ.
    m.psi_shift = c > 0.0 ? -0.5 * c * std::log(2.0) - 1.0 : -1.0;
    const double C = gap_constant(ends);
    double excess = 0.0;
    for (int k = 0; k < nt; ++k) {
        const double t = m.grid.t(k);
        const double f = annulus_potential_value(t, base.metric, base.kappa_A);
        for (int i2 = 0; i2 < tg.nx2; ++i2) {
            for (int i1 = 0; i1 < tg.nx1; ++i1) {
                const double lower =
                    std::max(ends.phi0(i1, i2) - C * t, ends.phi1(i1, i2) - C * (1.0 - t)) + f;
                const double p = m.psi_at(tg.x1(i1), tg.x2(i2));
                excess = std::max(excess, p - lower);
            }
        }
    }
    m.psi_shift -= excess;

    m.psi = Field::sample(m.grid, [&m](double x1, double x2, double) { return m.psi_at(x1, x2); });
    m.F = pullback(logF, m.grid);
    m.tilde_psi = m.psi;
    const double w = delta / (2.0 * m.C_F);
    for (std::size_t i = 0; i < m.tilde_psi.size(); ++i) m.tilde_psi[i] += w * m.F[i];

    m.certificate_constant = psi_certificate(m, m.B0);
    return m;
}

}  // namespace pshenv
