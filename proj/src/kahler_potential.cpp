#include "pshenv/kahler_potential.hpp"

#include "pshenv/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pshenv {

namespace {

void residual(const BaseForm& base, double eps, double beta0, const SurfaceField& v,
              std::vector<double>& out) {
    const TorusGrid& g = v.grid();
    const double i11 = 1.0 / (g.h1() * g.h1()), i22 = 1.0 / (g.h2() * g.h2());
    out.resize(g.size());
    for (int i2 = 0; i2 < g.nx2; ++i2) {
        for (int i1 = 0; i1 < g.nx1; ++i1) {
            const double c = v(i1, i2);
            const double lap = (v(g.wrap1(i1 - 1), i2) - 2.0 * c + v(g.wrap1(i1 + 1), i2)) * i11 +
                               (v(i1, g.wrap2(i2 - 1)) - 2.0 * c + v(i1, g.wrap2(i2 + 1))) * i22;
            out[g.index(i1, i2)] = base.a(i1, i2) + 0.5 * eps + 0.25 * lap - std::exp(beta0 * c);
        }
    }
}

double sup_abs(const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s = std::max(s, std::abs(x));
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

}  // namespace

double kahler_residual(const BaseForm& base, double eps, double beta0, const SurfaceField& v) {
    std::vector<double> r;
    residual(base, eps, beta0, v, r);
    return sup_abs(r);
}

SurfaceField solve_kahler_potential(const BaseForm& base, double eps, double beta0,
                                    const KahlerSolveOptions& opts) {
    if (!(beta0 > 0.0)) {
        throw InputError("solve_kahler_potential: beta0 must be positive");
    }
    if (!(eps >= 0.0)) {
        throw InputError("solve_kahler_potential: eps must be nonnegative");
    }
    const TorusGrid& g = base.grid();
    const double mean_rhs =
        std::accumulate(base.a.values().begin(), base.a.values().end(), 0.0) / g.size() + 0.5 * eps;
    if (!(base.a.max() + 0.5 * eps > 0.0) || !(mean_rhs > 0.0)) {
        throw InputError("solve_kahler_potential: a + eps/2 vanishes identically");
    }

    SurfaceField v(g, std::log(mean_rhs) / beta0);
    const auto n = static_cast<Eigen::Index>(g.size());
    const double i11 = 0.25 / (g.h1() * g.h1()), i22 = 0.25 / (g.h2() * g.h2());

    // -J = -Δ/4 + β₀ e^{β₀ v}: symmetric positive definite on the torus.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * g.size());
    for (int i2 = 0; i2 < g.nx2; ++i2) {
        for (int i1 = 0; i1 < g.nx1; ++i1) {
            const auto r = static_cast<Eigen::Index>(g.index(i1, i2));
            trip.emplace_back(r, r, 2.0 * (i11 + i22));
            trip.emplace_back(r, static_cast<Eigen::Index>(g.index(g.wrap1(i1 - 1), i2)), -i11);
            trip.emplace_back(r, static_cast<Eigen::Index>(g.index(g.wrap1(i1 + 1), i2)), -i11);
            trip.emplace_back(r, static_cast<Eigen::Index>(g.index(i1, g.wrap2(i2 - 1))), -i22);
            trip.emplace_back(r, static_cast<Eigen::Index>(g.index(i1, g.wrap2(i2 + 1))), -i22);
        }
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.analyzePattern(L);

    std::vector<double> r;
    residual(base, eps, beta0, v, r);
    double sup = sup_abs(r);
    std::vector<double> history{sup};

    // Second differences of v carry roundoff of order ulp·|v|/h²; never ask for less.
    auto target = [&] {
        double vmax = 0.0;
        for (double x : v.values()) vmax = std::max(vmax, std::abs(x));
        return std::max(opts.tol, 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + vmax) * (i11 + i22));
    };

    for (int it = 0; it < opts.max_iter && sup > target(); ++it) {
        Eigen::SparseMatrix<double> A = L;
        for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) += beta0 * std::exp(beta0 * v[i]);
        solver.factorize(A);
        if (solver.info() != Eigen::Success) {
            throw SolveError("solve_kahler_potential: factorization failed", history);
        }
        const Eigen::Map<const Eigen::VectorXd> rhs(r.data(), n);
        const Eigen::VectorXd step = solver.solve(rhs);

        double lambda = 1.0;
        SurfaceField trial(g);
        std::vector<double> rt;
        for (;;) {
            for (Eigen::Index i = 0; i < n; ++i) trial[i] = v[i] + lambda * step[i];
            residual(base, eps, beta0, trial, rt);
            const double st = sup_abs(rt);
            if (st < (1.0 - 1e-4 * lambda) * sup) {
                sup = st;
                break;
            }
            lambda *= 0.5;
            if (lambda < opts.damping_min) {
                throw SolveError("solve_kahler_potential: damping underflow", history);
            }
        }
        v = std::move(trial);
        r = std::move(rt);
        history.push_back(sup);
    }
    if (!(sup <= target())) {
        throw SolveError("solve_kahler_potential: no convergence in " + std::to_string(opts.max_iter) +
                             " iterations",
                         history);
    }
    return v;
}

}  // namespace pshenv
