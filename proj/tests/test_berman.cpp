#include "pshenv/berman.hpp"
#include "pshenv/error.hpp"
#include "pshenv/hermitian.hpp"
#include "pshenv/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pshenv;

namespace {

struct Setup {
    Preset preset;
    SingularModel model;
    BoundaryFamily family;
    std::vector<ObstacleSolution> obstacles;

    Setup(const Preset& p, int nt, const std::vector<double>& eps)
        : preset(p),
          model(make_singular_model(p.c, p.base, p.ends, p.delta, nt)),
          family(build_boundary_family(p.ends, p.base, model, eps)) {
        for (double e : eps) obstacles.push_back(solve_obstacle(family, e));
    }
    Setup(const std::string& name, int n, int nt, const std::vector<double>& eps)
        : Setup(make_preset(name, build_torus(n, n, true)), nt, eps) {}

    const ObstacleSolution& obstacle(double eps) const {
        for (const ObstacleSolution& o : obstacles) {
            if (o.eps == eps) return o;
        }
        throw InputError("no obstacle");
    }
};

Preset zero_preset(int n) {
    Preset p;
    const TorusGrid g = build_torus(n, n, true);
    p.name = "zero";
    p.base = make_constant_form(1.0, g);
    p.ends = {SurfaceField(g), SurfaceField(g)};
    return p;
}

}  // namespace

TEST_CASE("residual closed forms") {
    const Setup s(zero_preset(8), 9, {1.0});
    const ProductGrid& g = s.family.grid;

    SUBCASE("eps = 4 removes the exponent offset") {
        ObstacleSolution obs;
        obs.h = Field(g, 0.0);
        const Field r = residual(Field(g, 0.0), s.family, obs, 4.0, 7.0);
        // g~ = diag(1 + 4, 4 ω_ww̄), so det g~ / det ω = 20.
        for (int k = 1; k < g.nt - 1; ++k) CHECK(r(3, 2, k) == doctest::Approx(std::log(20.0)).epsilon(1e-14));
        CHECK(r(3, 2, 0) == 0.0);
    }
    SUBCASE("constant shift moves the residual by -beta c") {
        const double beta = 37.0, c = 0.125;
        const Field u = Field::sample(g, [](double x1, double, double t) {
            return 0.01 * std::cos(2 * std::numbers::pi * x1) + t * t;
        });
        const Field r0 = residual(u, s.family, s.obstacles[0], 0.5, beta);
        const Field r1 = residual(u + Field(g, c), s.family, s.obstacles[0], 0.5, beta);
        for (std::size_t n = g.plane(); n + g.plane() < g.size(); ++n) {
            CHECK(r1[n] - r0[n] == doctest::Approx(-beta * c).epsilon(1e-12));
        }
    }
    SUBCASE("manufactured obstacle") {
        const double eps = 0.25, beta = 16.0;
        const Field u = Field::sample(g, [](double x1, double x2, double t) {
            return 0.02 * std::sin(2 * std::numbers::pi * x1) * std::cos(2 * std::numbers::pi * x2) * t + 0.4 * t * t;
        });
        const Field rho = ma_density(hermitian_hessian(u, s.family.base, eps));
        ObstacleSolution obs;
        obs.h = u;
        for (int k = 1; k < g.nt - 1; ++k) {
            const double om = s.family.base.omega_ww(g.t(k));
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                for (int i1 = 0; i1 < g.nx1(); ++i1) {
                    const double lr = std::log(rho(i1, i2, k) / om) - 2 * std::log(eps / 4);
                    obs.h(i1, i2, k) = u(i1, i2, k) - lr / beta;
                }
        }
        const Field r = residual(u, s.family, obs, eps, beta);
        CHECK(std::max(std::abs(r.max()), std::abs(r.min())) < 1e-12);
    }
    SUBCASE("inadmissible input is rejected") {
        const Field u = Field::sample(g, [](double x1, double, double) {
            return 0.5 * std::cos(2 * std::numbers::pi * x1);
        });
        CHECK_THROWS_AS(residual(u, s.family, s.obstacles[0], 0.5, 1.0), InputError);
    }
}

TEST_CASE("property: the boundary family is a discrete subsolution") {
    const std::vector<double> eps = {0.5, 1.0 / 16, 1.0 / 64};
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        if (!make_preset(name, build_torus(8, 8, true)).solvable) continue;
        const Setup s(name, 16, 17, eps);
        for (double e : eps) {
            for (double beta : {1.0, 256.0, 16384.0}) {
                const Field r = residual(s.family.phi_eps(e), s.family, s.obstacle(e), e, beta);
                CHECK(r.min() >= -1e-6);
            }
        }
    }
}

TEST_CASE("X-collapsed solve stays in the sandwich") {
    const double eps = 1.0 / 16;
    const Setup s(zero_preset(8), 17, {eps});
    const ObstacleSolution& obs = s.obstacles[0];
    const ProductGrid& g = s.family.grid;
    for (int k = 0; k < g.nt; ++k) {
        const double t = g.t(k);
        // The Euclidean annulus metric bends the flat closed form; the obstacle
        // is x-independent either way and bounded by it.
        CHECK(obs.h(5, 1, k) == doctest::Approx(obs.h(0, 0, k)).epsilon(1e-12));
        CHECK(obs.h(0, 0, k) <= 8 * t * (1 - t) + s.family.phi_eps(eps)(0, 0, k) + 1e-12);
    }
    const SolveReport r = solve_fixed(s.family, obs, eps, 64.0, s.family.phi_eps(eps));
    CHECK(r.converged);
    CHECK(r.residual_sup <= 1e-8);
    CHECK(r.sandwich_ok);
    CHECK(r.trace_bound_ok);
    CHECK(r.sandwich_lower_gap >= -1e-8);
    CHECK(r.sandwich_upper_gap >= -1e-8);
    // The t-direction eigenvalue of the solution sits at roundoff level.
    for (double m : r.min_eigen_path) CHECK(m > -1e-10);
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2)
            for (int i1 = 0; i1 < g.nx1(); ++i1) CHECK(std::abs(r.u(i1, i2, k) - r.u(0, 0, k)) < 1e-9);
    }
}

TEST_CASE("solve_fixed rejects bad arguments") {
    const Setup s(zero_preset(8), 9, {0.5});
    CHECK_THROWS_AS(solve_fixed(s.family, s.obstacles[0], 0.5, 0.0, s.family.phi_eps(0.5)), InputError);
    const Field other(build_grid(16, 16, 9, true));
    CHECK_THROWS_AS(solve_fixed(s.family, s.obstacles[0], 0.5, 1.0, other), InputError);
    CHECK_THROWS_AS(solve_fixed(s.family, s.obstacles[0], 0.25, 1.0, s.family.phi_eps(0.5)), InputError);
}

TEST_CASE("warm starts across a beta doubling") {
    const double eps = 1.0 / 16;
    const Setup s("smooth", 16, 17, {eps});
    const ObstacleSolution& obs = s.obstacles[0];
    const Field& phi = s.family.phi_eps(eps);
    const SolveReport base = solve_fixed(s.family, obs, eps, 256.0, phi);
    const SolveReport warm = solve_fixed(s.family, obs, eps, 512.0, base.u);
    const SolveReport cold = solve_fixed(s.family, obs, eps, 512.0, phi);
    CHECK(warm.converged);
    CHECK(cold.converged);
    CHECK(2 * warm.newton_iters <= cold.newton_iters);
    CHECK(sup_distance(warm.u, cold.u) < 1e-6);
}

TEST_CASE("continuation on the smooth preset") {
    ContinuationSchedule sch;
    sch.eps_list = {1.0 / 8, 1.0 / 16};
    sch.beta_list = {16.0, 32.0, 64.0, 128.0, 256.0, 512.0};
    sch.beta0 = 16.0;
    const Setup s("smooth", 16, 17, sch.eps_list);
    const std::vector<BranchResult> br =
        continuation_solve(sch, s.family, [&](double e) -> const ObstacleSolution& { return s.obstacle(e); });
    REQUIRE(br.size() == 2);
    for (const BranchResult& b : br) {
        CAPTURE(b.eps);
        CHECK(b.complete);
        REQUIRE(b.reports.size() == sch.beta_list.size());
        REQUIRE(b.cauchy.size() == sch.beta_list.size() - 1);
        for (std::size_t i = 1; i < b.cauchy.size(); ++i) CHECK(b.cauchy[i] <= b.cauchy[i - 1] * (1 + 1e-9));
        for (const SolveReport& r : b.reports) {
            CHECK(r.converged);
            CHECK(r.sandwich_ok);
            CHECK(r.trace_bound_ok);
        }
    }
    // V_ε decreases with ε at the common largest β.
    const Field& v8 = br[0].reports.back().u;
    const Field& v16 = br[1].reports.back().u;
    for (std::size_t n = 0; n < v8.size(); ++n) CHECK(v16[n] <= v8[n] + 1e-8);

    const Envelope env = extract_envelope(br);
    CHECK(env.eps == 1.0 / 16);
    CHECK(env.beta == 512.0);
    CHECK(env.uncertainty == br[1].cauchy.back());
    CHECK(sup_distance(env.V, v16) == 0.0);
}

TEST_CASE("extract_envelope with one beta level flags infinite uncertainty") {
    ContinuationSchedule sch;
    sch.eps_list = {0.25};
    sch.beta_list = {32.0};
    sch.beta0 = 32.0;
    const Setup s("constants", 8, 9, sch.eps_list);
    const std::vector<BranchResult> br =
        continuation_solve(sch, s.family, [&](double e) -> const ObstacleSolution& { return s.obstacle(e); });
    const Envelope env = extract_envelope(br);
    CHECK(env.beta == 32.0);
    CHECK(std::isinf(env.uncertainty));
    CHECK(sup_distance(env.V, br[0].reports[0].u) == 0.0);
}

TEST_CASE("schedule validation") {
    ContinuationSchedule sch;
    sch.eps_list = {0.5, 0.25};
    sch.beta_list = {2.0, 4.0};
    sch.beta0 = 1.0;
    CHECK_NOTHROW(sch.validate());
    sch.eps_list = {0.25, 0.5};
    CHECK_THROWS_AS(sch.validate(), InputError);
    sch.eps_list = {2.0};
    CHECK_THROWS_AS(sch.validate(), InputError);
    sch.eps_list = {0.5};
    sch.beta_list = {4.0, 2.0};
    CHECK_THROWS_AS(sch.validate(), InputError);
    sch.beta_list = {0.5};
    CHECK_THROWS_AS(sch.validate(), InputError);
    sch.beta_list = {2.0};
    sch.newton.tol_residual_sup = 1e-6;
    CHECK_THROWS_AS(sch.validate(), InputError);
}
