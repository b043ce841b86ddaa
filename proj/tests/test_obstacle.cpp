#include "pshenv/boundary_family.hpp"
#include "pshenv/derivatives.hpp"
#include "pshenv/error.hpp"
#include "pshenv/obstacle.hpp"
#include "pshenv/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <nlohmann/json.hpp>

using namespace pshenv;

namespace {

Field t_boundary(const ProductGrid& g, double at0, double at1) {
    return Field::sample(g, [&](double, double, double t) { return t == 0.0 ? at0 : (t == 1.0 ? at1 : 0.0); });
}

struct PresetCase {
    Preset preset;
    SingularModel model;
    BoundaryFamily family;
    std::vector<ObstacleSolution> obstacles;

    PresetCase(const std::string& name, int n, int nt, const std::vector<double>& eps)
        : preset(make_preset(name, build_torus(n, n, true))),
          model(make_singular_model(preset.c, preset.base, preset.ends, preset.delta, nt)),
          family(build_boundary_family(preset.ends, preset.base, model, eps)) {
        for (double e : eps) obstacles.push_back(solve_obstacle(family, e));
    }
};

}  // namespace

TEST_CASE("solve_dirichlet closed forms on the flat x-independent model") {
    const ProductGrid g = build_grid(8, 8, 33, true);
    const BaseForm flat = make_constant_form(1.0, g.torus, AnnulusMetric::flat);

    SUBCASE("zero data") {
        const ObstacleSolution s = solve_dirichlet(t_boundary(g, 0.0, 0.0), flat, -4.0);
        CHECK(s.residual_norm <= 1e-10);
        for (int k = 0; k < g.nt; ++k) {
            const double t = g.t(k);
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                for (int i1 = 0; i1 < g.nx1(); ++i1) CHECK(std::abs(s.h(i1, i2, k) - 8 * t * (1 - t)) <= 1e-8);
        }
        CHECK(s.h(3, 5, 16) == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("data (0, 1) adds the linear solution") {
        const ObstacleSolution s = solve_dirichlet(t_boundary(g, 0.0, 1.0), flat, -4.0);
        for (int k = 0; k < g.nt; ++k) {
            const double t = g.t(k);
            CHECK(std::abs(s.h(2, 7, k) - (8 * t * (1 - t) + t)) <= 1e-8);
        }
    }
    SUBCASE("barrier") {
        const ObstacleSolution b = solve_barrier(g, flat);
        for (int k = 0; k < g.nt; ++k) {
            const double t = g.t(k);
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                for (int i1 = 0; i1 < g.nx1(); ++i1) {
                    CHECK(std::abs(b.h(i1, i2, k) - 2 * t * (1 - t)) <= 1e-8);
                    if (k > 0 && k < g.nt - 1) CHECK(b.h(i1, i2, k) > 0.0);
                }
        }
        CHECK(b.h(0, 0, 0) == 0.0);
        CHECK(b.h(0, 0, g.nt - 1) == 0.0);
        CHECK(b.h(0, 0, 16) == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("solve_dirichlet converges at second order to a harmonic extension") {
    // Harmonic extension of sin(2πx1) at t = 0 and -sin(2πx1) at t = 1:
    // u_tt = 4π² u for this mode.
    constexpr double pi = std::numbers::pi;
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const ProductGrid g = build_grid(n, 8, n + 1, false);
        const BaseForm flat = make_constant_form(1.0, g.torus, AnnulusMetric::flat);
        const Field data = Field::sample(g, [](double x1, double, double t) {
            return std::sin(2 * pi * x1) * (t == 0.0 ? 1.0 : (t == 1.0 ? -1.0 : 0.0));
        });
        const ObstacleSolution s = solve_dirichlet(data, flat, 0.0);
        CHECK(s.residual_norm <= 1e-10);
        const double k = 2 * pi;
        double err = 0.0;
        for (int kk = 0; kk < g.nt; ++kk) {
            const double t = g.t(kk);
            const double prof = (std::sinh(k * (1 - t)) - std::sinh(k * t)) / std::sinh(k);
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                err = std::max(err, std::abs(s.h(i1, 3, kk) - prof * std::sin(2 * pi * g.torus.x1(i1))));
            }
        }
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
        prev = err;
    }
}

TEST_CASE("solve_dirichlet rejects a mismatched base form") {
    const ProductGrid g = build_grid(8, 8, 9, true);
    const BaseForm other = make_constant_form(1.0, build_torus(16, 16, true));
    CHECK_THROWS_AS(solve_dirichlet(Field(g), other, -4.0), InputError);
}

TEST_CASE("property: obstacle boundary values, maximum principle and sandwich") {
    const std::vector<double> eps = {1.0, 0.25, 1.0 / 16, 1.0 / 64};
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        if (!make_preset(name, build_torus(8, 8, true)).solvable) continue;
        const PresetCase c(name, 16, 17, eps);
        const ProductGrid& g = c.family.grid;
        const ObstacleSolution& h1 = c.obstacles.front();
        for (std::size_t e = 0; e < eps.size(); ++e) {
            CAPTURE(eps[e]);
            const Field& h = c.obstacles[e].h;
            const Field& phi = c.family.phi_eps(eps[e]);
            CHECK(c.obstacles[e].eps == eps[e]);
            CHECK(c.obstacles[e].residual_norm <= 1e-10);
            int bad_boundary = 0, bad_max = 0, bad_sandwich = 0, bad_mono = 0;
            for (std::size_t n = 0; n < h.size(); ++n) {
                const int k = static_cast<int>(n / g.plane());
                if (g.is_boundary_level(k) && h[n] != phi[n]) ++bad_boundary;
                if (h[n] < phi[n] - 1e-10) ++bad_max;
                if (c.model.psi[n] > phi[n] || h[n] > h1.h[n] + 1e-10) ++bad_sandwich;
                if (e > 0 && h[n] > c.obstacles[e - 1].h[n] + 1e-10) ++bad_mono;
            }
            CHECK(bad_boundary == 0);
            CHECK(bad_max == 0);
            CHECK(bad_sandwich == 0);
            CHECK(bad_mono == 0);
        }
    }
}

TEST_CASE("appendix certificates") {
    SUBCASE("x-independent data: bounded weight, vanishing third derivative") {
        const PresetCase coarse("flat-constants", 8, 17, {1.0 / 16});
        const PresetCase fine("flat-constants", 16, 33, {1.0 / 16});
        const ObstacleSolution b = solve_barrier(coarse.family.grid, coarse.preset.base);
        const CertificateReport r = appendix_certificates(coarse.obstacles[0], coarse.model, fine.obstacles[0],
                                                          fine.model, coarse.family, b, 3);
        REQUIRE(r.entries.size() == 3);
        for (const CertificateEntry& e : r.entries) {
            CAPTURE(e.order);
            CHECK(e.B == 0.0);
            CHECK(std::isfinite(e.weighted_sup));
        }
        const Field d3 = third_derivative_norm(coarse.obstacles[0].h, coarse.model.mask);
        CHECK(d3.max() < 1e-8);
        CHECK(r.barrier_sandwich);

        const nlohmann::json j = nlohmann::json::parse(to_json(r));
        CHECK(j["entries"].size() == 3);
        CHECK(j["entries"][0].contains("refinement_ratio"));
    }
    SUBCASE("smooth preset certifies at B = 0") {
        const PresetCase coarse("smooth", 16, 17, {1.0 / 16});
        const PresetCase fine("smooth", 32, 33, {1.0 / 16});
        const ObstacleSolution b = solve_barrier(coarse.family.grid, coarse.preset.base);
        const CertificateReport r = appendix_certificates(coarse.obstacles[0], coarse.model, fine.obstacles[0],
                                                          fine.model, coarse.family, b, 2);
        for (const CertificateEntry& e : r.entries) {
            CHECK(e.B == 0.0);
            CHECK(std::isfinite(e.weighted_sup));
        }
    }
    SUBCASE("log-singular model certifies on the ladder") {
        const PresetCase coarse("log-singular-c1", 16, 17, {1.0 / 16});
        const PresetCase fine("log-singular-c1", 32, 33, {1.0 / 16});
        const ObstacleSolution b = solve_barrier(coarse.family.grid, coarse.preset.base);
        const CertificateReport r = appendix_certificates(coarse.obstacles[0], coarse.model, fine.obstacles[0],
                                                          fine.model, coarse.family, b, 2, {1.0, 2.0, 4.0, 8.0});
        REQUIRE(r.entries.size() == 2);
        CHECK(r.entries[1].order == 2);
        CHECK(r.entries[1].B >= 1.0);
        CHECK(r.entries[1].B <= 8.0);
        CHECK(r.barrier_sandwich);
    }
}
