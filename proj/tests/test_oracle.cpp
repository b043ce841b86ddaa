#include "pshenv/compare.hpp"
#include "pshenv/error.hpp"
#include "pshenv/oracle.hpp"
#include "pshenv/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace pshenv;
namespace orc = pshenv::oracle;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> sample(int n, double offset, double (*f)(double)) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = f((i + offset) / n);
    return v;
}

double zero(double) { return 0.0; }
double cos16(double x) { return std::cos(2 * pi * x) / 16; }
double cos4(double x) { return std::cos(2 * pi * x) / 4; }
double bump(double x) { return 0.05 * std::sin(2 * pi * x) + 0.02 * std::cos(4 * pi * x); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

Field oracle_field(const std::string& preset, int n, int nt) {
    const ProductGrid g = build_grid(n, 8, nt, true);
    const Preset p = make_preset(preset, g.torus);
    std::vector<double> t;
    for (int k = 0; k < nt; ++k) t.push_back(g.t(k));
    return orc::broadcast_profiles(orc::sampled_geodesic_profiles(p.phi0_x1, p.phi1_x1, n, t), g);
}

}  // namespace

TEST_CASE("make_lift") {
    const std::vector<double> u = sample(32, 0.5, bump);
    const orc::ConvexLift lift = orc::make_lift(u);
    CHECK(lift.n == 32);
    CHECK(lift.x.size() == 32 * 7);
    CHECK(lift.x.front() == doctest::Approx(-3 + 0.5 / 32));
    CHECK(orc::is_convex(lift));
    CHECK(lift.quasi_periodicity_defect() < 1e-10);
    CHECK_THROWS_AS(orc::make_lift(u, 0.5, 1), InputError);
    CHECK_THROWS_AS(orc::make_lift(std::vector<double>{}), InputError);
    CHECK_FALSE(orc::is_convex(orc::make_lift(sample(64, 0.5, cos4))));
}

TEST_CASE("discrete_legendre of the bare lift") {
    for (int n : {64, 256}) {
        const double h = 1.0 / n;
        const orc::ConvexLift lift = orc::make_lift(std::vector<double>(n, 0.0), 0.0);
        std::vector<double> p;
        for (double q = -10.0; q <= 10.0; q += 0.37) p.push_back(q);
        const orc::DualSamples d = orc::discrete_legendre(lift, p);
        CHECK(d.clamped == 0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            CHECK(std::abs(d.value[j] - p[j] * p[j] / 8) <= h * h / 2 + 1e-14);
        }
        const orc::ConvexLift shifted = orc::make_lift(std::vector<double>(n, 0.3), 0.0);
        const orc::DualSamples ds = orc::discrete_legendre(shifted, p);
        for (std::size_t j = 0; j < p.size(); ++j) CHECK(ds.value[j] == doctest::Approx(d.value[j] - 0.3));
    }
    const orc::ConvexLift lift = orc::make_lift(std::vector<double>(16, 0.0));
    const std::vector<double> wide = {-1000.0, 0.0, 1000.0};
    CHECK(orc::discrete_legendre(lift, wide).clamped == 2);
    const std::vector<double> unsorted = {1.0, 0.0};
    CHECK_THROWS_AS(orc::discrete_legendre(lift, unsorted), InputError);
    CHECK_THROWS_AS(orc::discrete_legendre(orc::make_lift(sample(64, 0.5, cos4)), wide), InputError);
}

TEST_CASE("property: double transform returns the input within 2 h^2") {
    for (int n : {32, 128, 512}) {
        const double h = 1.0 / n;
        const orc::ConvexLift lift = orc::make_lift(sample(n, 0.5, bump));
        // Slopes at half the node spacing of the dual grid.
        std::vector<double> p;
        const double lo = lift.slope_min(), hi = lift.slope_max();
        const int m = 8 * n * 7;
        for (int j = 0; j <= m; ++j) p.push_back(lo + (hi - lo) * j / m);
        const orc::DualSamples d = orc::discrete_legendre(lift, p);
        const std::vector<double> back = orc::inverse_legendre(d, lift.x);
        double err = 0.0;
        for (std::size_t i = lift.n; i + lift.n < lift.x.size(); ++i) err = std::max(err, std::abs(back[i] - lift.V[i]));
        CHECK(err <= 2 * h * h);
    }
}

TEST_CASE("geodesics with closed forms") {
    const int n = 64;
    const std::vector<double> t = {0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> p0 = sample(n, 0.5, bump);

    SUBCASE("constant shift of the endpoint") {
        std::vector<double> p1 = p0;
        for (double& v : p1) v += 0.7;
        const auto dual = orc::geodesic_profiles_by_duality(p0, p1, t);
        const auto env = orc::convex_envelope_profiles(p0, p1, t);
        for (std::size_t k = 0; k < t.size(); ++k)
            for (int i = 0; i < n; ++i) {
                CHECK(std::abs(dual[k][i] - (p0[i] + 0.7 * t[k])) <= 1e-9);
                CHECK(std::abs(env[k][i] - (p0[i] + 0.7 * t[k])) <= 1e-9);
            }
    }
    SUBCASE("equal endpoints give the constant path") {
        const auto dual = orc::geodesic_profiles_by_duality(p0, p0, t);
        const auto env = orc::convex_envelope_profiles(p0, p0, t);
        for (std::size_t k = 0; k < t.size(); ++k) {
            CHECK(sup_diff(dual[k], p0) <= 1e-9);
            CHECK(sup_diff(env[k], p0) <= 1e-9);
        }
    }
    SUBCASE("constants (0, c) through the field interface") {
        const ProductGrid g = build_grid(16, 8, 9, true);
        const SurfaceField a(g.torus, 0.0), b(g.torus, 1.0);
        const Field d = orc::geodesic_by_duality(a, b, g);
        const Field e = orc::convex_envelope_2d(a, b, g);
        for (int k = 0; k < g.nt; ++k) {
            CHECK(d(3, 5, k) == doctest::Approx(g.t(k)).epsilon(1e-12));
            CHECK(e(7, 1, k) == doctest::Approx(g.t(k)).epsilon(1e-12));
        }
    }
    SUBCASE("x2-dependent endpoints are rejected") {
        const ProductGrid g = build_grid(16, 8, 9, true);
        const SurfaceField a = SurfaceField::sample(g.torus, [](double, double x2) { return 0.01 * std::sin(2 * pi * x2); });
        CHECK_THROWS_AS(orc::geodesic_by_duality(a, a, g), InputError);
    }
    SUBCASE("non-convex lifts are rejected") {
        const std::vector<double> bad = sample(n, 0.0, cos4);
        CHECK_THROWS_AS(orc::geodesic_profiles_by_duality(std::vector<double>(n, 0.0), bad, t, 0.0), InputError);
    }
}

TEST_CASE("tabulated profile for the cosine endpoint at t = 1/2") {
    // Φ(x, 1/2) = min over x₀ + x₁ = 2x of [V₀(x₀) + V₁(x₁)]/2 - 2x², evaluated in
    // extended precision from the continuum inf-convolution.
    const double at_quarter = -0.0046768827952325107;
    const std::vector<double> t = {0.5};
    std::vector<std::vector<double>> rows;
    for (int n : {256, 4096}) {
        rows.push_back(orc::geodesic_profiles_by_duality(std::vector<double>(n, 0.0), sample(n, 0.0, cos16), t, 0.0)[0]);
        const std::vector<double>& r = rows.back();
        const double h = 1.0 / n;
        CHECK(r[0] == doctest::Approx(1.0 / 32).epsilon(1e-12));
        CHECK(r[n / 2] == doctest::Approx(-1.0 / 32).epsilon(1e-12));
        CHECK(std::abs(r[n / 4] - at_quarter) <= 4.4 * h * h / 8);
    }
    // Away from x = 1/4 the inf-convolution has curvature up to (8 + π²/4)/2.
    double d = 0.0;
    for (int i = 0; i < 256; ++i) d = std::max(d, std::abs(rows[0][i] - rows[1][16 * i]));
    CHECK(d <= (8 + pi * pi / 4) / 2 / (256.0 * 256.0) / 8);
}

TEST_CASE("property: the two routes agree on every convex preset at nx = 1024") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        const TorusGrid tg = build_torus(1024, 8, true);
        const Preset p = make_preset(name, tg);
        if (!p.x1_only) continue;
        const ProductGrid g{tg, 17};
        const Field d = orc::geodesic_by_duality(p.ends.phi0, p.ends.phi1, g);
        const Field e = orc::convex_envelope_2d(p.ends.phi0, p.ends.phi1, g);
        CHECK(sup_distance(d, e) <= 1e-6);
        // Endpoint interpolation.
        for (int i = 0; i < 1024; i += 31) {
            CHECK(std::abs(d(i, 0, 0) - p.ends.phi0(i, 0)) <= 1e-9);
            CHECK(std::abs(d(i, 0, 16) - p.ends.phi1(i, 0)) <= 1e-9);
        }
    }
}

TEST_CASE("property: oracle output solves the degenerate real Monge-Ampere equation") {
    for (auto [n, nt] : {std::pair{64, 17}, std::pair{128, 33}, std::pair{256, 65}}) {
        CAPTURE(n);
        std::vector<double> t;
        for (int k = 0; k < nt; ++k) t.push_back(static_cast<double>(k) / (nt - 1));
        const auto rows = orc::sampled_geodesic_profiles(zero, cos16, n, t);
        const auto det = orc::lifted_determinant(rows, 1.0 / (nt - 1));
        REQUIRE(det.size() == static_cast<std::size_t>(nt - 2));
        double worst = 0.0;
        for (const auto& r : det)
            for (double v : r) worst = std::max(worst, std::abs(v));
        CHECK(worst <= 1.0 / n);
    }
}

TEST_CASE("sampled_geodesic_profiles restricts the oversampled oracle") {
    const std::vector<double> t = {0.0, 0.5, 1.0};
    for (double offset : {0.0, 0.5}) {
        const auto direct = orc::sampled_geodesic_profiles(zero, cos16, 64, t, 1, offset);
        const auto plain = orc::geodesic_profiles_by_duality(sample(64, offset, zero), sample(64, offset, cos16), t, offset);
        for (std::size_t k = 0; k < t.size(); ++k) CHECK(sup_diff(direct[k], plain[k]) == 0.0);
        const auto over = orc::sampled_geodesic_profiles(zero, cos16, 64, t, 8, offset);
        CHECK(sup_diff(over[0], sample(64, offset, zero)) <= 1e-12);
        CHECK(sup_diff(over[2], sample(64, offset, cos16)) <= 1e-12);
        CHECK(sup_diff(over[1], plain[1]) <= (8 + pi * pi / 4) / 2 / (64.0 * 64.0) / 8);
    }
}

TEST_CASE("C11 probe separates the corner preset from the smooth one") {
    const C11Probe corner = c11_probe(oracle_field("corner", 128, 33), oracle_field("corner", 256, 65));
    CHECK(corner.hess_ratio >= 0.8);
    CHECK(corner.hess_ratio <= 1.25);
    CHECK(corner.jump_ratio >= 0.75);

    const C11Probe smooth = c11_probe(oracle_field("smooth", 128, 33), oracle_field("smooth", 256, 65));
    CHECK(smooth.hess_ratio >= 0.8);
    CHECK(smooth.hess_ratio <= 1.25);
    CHECK(smooth.jump_ratio <= 0.6);
}
