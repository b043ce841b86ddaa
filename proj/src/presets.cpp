#include "pshenv/presets.hpp"

#include "pshenv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pshenv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularKappa = 0.1;
constexpr double kPerturbation = 0.01;
constexpr double kLogSmoothing = 9.0;

SurfaceField sample_x1(const TorusGrid& g, const std::function<double(double)>& f) {
    return SurfaceField::sample(g, [&f](double x1, double) { return f(x1); });
}

void normalize_sup_zero(SurfaceField& s) {
    const double m = s.max();
    for (double& v : s.values()) v -= m;
}

}  // namespace

double log_singular_profile(double x1, double x2, double s0) noexcept {
    const double S = log_model_S(x1, x2);
    return 0.5 * std::log(S + s0) + 0.25 * S;
}

double corner_profile(double x1) noexcept {
    double y = x1 - std::floor(x1) - 0.5;
    y = std::abs(y);
    if (y <= 0.125) return -2.0 * y * y;
    const double d = y - 0.125;
    return -1.0 / 32.0 - 0.5 * d + (2.0 / 3.0) * d * d;
}

std::vector<std::string> preset_names() {
    return {"smooth", "constants", "flat-constants", "corner", "log-singular-c1", "degenerate-lambda4"};
}

Preset make_preset(const std::string& name, const TorusGrid& grid) {
    Preset p;
    p.name = name;
    if (name == "smooth") {
        p.base = make_constant_form(1.0, grid);
        p.phi0_x1 = [](double) { return 0.0; };
        p.phi1_x1 = [](double x) { return (std::cos(kTwoPi * x) - 1.0) / 16.0; };
        p.x1_only = true;
    } else if (name == "constants" || name == "flat-constants") {
        p.base = make_constant_form(1.0, grid, name == "constants" ? AnnulusMetric::euclidean
                                                                    : AnnulusMetric::flat);
        p.phi0_x1 = [](double) { return 0.0; };
        p.phi1_x1 = [](double) { return 1.0; };
        p.x1_only = true;
    } else if (name == "corner") {
        p.base = make_constant_form(1.0, grid);
        p.phi0_x1 = [](double) { return 0.0; };
        p.phi1_x1 = corner_profile;
        p.x1_only = true;
        p.solvable = false;
    } else if (name == "log-singular-c1" || name == "degenerate-lambda4") {
        p.base = name == "log-singular-c1" ? make_constant_form(1.0, grid)
                                           : normalized(make_degenerate_form(4.0, grid));
        p.c = 1.0;
        p.delta = 0.5;
        // The sampled log is smoothed over about three cells: sharper data
        // leaves the discrete problem without an admissible solution nearby.
        const double hs = std::numbers::pi * std::max(grid.h1(), grid.h2());
        const double s0 = kLogSmoothing * hs * hs;
        p.ends.phi0 = SurfaceField::sample(
            grid, [s0](double x1, double x2) { return kSingularKappa * log_singular_profile(x1, x2, s0); });
        p.ends.phi1 = SurfaceField::sample(grid, [s0](double x1, double x2) {
            return kSingularKappa * log_singular_profile(x1, x2, s0) - kPerturbation * std::cos(kTwoPi * x1);
        });
        normalize_sup_zero(p.ends.phi0);
        normalize_sup_zero(p.ends.phi1);
        return p;
    } else {
        throw InputError("unknown preset '" + name + "'");
    }
    p.ends.phi0 = sample_x1(grid, p.phi0_x1);
    p.ends.phi1 = sample_x1(grid, p.phi1_x1);
    return p;
}

}  // namespace pshenv
