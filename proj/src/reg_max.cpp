#include "pshenv/reg_max.hpp"

#include "pshenv/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace pshenv {

double reg_max_kernel(double s) noexcept {
    if (s <= -0.5 || s >= 0.5) return 0.0;
    const double q = 1.0 - 4.0 * s * s;
    const double q2 = q * q;
    return (315.0 / 128.0) * q2 * q2;
}

double reg_max_kernel_cdf(double s) noexcept {
    if (s <= -0.5) return 0.0;
    if (s >= 0.5) return 1.0;
    const double y = 2.0 * s;
    const double y2 = y * y;
    // ∫₀^y (1 - v²)⁴ dv
    const double p = y * (1.0 + y2 * (-4.0 / 3.0 + y2 * (6.0 / 5.0 + y2 * (-4.0 / 7.0 + y2 / 9.0))));
    return 0.5 + (315.0 / 256.0) * p;
}

double reg_max(std::span<const double> a, double spread) {
    if (a.empty() || a.size() > 3) {
        throw InputError("reg_max: expects 1 to 3 inputs");
    }
    if (!(spread > 0.0)) {
        throw InputError("reg_max: spread must be positive");
    }
    std::array<double, 3> v{};
    std::copy(a.begin(), a.end(), v.begin());
    const std::size_t n = a.size();
    std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), std::greater<>());
    if (n == 1 || v[0] - v[1] >= 2.0 * spread) return v[0];
    if (!std::isfinite(v[0])) return v[0];

    const double width = 2.0 * spread;
    const double lo = v[0] - spread;
    const double hi = std::min(v[0] + spread, v[1] + spread);

    std::array<double, 8> cuts{};
    std::size_t nc = 0;
    cuts[nc++] = lo;
    cuts[nc++] = hi;
    for (std::size_t i = 1; i < n; ++i) {
        for (double b : {v[i] - spread, v[i] + spread}) {
            if (b > lo && b < hi) cuts[nc++] = b;
        }
    }
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(nc));

    // M - max = ∫ Θ₀(1 - Π_{i≥1} Θᵢ), nonnegative and zero beyond the others' supports.
    auto excess = [&](double x) {
        double F = 1.0;
        for (std::size_t i = 1; i < n; ++i) F *= reg_max_kernel_cdf((x - v[i]) / width);
        return reg_max_kernel_cdf((x - v[0]) / width) * (1.0 - F);
    };
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < nc; ++i) {
        if (cuts[i + 1] > cuts[i]) {
            integral += boost::math::quadrature::gauss<double, 15>::integrate(excess, cuts[i], cuts[i + 1]);
        }
    }
    return v[0] + std::max(integral, 0.0);
}

double reg_max(double a, double b, double spread) {
    const std::array<double, 2> v{a, b};
    return reg_max(std::span<const double>(v), spread);
}

double reg_max3(double a, double b, double c, double spread) {
    const std::array<double, 3> v{a, b, c};
    return reg_max(std::span<const double>(v), spread);
}

Field reg_max(const std::vector<const Field*>& inputs, double spread) {
    if (inputs.size() < 2 || inputs.size() > 3) {
        throw InputError("reg_max: expects 2 or 3 input fields");
    }
    for (const Field* f : inputs) require_same_grid(*inputs.front(), *f, "reg_max");
    Field out(inputs.front()->grid());
    const std::size_t n = inputs.size();
    const auto size = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i) {
        std::array<double, 3> v{};
        for (std::size_t j = 0; j < n; ++j) v[j] = (*inputs[j])[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = reg_max(std::span<const double>(v.data(), n), spread);
    }
    return out;
}

}  // namespace pshenv
