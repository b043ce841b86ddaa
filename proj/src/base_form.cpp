#include "pshenv/base_form.hpp"

#include "pshenv/error.hpp"

#include <numbers>
#include <string>

namespace pshenv {

BaseForm make_degenerate_form(double lambda, const TorusGrid& grid) {
    if (!(lambda >= 0.0)) {
        throw InputError("make_degenerate_form: lambda must be nonnegative");
    }
    if (lambda > 4.0) {
        throw InputError("make_degenerate_form: lambda = " + std::to_string(lambda) +
                         " exceeds 4, the form is not semipositive");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    BaseForm base;
    base.a = SurfaceField::sample(grid, [lambda](double x1, double x2) {
        return 1.0 - (lambda / 8.0) * (std::cos(two_pi * x1) + std::cos(two_pi * x2));
    });
    return base;
}

BaseForm normalized(BaseForm base) {
    const double m = base.a.max();
    if (!(m > 0.0)) {
        throw InputError("normalized: form vanishes identically");
    }
    for (double& v : base.a.values()) v /= m;
    return base;
}

BaseForm make_constant_form(double value, const TorusGrid& grid, AnnulusMetric metric) {
    if (!(value >= 0.0)) {
        throw InputError("make_constant_form: coefficient must be nonnegative");
    }
    BaseForm base;
    base.a = SurfaceField(grid, value);
    base.metric = metric;
    return base;
}

}  // namespace pshenv
