#pragma once

#include "pshenv/base_form.hpp"
#include "pshenv/singular_model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pshenv {

/// A named set of inputs: base form, endpoints and singular-model parameters.
struct Preset {
    std::string name;
    BaseForm base;
    EndpointPair ends;
    double c = 0.0;      ///< log coefficient of ψ
    double delta = 1.0;
    bool x1_only = false;  ///< endpoints depend on x1 alone (oracle applies)
    /// Endpoints strictly ω-psh, so the singular model and the solver accept
    /// them. False for corner, whose X-density vanishes on a band.
    bool solvable = true;
    /// Endpoint profiles as functions of x1 when x1_only, for the oracle.
    std::function<double(double)> phi0_x1;
    std::function<double(double)> phi1_x1;
};

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// Builds a preset on the given torus grid:
///   smooth             a ≡ 1; φ₀ = 0, φ₁ = (cos 2πx1 - 1)/16
///   constants          a ≡ 1; φ₀ = 0, φ₁ = 1
///   flat-constants     as constants, flat annulus metric
///   corner             a ≡ 1; φ₀ = 0, φ₁ with φ₁'' = -4 on |x1 - 1/2| < 1/8, 4/3 elsewhere
///   log-singular-c1    a ≡ 1; φ_i = κσ + perturbation, σ = (1/2) log(S + s0) + S/4,
///                      s0 = (3πh)², c = 1
///   degenerate-lambda4 a = S/2 (λ = 4, normalized); endpoints as above, c = 1
/// Throws InputError on an unknown name.
Preset make_preset(const std::string& name, const TorusGrid& grid);

/// σ = (1/2) log(S + s0) + S/4, the log-singular profile used for singular
/// endpoints (s0 = 0) and its grid-scale smoothing (s0 > 0).
double log_singular_profile(double x1, double x2, double s0 = 0.0) noexcept;

/// The corner profile (sup 0) as a function of x1.
double corner_profile(double x1) noexcept;

}  // namespace pshenv
