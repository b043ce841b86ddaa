#pragma once

#include "pshenv/field.hpp"

#include <span>
#include <vector>

namespace pshenv {

/// Smoothing kernel of the regularized maximum on [-1/2, 1/2]:
///   θ(s) = (315/128)(1 - 4s²)⁴,
/// a C³ even bump of unit mass. For spread σ the kernel is rescaled to
/// [-σ, σ].
double reg_max_kernel(double s) noexcept;

/// Cumulative distribution of the kernel on [-1/2, 1/2].
double reg_max_kernel_cdf(double s) noexcept;

/// Regularized maximum of up to three numbers:
///   M(a) = ∫ max_i(y_i) Π θ_σ(y_i - a_i) dy = E[max_i(a_i + S_i)],
/// evaluated as a₀ + ∫ Θ_σ(x - a₀)(1 - Π_{i≥1} Θ_σ(x - a_i)) dx, a₀ the largest
/// input, with Gauss-Legendre quadrature on the pieces between the breakpoints
/// a_i ± σ. The integrand is nonnegative, so M ≥ max(a) holds in floating point. Returns max(a)
/// unchanged when the two largest inputs differ by at least 2σ.
double reg_max(std::span<const double> a, double spread = 0.5);
double reg_max(double a, double b, double spread = 0.5);
double reg_max3(double a, double b, double c, double spread = 0.5);

/// Node-wise regularized maximum of 2 or 3 fields on one grid.
Field reg_max(const std::vector<const Field*>& inputs, double spread = 0.5);

}  // namespace pshenv
