#pragma once

#include "pshenv/field.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pshenv::oracle {

// Reference geodesics for endpoint data that depends on x1 alone, with a ≡ 1.
// In that sector α + i∂∂̄u has determinant (1/16)[(4 + u_xx)u_tt - u_xt²], so
// V = 2x² + u turns the problem into the real homogeneous Monge-Ampère
// equation, whose solution is the convex envelope of the boundary data.
//
// Both constructions below are exact for the piecewise-linear interpolant of
// the lifted samples; they share nothing beyond the lift.

/// Periodic samples u_i at x_i = (i + offset)/n, lifted to V = 2x² + u on the
/// unrolled window [-K, K + 1).
struct ConvexLift {
    std::size_t n = 0;       ///< samples per period
    double offset = 0.0;
    int K = 3;
    std::vector<double> x;   ///< ascending, spacing 1/n
    std::vector<double> V;

    double h() const noexcept { return 1.0 / static_cast<double>(n); }
    /// Smallest second difference of V (≥ -1e-10 for a convex lift).
    double min_second_difference() const;
    /// Largest deviation of V(x+1) - V(x) - 4x - 2 from its mean.
    double quasi_periodicity_defect() const;
    /// Slopes of the first and last segments.
    double slope_min() const;
    double slope_max() const;
};

/// Throws InputError if samples is empty or K < 2.
ConvexLift make_lift(std::span<const double> samples, double offset = 0.5, int K = 3);

/// True if every second difference of V is ≥ -tol.
bool is_convex(const ConvexLift& lift, double tol = 1e-10);

struct DualSamples {
    std::vector<double> p;
    std::vector<double> value;  ///< V*(p) = max_i (p x_i - V_i)
    std::size_t clamped = 0;    ///< slopes moved into [slope_min, slope_max]
};

/// Legendre transform by the monotone scan (argmax is nondecreasing in p).
/// Slopes must be ascending; those outside the attained range are clamped and
/// counted. Throws InputError on a non-convex lift or unsorted slopes.
DualSamples discrete_legendre(const ConvexLift& lift, std::span<const double> slopes);

/// Inverse transform of dual samples at the lift's nodes: max_j (p_j x - V*_j).
std::vector<double> inverse_legendre(const DualSamples& dual, std::span<const double> x);

/// Geodesic profiles Φ(x_i, t) for each t, by linear interpolation of the
/// duals. Rows follow t_levels. Throws InputError if either lift is not convex
/// or the sample counts differ.
std::vector<std::vector<double>> geodesic_profiles_by_duality(std::span<const double> phi0,
                                                              std::span<const double> phi1,
                                                              std::span<const double> t_levels,
                                                              double offset = 0.5);

/// Convex envelope in (x, t) of data given on t = 0 and t = 1, unlifted.
/// Non-convex data is replaced by its lower convex hull first.
std::vector<std::vector<double>> convex_envelope_profiles(std::span<const double> phi0,
                                                          std::span<const double> phi1,
                                                          std::span<const double> t_levels,
                                                          double offset = 0.5);

/// Geodesic profiles of analytic x1-profiles at n nodes x_i = (i + offset)/n,
/// computed from n·oversample samples and restricted to the coarse nodes. The
/// piecewise-linear exactness leaves O((h/oversample)²) kinks in the values,
/// so second differences at spacing h carry only O(1/oversample²) noise.
std::vector<std::vector<double>> sampled_geodesic_profiles(const std::function<double(double)>& phi0,
                                                           const std::function<double(double)>& phi1,
                                                           std::size_t n, std::span<const double> t_levels,
                                                           int oversample = 16, double offset = 0.5);

/// Field versions on a product grid; endpoints must be independent of x2
/// (InputError otherwise). Levels run over grid.t(k).
Field geodesic_by_duality(const SurfaceField& phi0, const SurfaceField& phi1, const ProductGrid& grid);
Field convex_envelope_2d(const SurfaceField& phi0, const SurfaceField& phi1, const ProductGrid& grid);

/// Broadcasts per-level x1 profiles to a field on grid (rows indexed by k).
Field broadcast_profiles(const std::vector<std::vector<double>>& rows, const ProductGrid& grid);

/// Row i1 of a surface field that must not depend on x2.
std::vector<double> x1_profile(const SurfaceField& s);

/// Discrete (V_xx V_tt - V_xt²) of the lifted profiles at interior nodes, for
/// the degenerate-MA check. Rows follow uniformly spaced t levels.
std::vector<std::vector<double>> lifted_determinant(const std::vector<std::vector<double>>& rows, double ht);

}  // namespace pshenv::oracle
