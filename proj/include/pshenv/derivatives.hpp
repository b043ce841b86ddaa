#pragma once

#include "pshenv/field.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pshenv {

/// Node predicate over the product grid, by flat index.
using NodeMask = std::vector<std::uint8_t>;

NodeMask full_mask(const ProductGrid& grid);

/// Finite-difference derivative magnitudes in the flat coordinates
/// (x1, x2, t). Centered in x and in t at interior levels; second-order
/// one-sided in t on the two boundary levels.
struct DerivativeStats {
    Field grad;       ///< |(u_x1, u_x2, u_t)|
    Field hess_norm;  ///< Frobenius norm of the 3×3 real Hessian
    Field laplacian;  ///< u_x1x1 + u_x2x2 + u_tt, i.e. 4(u_zz̄ + u_ww̄)
};

/// Nodes outside the mask are reported as 0. Throws InputError when a masked
/// node reads a non-finite value or the mask size does not match the grid.
DerivativeStats derivative_stats(const Field& u, const NodeMask& mask);

/// Third-derivative magnitude: Frobenius norm of the tensor of third
/// differences, centered where the stencil fits and one-sided in t near the
/// boundary.
Field third_derivative_norm(const Field& u, const NodeMask& mask);

}  // namespace pshenv
