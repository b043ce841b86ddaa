#pragma once

#include "pshenv/field.hpp"

#include <string>

namespace pshenv {

struct CompareReport {
    double sup = 0.0;       ///< max |a - b|
    double mean = 0.0;      ///< mean |a - b|
    double grad_sup = 0.0;  ///< max over axes of |D(a - b)|, D the forward difference quotient
    std::size_t nodes = 0;
};

/// Pointwise comparison of two fields on one grid. With `interior_only` the
/// two t-boundary levels are skipped. Throws InputError on grid mismatch.
CompareReport oracle_compare(const Field& a, const Field& b, bool interior_only = false);

/// Hessian regularity probe between two resolutions of one problem.
struct C11Probe {
    double hess_sup_coarse = 0.0;
    double hess_sup_fine = 0.0;
    double hess_ratio = 0.0;  ///< fine / coarse; near 1 when the Hessian is bounded
    double jump_coarse = 0.0;
    double jump_fine = 0.0;
    double jump_ratio = 0.0;  ///< fine / coarse; near 1/2 for a Lipschitz Hessian, near 1 at a jump
};

/// Uses the Frobenius norm of the real Hessian at every node, and the largest
/// difference of that norm between neighbouring nodes as the jump measure.
C11Probe c11_probe(const Field& coarse, const Field& fine);

std::string to_json(const CompareReport& r);
std::string to_json(const C11Probe& p);

}  // namespace pshenv
