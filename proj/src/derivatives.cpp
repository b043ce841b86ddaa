#include "pshenv/derivatives.hpp"

#include "pshenv/error.hpp"

#include <array>
#include <cmath>

namespace pshenv {

namespace {

enum Axis { X1 = 0, X2 = 1, T = 2 };

// First difference along one axis at every node.
Field d1(const Field& u, Axis axis) {
    const ProductGrid& g = u.grid();
    const TorusGrid& x = g.torus;
    Field out(g);
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                double v;
                if (axis == X1) {
                    v = (u(x.wrap1(i1 + 1), i2, k) - u(x.wrap1(i1 - 1), i2, k)) / (2.0 * x.h1());
                } else if (axis == X2) {
                    v = (u(i1, x.wrap2(i2 + 1), k) - u(i1, x.wrap2(i2 - 1), k)) / (2.0 * x.h2());
                } else if (k == 0) {
                    v = (-3.0 * u(i1, i2, 0) + 4.0 * u(i1, i2, 1) - u(i1, i2, 2)) / (2.0 * g.ht());
                } else if (k == g.nt - 1) {
                    v = (3.0 * u(i1, i2, k) - 4.0 * u(i1, i2, k - 1) + u(i1, i2, k - 2)) / (2.0 * g.ht());
                } else {
                    v = (u(i1, i2, k + 1) - u(i1, i2, k - 1)) / (2.0 * g.ht());
                }
                out(i1, i2, k) = v;
            }
        }
    }
    return out;
}

// Pure second difference along one axis.
Field d2(const Field& u, Axis axis) {
    const ProductGrid& g = u.grid();
    const TorusGrid& x = g.torus;
    Field out(g);
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                const double c = u(i1, i2, k);
                double v;
                if (axis == X1) {
                    v = (u(x.wrap1(i1 - 1), i2, k) - 2.0 * c + u(x.wrap1(i1 + 1), i2, k)) / (x.h1() * x.h1());
                } else if (axis == X2) {
                    v = (u(i1, x.wrap2(i2 - 1), k) - 2.0 * c + u(i1, x.wrap2(i2 + 1), k)) / (x.h2() * x.h2());
                } else if (k == 0) {
                    v = (2.0 * c - 5.0 * u(i1, i2, 1) + 4.0 * u(i1, i2, 2) - u(i1, i2, 3)) / (g.ht() * g.ht());
                } else if (k == g.nt - 1) {
                    v = (2.0 * c - 5.0 * u(i1, i2, k - 1) + 4.0 * u(i1, i2, k - 2) - u(i1, i2, k - 3)) /
                        (g.ht() * g.ht());
                } else {
                    v = (u(i1, i2, k - 1) - 2.0 * c + u(i1, i2, k + 1)) / (g.ht() * g.ht());
                }
                out(i1, i2, k) = v;
            }
        }
    }
    return out;
}

// The six distinct Hessian components, ordered 11, 22, tt, 12, 1t, 2t.
std::array<Field, 6> hessian_components(const Field& u) {
    const Field ux1 = d1(u, X1);
    const Field ux2 = d1(u, X2);
    return {d2(u, X1), d2(u, X2), d2(u, T), d1(ux1, X2), d1(ux1, T), d1(ux2, T)};
}

void check_mask(const Field& u, const NodeMask& mask) {
    if (mask.size() != u.size()) {
        throw InputError("derivative_stats: mask size does not match grid");
    }
}

void reject_nonfinite(const Field& f, const NodeMask& mask, const char* what) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask[i] && !std::isfinite(f[i])) {
            throw InputError(std::string(what) + ": masked node " + std::to_string(i) +
                             " has a stencil touching non-finite values");
        }
    }
}

}  // namespace

NodeMask full_mask(const ProductGrid& grid) { return NodeMask(grid.size(), 1); }

DerivativeStats derivative_stats(const Field& u, const NodeMask& mask) {
    check_mask(u, mask);
    const ProductGrid& g = u.grid();
    const std::array<Field, 3> D{d1(u, X1), d1(u, X2), d1(u, T)};
    const std::array<Field, 6> H = hessian_components(u);

    DerivativeStats s{Field(g), Field(g), Field(g)};
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask[i]) continue;
        s.grad[i] = std::sqrt(D[0][i] * D[0][i] + D[1][i] * D[1][i] + D[2][i] * D[2][i]);
        double fro = 0.0;
        for (int c = 0; c < 3; ++c) fro += H[c][i] * H[c][i];
        for (int c = 3; c < 6; ++c) fro += 2.0 * H[c][i] * H[c][i];
        s.hess_norm[i] = std::sqrt(fro);
        s.laplacian[i] = H[0][i] + H[1][i] + H[2][i];
    }
    reject_nonfinite(s.grad, mask, "derivative_stats");
    reject_nonfinite(s.hess_norm, mask, "derivative_stats");
    return s;
}

Field third_derivative_norm(const Field& u, const NodeMask& mask) {
    check_mask(u, mask);
    const std::array<Field, 6> H = hessian_components(u);
    // multiplicity of each Hessian slot in the symmetric 3×3 matrix
    constexpr std::array<double, 6> weight{1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
    Field out(u.grid());
    for (int c = 0; c < 6; ++c) {
        for (Axis a : {X1, X2, T}) {
            const Field d = d1(H[c], a);
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (mask[i]) out[i] += weight[c] * d[i] * d[i];
            }
        }
    }
    for (double& v : out.values()) v = std::sqrt(v);
    reject_nonfinite(out, mask, "third_derivative_norm");
    return out;
}

}  // namespace pshenv
