#pragma once

// Node-local stencil kernels in two flavours: `serial` is written as plain
// nested loops over (k, i2, i1) and serves as the reference; `omp` walks the
// flat interior index under OpenMP and fuses the per-node work. Both must agree
// to roundoff; tests/test_kernels.cpp holds them to that.

#include "pshenv/grid.hpp"
#include "pshenv/hermitian.hpp"

#include <array>
#include <span>

namespace pshenv::kernels {

/// Number of Jacobian entries per interior row of the Monge-Ampère linearization.
inline constexpr int kStencilWidth = 15;

/// Offsets (d1, d2, dk) of the Jacobian stencil, in slot order.
inline constexpr std::array<std::array<int, 3>, kStencilWidth> kStencilOffsets{{
    {0, 0, 0},
    {-1, 0, 0}, {1, 0, 0},
    {0, -1, 0}, {0, 1, 0},
    {0, 0, -1}, {0, 0, 1},
    {-1, 0, -1}, {-1, 0, 1}, {1, 0, -1}, {1, 0, 1},
    {0, -1, -1}, {0, -1, 1}, {0, 1, -1}, {0, 1, 1},
}};

struct BermanInputs {
    std::span<const double> u;         ///< full product grid
    std::span<const double> h;         ///< obstacle, full product grid
    std::span<const double> a;         ///< α coefficient on the torus
    std::span<const double> omega_ww;  ///< ω_ww̄ per t-level
    double eps = 0.0;
    double beta = 0.0;
    /// Floor in R = log(ρ + η) - log(τ + η); η = 0 gives the pure log form.
    double eta = 0.0;
};

struct BermanOutputs {
    std::span<double> residual;  ///< interior size
    std::span<double> rho;       ///< interior size, det g̃ / det ω; may be empty
    std::span<double> jacobian;  ///< interior size × kStencilWidth; may be empty
};

struct BermanSummary {
    double sup_residual = 0.0;
    double min_gzz = 0.0;
    double min_rho = 0.0;
    double min_lambda = 0.0;  ///< smallest eigenvalue of g̃ relative to ω
};

namespace serial {

void hermitian_hessian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> a, std::span<const double> omega_ww, double eps,
                       HermitianFormField& out);

/// Residual ρ = det g̃/det ω, τ = exp(β(u-h) + 2 log(ε/4)),
/// R = log(ρ + η) - log(τ + η), and optionally its Jacobian in stencil slots
/// (Dirichlet neighbours included; the assembler drops them).
BermanSummary berman(const ProductGrid& grid, const BermanInputs& in, const BermanOutputs& out);

/// Δ_ω u = (u_x1x1 + u_x2x2)/4 + u_tt/(4 ω_ww̄) at interior nodes.
void complex_laplacian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out);

}  // namespace serial

namespace omp {

void hermitian_hessian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> a, std::span<const double> omega_ww, double eps,
                       HermitianFormField& out);

BermanSummary berman(const ProductGrid& grid, const BermanInputs& in, const BermanOutputs& out);

void complex_laplacian(const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out);

}  // namespace omp

/// Dispatches on exec.
BermanSummary berman(Exec exec, const ProductGrid& grid, const BermanInputs& in,
                     const BermanOutputs& out);
void complex_laplacian(Exec exec, const ProductGrid& grid, std::span<const double> u,
                       std::span<const double> omega_ww, std::span<double> out);

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();

}  // namespace pshenv::kernels
