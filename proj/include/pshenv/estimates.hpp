#pragma once

#include "pshenv/berman.hpp"
#include "pshenv/singular_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace pshenv {

/// Weighted sups of one converged report at one exponent B.
struct EstimateReport {
    double eps = 0.0;
    double beta = 0.0;
    double B_used = 0.0;
    double delta_used = 0.0;
    double mask_radius = 0.0;
    double weighted_grad = 0.0;           ///< sup e^{Bψ} |∇u|
    double paper_Q = 0.0;                 ///< sup e^{H(ũ)} |∇u|², H(s) = -Bs + 1/(s+1)
    double weighted_hess_boundary = 0.0;  ///< sup e^{B(F+ψ)} |∇²u| on the levels k ∈ {0, 1, nt-2, nt-1}
    double weighted_lap = 0.0;            ///< sup e^{Bψ̃} |Δu|
    double weighted_hess = 0.0;           ///< sup e^{Bψ̃} |∇²u|
};

enum class Estimate { grad, paper_Q, hess_boundary, lap, hess };

const char* estimate_name(Estimate e) noexcept;
double estimate_value(const EstimateReport& r, Estimate e) noexcept;
inline constexpr Estimate kAllEstimates[] = {Estimate::grad, Estimate::paper_Q, Estimate::hess_boundary,
                                             Estimate::lap, Estimate::hess};

struct EstimateVerdict {
    Estimate which = Estimate::grad;
    double B = 0.0;
    bool uniform = false;
    double variation = 0.0;        ///< max / min over the tail window
    double growth_exponent = 0.0;  ///< slope of log sup against log β at the smallest ε
};

struct EstimateScan {
    std::vector<EstimateReport> reports;  ///< ordered by (ε, β, B)
    std::vector<EstimateVerdict> verdicts;
};

struct EstimateOptions {
    std::vector<double> B_ladder = {0.0, 1.0, 2.0, 4.0, 8.0};
    /// Use ũ = u - (1 + δ/2)ψ̃ in paper_Q instead of u - (1 + δ)ψ.
    bool tilde_variant = false;
    double uniform_factor = 2.0;
};

/// Weighted sups over the model's kept nodes for every report and every B on
/// the ladder, and one verdict per (estimate, B). The verdict window is the
/// top half of the β levels of the two smallest ε. Throws InputError when the
/// model's mask radius is below two grid cells, a report is unconverged or
/// violates its invariants, or the grids differ.
EstimateScan estimate_scan(const std::vector<BranchResult>& branches, const SingularModel& model,
                           const EstimateOptions& opts = {});

/// The verdict window: reports of the two smallest ε restricted to the top
/// half of each branch's β levels.
std::vector<const SolveReport*> verdict_window(const std::vector<BranchResult>& branches);

/// sup |∇²u| over kept nodes within `radius` of `point`, unweighted.
double local_hessian_sup(const Field& u, const NodeMask& mask, std::array<double, 2> point, double radius);

std::string to_json(const EstimateScan& scan);
std::string to_csv(const EstimateScan& scan);

}  // namespace pshenv
