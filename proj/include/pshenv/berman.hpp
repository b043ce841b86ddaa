#pragma once

#include "pshenv/boundary_family.hpp"
#include "pshenv/field.hpp"
#include "pshenv/hermitian.hpp"
#include "pshenv/obstacle.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace pshenv {

struct NewtonOptions {
    int max_iter = 60;
    double tol_residual_sup = 1e-8;
    double damping_min = 1.0 / (1 << 20);
    /// Floor η in R = log(ρ + η) - log(τ + η). Negative selects it from the
    /// roundoff level of the determinant on the grid (see berman.cpp).
    double eta = -1.0;
    /// Determinants down to -admissible_tol still count as admissible; at large
    /// β the solution's determinant is zero to roundoff away from the boundary.
    double admissible_tol = -1.0;
    Exec exec = Exec::parallel;
};

struct ContinuationSchedule {
    std::vector<double> eps_list;   ///< decreasing, in (0, 1]
    std::vector<double> beta_list;  ///< increasing
    double beta0 = 0.0;             ///< smallest β the schedule is meant for
    NewtonOptions newton;

    /// Throws InputError if the lists violate their ordering or ranges.
    void validate() const;
};

struct SolveReport {
    double eps = 0.0;
    double beta = 0.0;
    Field u;
    int newton_iters = 0;
    double residual_sup = 0.0;      ///< sup |R| in the floored form the solver drives to zero
    double log_residual_sup = std::numeric_limits<double>::quiet_NaN();  ///< pure log form where defined
    double eta = 0.0;
    std::vector<double> residual_path;
    std::vector<double> min_eigen_path;  ///< λ_min(g̃ relative to ω) per accepted iterate
    int factorizations = 0;              ///< LU factorizations this solve performed
    bool converged = false;
    bool sandwich_ok = false;
    bool trace_bound_ok = false;
    double sandwich_lower_gap = 0.0;  ///< min (u - φ_ε)
    double sandwich_upper_gap = 0.0;  ///< min (h_ε - u)
    std::size_t trace_violations = 0;
    double seconds = 0.0;
};

/// Linear-solver state carried between solves on one grid: the sparsity
/// pattern, its ordering, and the most recent LU factors, which precondition
/// GMRES on later Jacobians until GMRES stops converging quickly.
class NewtonWorkspace {
public:
    explicit NewtonWorkspace(const ProductGrid& grid);
    ~NewtonWorkspace();
    NewtonWorkspace(const NewtonWorkspace&) = delete;
    NewtonWorkspace& operator=(const NewtonWorkspace&) = delete;

    const ProductGrid& grid() const noexcept { return grid_; }
    int factorizations() const noexcept;

    struct Impl;
    Impl& impl() noexcept { return *impl_; }

private:
    ProductGrid grid_;
    std::unique_ptr<Impl> impl_;
};

/// Pure log-form residual at interior nodes (boundary levels set to 0):
///   log(det g̃ / det ω) - β(u - h_ε) - 2 log(ε/4).
/// Throws InputError if det g̃ ≤ 0 at any interior node.
Field residual(const Field& u, const BoundaryFamily& family, const ObstacleSolution& obstacle, double eps,
               double beta, Exec exec = Exec::parallel);

/// Damped Newton for (α + εω + i∂∂̄u)² = e^{β(u-h_ε) + 2log(ε/4)} ω² with
/// u = φ_ε on t = 0, 1. Each step solves the linearization with a sparse LU
/// factorization and backtracks on sup |R| until the iterate is admissible and
/// the merit decreases. Throws SolveError on damping underflow, stagnation or
/// iteration exhaustion (the message carries the last residual); never returns an
/// unconverged report. Passing a workspace lets consecutive solves share
/// factorizations.
SolveReport solve_fixed(const BoundaryFamily& family, const ObstacleSolution& obstacle, double eps,
                        double beta, const Field& init, const NewtonOptions& opts = {},
                        NewtonWorkspace* workspace = nullptr);

/// Outcome of one ε-branch of a continuation.
struct BranchResult {
    double eps = 0.0;
    std::vector<SolveReport> reports;  ///< ascending β
    std::vector<double> cauchy;        ///< sup |u_{β_{i+1}} - u_{β_i}|
    bool complete = false;
    std::string failure;
};

using ObstacleProvider = std::function<const ObstacleSolution&(double eps)>;

/// Outer loop over ε, inner sweep over ascending β with warm starts. The first
/// β of each branch starts from φ_ε. A failed solve ends its branch and keeps
/// the completed reports.
std::vector<BranchResult> continuation_solve(const ContinuationSchedule& schedule,
                                             const BoundaryFamily& family,
                                             const ObstacleProvider& obstacles);

struct Envelope {
    Field V;
    double eps = 0.0;
    double beta = 0.0;
    double uncertainty = std::numeric_limits<double>::infinity();  ///< last β-Cauchy gap
};

/// Largest-β iterate at the smallest ε that has at least one report, with the
/// last β-Cauchy gap of that branch as its uncertainty (∞ if only one level).
Envelope extract_envelope(const std::vector<BranchResult>& branches);

}  // namespace pshenv
