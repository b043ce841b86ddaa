#include "pshenv/berman.hpp"

#include "pshenv/error.hpp"
#include "pshenv/kernels.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>

namespace pshenv {

void ContinuationSchedule::validate() const {
    if (eps_list.empty() || beta_list.empty()) {
        throw InputError("schedule: eps_list and beta_list must be nonempty");
    }
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) throw InputError("schedule: eps outside (0, 1]");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InputError("schedule: eps_list must decrease");
    }
    for (std::size_t i = 0; i < beta_list.size(); ++i) {
        if (!(beta_list[i] >= beta0)) throw InputError("schedule: beta below beta0");
        if (i > 0 && !(beta_list[i] > beta_list[i - 1])) throw InputError("schedule: beta_list must increase");
    }
    if (!(newton.tol_residual_sup > 0.0 && newton.tol_residual_sup <= 1e-8)) {
        throw InputError("schedule: tol_residual_sup must lie in (0, 1e-8]");
    }
}

namespace {

std::vector<double> omega_levels(const ProductGrid& g, const BaseForm& base) {
    std::vector<double> w(g.nt);
    for (int k = 0; k < g.nt; ++k) w[k] = base.omega_ww(g.t(k));
    return w;
}

// Preconditioner slot for GMRES that applies a factorization owned elsewhere.
class FrozenLU {
public:
    using LU = Eigen::UmfPackLU<Eigen::SparseMatrix<double>>;
    FrozenLU() = default;
    void set(const LU* lu) { lu_ = lu; }
    template <typename M>
    FrozenLU& analyzePattern(const M&) { return *this; }
    template <typename M>
    FrozenLU& factorize(const M&) { return *this; }
    template <typename M>
    FrozenLU& compute(const M&) { return *this; }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return lu_->solve(b); }
    Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
    const LU* lu_ = nullptr;
};

// Sparse Jacobian with a fixed 15-point pattern over interior unknowns; the
// kernel's per-slot values are scattered straight into the value array. The LU
// factors of an earlier Jacobian precondition GMRES on the current one and are
// refreshed only when GMRES stops converging quickly.
class JacobianAssembler {
public:
    explicit JacobianAssembler(const ProductGrid& g) {
        const TorusGrid& x = g.torus;
        const std::size_t plane = g.plane();
        const auto n = static_cast<Eigen::Index>(g.interior_size());
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(g.interior_size() * kernels::kStencilWidth);
        for (int k = 1; k < g.nt - 1; ++k) {
            for (int i2 = 0; i2 < x.nx2; ++i2) {
                for (int i1 = 0; i1 < x.nx1; ++i1) {
                    const std::size_t row = g.index(i1, i2, k) - plane;
                    for (int s = 0; s < kernels::kStencilWidth; ++s) {
                        const auto& o = kernels::kStencilOffsets[s];
                        const int kk = k + o[2];
                        if (g.is_boundary_level(kk)) continue;
                        const std::size_t col = g.index(x.wrap1(i1 + o[0]), x.wrap2(i2 + o[1]), kk) - plane;
                        const double id = static_cast<double>(row * kernels::kStencilWidth + s + 1);
                        trip.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), id);
                    }
                }
            }
        }
        A_.resize(n, n);
        A_.setFromTriplets(trip.begin(), trip.end());
        A_.makeCompressed();
        slot_of_.resize(static_cast<std::size_t>(A_.nonZeros()));
        for (Eigen::Index p = 0; p < A_.nonZeros(); ++p) {
            slot_of_[static_cast<std::size_t>(p)] = static_cast<std::size_t>(A_.valuePtr()[p]) - 1;
        }
        lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
        lu_.analyzePattern(A_);
    }

    int factorizations() const { return factorizations_; }

    // Fills A from per-slot values and solves A δ = rhs to a relative residual
    // of kRelTol.
    Eigen::VectorXd solve(const std::vector<double>& jac, const std::vector<double>& rhs) {
        double* val = A_.valuePtr();
        for (std::size_t p = 0; p < slot_of_.size(); ++p) val[p] = jac[slot_of_[p]];
        const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
        if (factorizations_ > 0 && !stale_) {
            Eigen::GMRES<Eigen::SparseMatrix<double>, FrozenLU> gmres;
            gmres.set_restart(kMaxKrylov);
            gmres.setMaxIterations(kMaxKrylov);
            gmres.setTolerance(kRelTol);
            gmres.compute(A_);
            gmres.preconditioner().set(&lu_);
            Eigen::VectorXd x = gmres.solve(b);
            if (gmres.info() == Eigen::Success && relative_residual(x, b) <= kRelTol) {
                stale_ = gmres.iterations() > kRefreshAfter;
                return x;
            }
            stale_ = true;
        }
        refactor();
        Eigen::VectorXd x = lu_.solve(b);
        if (relative_residual(x, b) > kRelTol) {
            const Eigen::VectorXd r = b - A_ * x;
            x += lu_.solve(r);
        }
        return x;
    }

private:
    static constexpr int kMaxKrylov = 60;
    static constexpr int kRefreshAfter = 30;
    static constexpr double kRelTol = 1e-10;

    double relative_residual(const Eigen::VectorXd& x, const Eigen::Ref<const Eigen::VectorXd>& b) const {
        return (A_ * x - b).norm() / std::max(b.norm(), 1e-300);
    }

    void refactor() {
        lu_.factorize(A_);
        if (lu_.info() != Eigen::Success) {
            throw SolveError("solve_fixed: LU factorization failed (UMFPACK status " +
                             std::to_string(lu_.umfpackFactorizeReturncode()) + ")");
        }
        ++factorizations_;
        stale_ = false;
    }

    Eigen::SparseMatrix<double> A_;
    std::vector<std::size_t> slot_of_;
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu_;
    int factorizations_ = 0;
    bool stale_ = true;
};

// Roundoff scale of ρ = det g̃/det ω: each second difference of u carries an
// absolute error of a few ulp·|u|/h², which the determinant multiplies by the
// opposite diagonal entry.
double rho_noise(const ProductGrid& g, const HermitianFormField& H, double umax,
                 const std::vector<double>& om) {
    double G = 0.0, W = 0.0, Z = 0.0;
    for (std::size_t j = 0; j < H.size(); ++j) {
        G = std::max(G, std::abs(H.gzz[j]));
        W = std::max(W, std::abs(H.gww[j]));
        Z = std::max(Z, std::abs(H.gzw[j]));
    }
    const double e = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, umax);
    const double h1 = g.torus.h1(), h2 = g.torus.h2(), ht = g.ht();
    const double d_zz = 0.25 * e * (1.0 / (h1 * h1) + 1.0 / (h2 * h2));
    const double d_ww = 0.25 * e / (ht * ht);
    const double d_zw = 0.25 * e * (1.0 / (h1 * ht) + 1.0 / (h2 * ht));
    const double om_min = *std::min_element(om.begin(), om.end());
    return (W * d_zz + G * d_ww + 2.0 * Z * d_zw) / om_min;
}

struct Evaluator {
    const ProductGrid& g;
    std::span<const double> h;
    std::span<const double> a;
    const std::vector<double>& om;
    double eps, beta, eta;
    Exec exec;
    std::vector<double> R, rho, J;

    kernels::BermanSummary operator()(const Field& u, bool with_jacobian) {
        R.resize(g.interior_size());
        rho.resize(g.interior_size());
        if (with_jacobian) J.resize(g.interior_size() * kernels::kStencilWidth);
        kernels::BermanInputs in{u.values(), h, a, om, eps, beta, eta};
        kernels::BermanOutputs out{R, rho, with_jacobian ? std::span<double>(J) : std::span<double>()};
        return kernels::berman(exec, g, in, out);
    }
};

bool admissible(const kernels::BermanSummary& s, double adm_tol) {
    return s.min_gzz > 0.0 && s.min_rho >= -adm_tol && std::isfinite(s.sup_residual);
}

// Damped Newton from u. Leaves the last accepted iterate in u and its summary
// in s; returns an empty string on convergence and the failure message
// otherwise. A run whose merit drops by less than 1% over kStallWindow
// iterations is abandoned early.
struct NewtonRun {
    static constexpr std::size_t kStallWindow = 5;
    Evaluator& ev;
    JacobianAssembler& jac;
    const NewtonOptions& opts;
    double adm_tol;
    SolveReport& rep;

    std::string operator()(Field& u, kernels::BermanSummary& s, double tol, int max_iter) {
        const ProductGrid& g = ev.g;
        std::vector<double> rhs(g.interior_size());
        std::vector<double> history{s.sup_residual};
        Field trial(g);
        for (int it = 0; s.sup_residual > tol; ++it) {
            if (it >= max_iter) {
                std::ostringstream msg;
                msg << "no convergence in " << max_iter << " iterations (sup|R| = " << s.sup_residual << ")";
                return msg.str();
            }
            for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = -ev.R[j];
            const Eigen::VectorXd step = jac.solve(ev.J, rhs);

            const double merit = s.sup_residual;
            double lambda = 1.0;
            for (;;) {
                trial = u;
                for (std::size_t j = 0; j < rhs.size(); ++j) {
                    trial[j + g.plane()] += lambda * step[static_cast<Eigen::Index>(j)];
                }
                const kernels::BermanSummary st = ev(trial, false);
                if (admissible(st, adm_tol) && st.sup_residual <= (1.0 - 1e-4 * lambda) * merit) break;
                lambda *= 0.5;
                if (lambda < opts.damping_min) {
                    std::ostringstream msg;
                    msg << "damping underflow at iteration " << it << " (sup|R| = " << merit << ")";
                    return msg.str();
                }
            }
            std::swap(u, trial);
            s = ev(u, true);
            history.push_back(s.sup_residual);
            if (history.size() > kStallWindow &&
                s.sup_residual > 0.99 * history[history.size() - 1 - kStallWindow]) {
                std::ostringstream msg;
                msg << "stalled at sup|R| = " << s.sup_residual << " after " << it + 1 << " iterations";
                ++rep.newton_iters;
                rep.residual_path.push_back(s.sup_residual);
                rep.min_eigen_path.push_back(s.min_lambda);
                return msg.str();
            }
            ++rep.newton_iters;
            rep.residual_path.push_back(s.sup_residual);
            rep.min_eigen_path.push_back(s.min_lambda);
        }
        return {};
    }
};

}  // namespace

struct NewtonWorkspace::Impl {
    explicit Impl(const ProductGrid& g) : jac(g) {}
    JacobianAssembler jac;
};

NewtonWorkspace::NewtonWorkspace(const ProductGrid& grid)
    : grid_(grid), impl_(std::make_unique<Impl>(grid)) {}

NewtonWorkspace::~NewtonWorkspace() = default;

int NewtonWorkspace::factorizations() const noexcept { return impl_->jac.factorizations(); }

Field residual(const Field& u, const BoundaryFamily& family, const ObstacleSolution& obstacle, double eps,
               double beta, Exec exec) {
    const ProductGrid& g = u.grid();
    require_same_grid(u, obstacle.h, "residual");
    if (!(family.grid == g)) throw InputError("residual: family lives on a different grid");
    const std::vector<double> om = omega_levels(g, family.base);
    Evaluator ev{g, obstacle.h.values(), family.base.a.values(), om, eps, beta, 0.0, exec, {}, {}, {}};
    const kernels::BermanSummary s = ev(u, false);
    if (!(s.min_rho > 0.0)) {
        const auto it = std::min_element(ev.rho.begin(), ev.rho.end());
        std::ostringstream msg;
        msg << "residual: det g~ = " << *it * om[1 + static_cast<std::size_t>(it - ev.rho.begin()) / g.plane()]
            << " <= 0 at interior node " << (static_cast<std::size_t>(it - ev.rho.begin()) + g.plane())
            << " (outside the admissible cone)";
        throw InputError(msg.str());
    }
    Field r(g, 0.0);
    for (std::size_t j = 0; j < ev.R.size(); ++j) r[j + g.plane()] = ev.R[j];
    return r;
}

SolveReport solve_fixed(const BoundaryFamily& family, const ObstacleSolution& obstacle, double eps,
                        double beta, const Field& init, const NewtonOptions& opts,
                        NewtonWorkspace* workspace) {
    const auto t0 = std::chrono::steady_clock::now();
    const ProductGrid& g = family.grid;
    require_same_grid(init, obstacle.h, "solve_fixed");
    if (!(init.grid() == g)) throw InputError("solve_fixed: init lives on a different grid");
    if (!init.all_finite()) throw InputError("solve_fixed: init has non-finite values");
    if (!(eps > 0.0) || !(beta > 0.0)) throw InputError("solve_fixed: eps and beta must be positive");

    const Field& phi = family.phi_eps(eps);
    Field u = init;
    for (int k : {0, g.nt - 1}) u.set_level(k, phi.level(k));

    const std::vector<double> om = omega_levels(g, family.base);
    // Tolerances come from φ_ε rather than the initial iterate so that every β
    // of a branch sees the same ones and warm starts stay admissible.
    const double umax = std::max(std::abs(phi.max()), std::abs(phi.min()));
    const double noise =
        rho_noise(g, hermitian_hessian(phi, family.base, eps, opts.exec), umax, om);
    const double tol = opts.tol_residual_sup;
    const double eta = opts.eta >= 0.0 ? opts.eta : std::clamp(10.0 * noise / tol, 1e-8, 1.0);
    const double adm_tol = opts.admissible_tol >= 0.0 ? opts.admissible_tol : 10.0 * noise;

    Evaluator ev{g, obstacle.h.values(), family.base.a.values(), om, eps, beta, eta, opts.exec, {}, {}, {}};
    kernels::BermanSummary s = ev(u, true);
    if (!admissible(s, adm_tol)) {
        std::ostringstream msg;
        msg << "solve_fixed: initial iterate is not admissible (min g_zz = " << s.min_gzz
            << ", min rho = " << s.min_rho << ")";
        throw InputError(msg.str());
    }

    SolveReport rep;
    rep.eps = eps;
    rep.beta = beta;
    rep.eta = eta;
    rep.residual_path.push_back(s.sup_residual);
    rep.min_eigen_path.push_back(s.min_lambda);

    std::unique_ptr<NewtonWorkspace> own;
    if (workspace == nullptr) {
        own = std::make_unique<NewtonWorkspace>(g);
        workspace = own.get();
    } else if (!(workspace->grid() == g)) {
        throw InputError("solve_fixed: workspace lives on a different grid");
    }
    JacobianAssembler& jac = workspace->impl().jac;
    const int factor0 = jac.factorizations();
    NewtonRun newton{ev, jac, opts, adm_tol, rep};

    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "solve_fixed: " << why << " (eps = " << eps << ", beta = " << beta << ")";
        throw SolveError(msg.str(), rep.residual_path);
    };

    const std::string why = newton(u, s, tol, opts.max_iter);
    if (!why.empty()) fail(why);

    rep.factorizations = jac.factorizations() - factor0;
    rep.residual_sup = s.sup_residual;
    rep.converged = true;

    double lo = std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        lo = std::min(lo, u[i] - phi[i]);
        hi = std::min(hi, obstacle.h[i] - u[i]);
    }
    rep.sandwich_lower_gap = lo;
    rep.sandwich_upper_gap = hi;
    rep.sandwich_ok = lo >= -1e-8 && hi >= -1e-8;

    const HermitianFormField H = hermitian_hessian(u, family.base, eps, opts.exec);
    rep.trace_violations = trace_bound_violations(H, family.base, eps, 4.0 - 1e-6);
    rep.trace_bound_ok = rep.trace_violations == 0;

    if (s.min_rho > 0.0) {
        Evaluator pure{g, obstacle.h.values(), family.base.a.values(), om, eps, beta, 0.0, opts.exec, {}, {}, {}};
        rep.log_residual_sup = pure(u, false).sup_residual;
    }
    rep.u = std::move(u);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<BranchResult> continuation_solve(const ContinuationSchedule& schedule,
                                             const BoundaryFamily& family,
                                             const ObstacleProvider& obstacles) {
    schedule.validate();
    std::vector<BranchResult> out;
    for (double eps : schedule.eps_list) {
        BranchResult br;
        br.eps = eps;
        const ObstacleSolution& obs = obstacles(eps);
        const Field* init = &family.phi_eps(eps);
        NewtonWorkspace ws(family.grid);
        bool failed = false;
        for (double beta : schedule.beta_list) {
            try {
                br.reports.push_back(solve_fixed(family, obs, eps, beta, *init, schedule.newton, &ws));
            } catch (const SolveError& e) {
                br.failure = e.what();
                failed = true;
                break;
            } catch (const InputError& e) {
                br.failure = e.what();
                failed = true;
                break;
            }
            init = &br.reports.back().u;
            if (br.reports.size() >= 2) {
                const auto& a = br.reports[br.reports.size() - 2].u;
                const auto& b = br.reports.back().u;
                br.cauchy.push_back(sup_distance(a, b));
            }
        }
        br.complete = !failed;
        out.push_back(std::move(br));
    }
    return out;
}

Envelope extract_envelope(const std::vector<BranchResult>& branches) {
    const BranchResult* best = nullptr;
    for (const BranchResult& b : branches) {
        if (b.reports.empty()) continue;
        if (best == nullptr || b.eps < best->eps) best = &b;
    }
    if (best == nullptr) throw InputError("extract_envelope: no converged reports");
    Envelope e;
    e.V = best->reports.back().u;
    e.eps = best->eps;
    e.beta = best->reports.back().beta;
    if (!best->cauchy.empty()) e.uncertainty = best->cauchy.back();
    return e;
}

}  // namespace pshenv
