#include "pshenv/estimates.hpp"

#include "pshenv/derivatives.hpp"
#include "pshenv/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace pshenv {

const char* estimate_name(Estimate e) noexcept {
    switch (e) {
        case Estimate::grad: return "weighted_grad";
        case Estimate::paper_Q: return "paper_Q";
        case Estimate::hess_boundary: return "weighted_hess_boundary";
        case Estimate::lap: return "weighted_lap";
        case Estimate::hess: return "weighted_hess";
    }
    return "?";
}

double estimate_value(const EstimateReport& r, Estimate e) noexcept {
    switch (e) {
        case Estimate::grad: return r.weighted_grad;
        case Estimate::paper_Q: return r.paper_Q;
        case Estimate::hess_boundary: return r.weighted_hess_boundary;
        case Estimate::lap: return r.weighted_lap;
        case Estimate::hess: return r.weighted_hess;
    }
    return 0.0;
}

namespace {

// Sups at this level are stencil roundoff on affine data.
constexpr double kNegligible = 1e-9;

void check_report(const SolveReport& r, const SingularModel& model) {
    if (!(r.u.grid() == model.grid)) throw InputError("estimate_scan: report grid differs from the model grid");
    if (!r.converged || !r.sandwich_ok || !r.trace_bound_ok) {
        std::ostringstream os;
        os << "estimate_scan: report at eps = " << r.eps << ", beta = " << r.beta
           << " is unconverged or violates its invariants";
        throw InputError(os.str());
    }
}

std::vector<EstimateReport> scan_report(const SolveReport& r, const SingularModel& model,
                                        const EstimateOptions& opts) {
    const ProductGrid& g = model.grid;
    const DerivativeStats d = derivative_stats(r.u, model.mask);
    std::vector<EstimateReport> out;
    for (double B : opts.B_ladder) {
        EstimateReport e;
        e.eps = r.eps;
        e.beta = r.beta;
        e.B_used = B;
        e.delta_used = model.delta;
        e.mask_radius = model.mask_radius;
        for (int k = 0; k < g.nt; ++k) {
            const bool near_boundary = k <= 1 || k >= g.nt - 2;
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                for (int i1 = 0; i1 < g.nx1(); ++i1) {
                    const std::size_t n = g.index(i1, i2, k);
                    if (model.masked(n)) continue;
                    const double psi = model.psi[n], tpsi = model.tilde_psi[n];
                    const double grad = d.grad[n], hess = d.hess_norm[n], lap = std::abs(d.laplacian[n]);
                    const double s = opts.tilde_variant ? r.u[n] - (1.0 + 0.5 * model.delta) * tpsi
                                                        : r.u[n] - (1.0 + model.delta) * psi;
                    const double H = -B * s + 1.0 / (s + 1.0);
                    e.weighted_grad = std::max(e.weighted_grad, std::exp(B * psi) * grad);
                    e.paper_Q = std::max(e.paper_Q, std::exp(H) * grad * grad);
                    if (near_boundary) {
                        e.weighted_hess_boundary =
                            std::max(e.weighted_hess_boundary, std::exp(B * (model.F[n] + psi)) * hess);
                    }
                    e.weighted_lap = std::max(e.weighted_lap, std::exp(B * tpsi) * lap);
                    e.weighted_hess = std::max(e.weighted_hess, std::exp(B * tpsi) * hess);
                }
            }
        }
        out.push_back(e);
    }
    return out;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

std::vector<const SolveReport*> verdict_window(const std::vector<BranchResult>& branches) {
    std::vector<const BranchResult*> order;
    for (const BranchResult& b : branches) {
        if (!b.reports.empty()) order.push_back(&b);
    }
    std::sort(order.begin(), order.end(), [](const BranchResult* a, const BranchResult* b) { return a->eps < b->eps; });
    if (order.size() > 2) order.resize(2);
    std::vector<const SolveReport*> out;
    for (const BranchResult* b : order) {
        const std::size_t n = b->reports.size();
        for (std::size_t i = n / 2; i < n; ++i) out.push_back(&b->reports[i]);
    }
    return out;
}

EstimateScan estimate_scan(const std::vector<BranchResult>& branches, const SingularModel& model,
                           const EstimateOptions& opts) {
    const double cell = std::max(model.grid.torus.h1(), model.grid.torus.h2());
    if (!model.singular_points.empty() && model.mask_radius < 2.0 * cell * (1.0 - 1e-12)) {
        throw InputError("estimate_scan: mask radius is below two grid cells");
    }
    EstimateScan scan;
    std::map<const SolveReport*, std::size_t> first;
    for (const BranchResult& b : branches) {
        for (const SolveReport& r : b.reports) {
            check_report(r, model);
            first[&r] = scan.reports.size();
            const std::vector<EstimateReport> rows = scan_report(r, model, opts);
            scan.reports.insert(scan.reports.end(), rows.begin(), rows.end());
        }
    }

    const std::vector<const SolveReport*> window = verdict_window(branches);
    double eps_min = std::numeric_limits<double>::infinity();
    for (const SolveReport* r : window) eps_min = std::min(eps_min, r->eps);
    for (std::size_t b = 0; b < opts.B_ladder.size(); ++b) {
        for (Estimate which : kAllEstimates) {
            EstimateVerdict v;
            v.which = which;
            v.B = opts.B_ladder[b];
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            std::vector<double> lb, ls;
            for (const SolveReport* r : window) {
                const double val = estimate_value(scan.reports[first.at(r) + b], which);
                lo = std::min(lo, val);
                hi = std::max(hi, val);
                if (r->eps == eps_min && val > 0.0) {
                    lb.push_back(std::log(r->beta));
                    ls.push_back(std::log(val));
                }
            }
            if (window.empty()) {
                v.variation = std::numeric_limits<double>::infinity();
            } else if (hi <= kNegligible) {
                v.variation = 1.0;
            } else {
                v.variation = hi / std::max(lo, kNegligible);
            }
            v.uniform = v.variation <= opts.uniform_factor;
            v.growth_exponent = slope(lb, ls);
            scan.verdicts.push_back(v);
        }
    }
    return scan;
}

double local_hessian_sup(const Field& u, const NodeMask& mask, std::array<double, 2> point, double radius) {
    const ProductGrid& g = u.grid();
    NodeMask near = mask;
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                const double d1 = periodic_distance(g.torus.x1(i1), point[0]);
                const double d2 = periodic_distance(g.torus.x2(i2), point[1]);
                if (std::hypot(d1, d2) > radius) near[g.index(i1, i2, k)] = 0;
            }
        }
    }
    const DerivativeStats d = derivative_stats(u, near);
    double s = 0.0;
    for (std::size_t n = 0; n < near.size(); ++n) {
        if (near[n]) s = std::max(s, d.hess_norm[n]);
    }
    return s;
}

std::string to_json(const EstimateScan& scan) {
    nlohmann::json j;
    j["reports"] = nlohmann::json::array();
    for (const EstimateReport& r : scan.reports) {
        j["reports"].push_back({{"eps", r.eps},
                                {"beta", r.beta},
                                {"B", r.B_used},
                                {"delta", r.delta_used},
                                {"mask_radius", r.mask_radius},
                                {"weighted_grad", r.weighted_grad},
                                {"paper_Q", r.paper_Q},
                                {"weighted_hess_boundary", r.weighted_hess_boundary},
                                {"weighted_lap", r.weighted_lap},
                                {"weighted_hess", r.weighted_hess}});
    }
    j["verdicts"] = nlohmann::json::array();
    for (const EstimateVerdict& v : scan.verdicts) {
        nlohmann::json e = {{"estimate", estimate_name(v.which)},
                            {"B", v.B},
                            {"verdict", v.uniform ? "UNIFORM" : "GROWTH"},
                            {"growth_exponent", v.growth_exponent}};
        e["variation"] = std::isfinite(v.variation) ? nlohmann::json(v.variation) : nlohmann::json(nullptr);
        j["verdicts"].push_back(e);
    }
    return j.dump(2);
}

std::string to_csv(const EstimateScan& scan) {
    std::ostringstream os;
    os.precision(17);
    os << "eps,beta,B,delta,mask_radius,weighted_grad,paper_Q,weighted_hess_boundary,weighted_lap,weighted_hess\n";
    for (const EstimateReport& r : scan.reports) {
        os << r.eps << ',' << r.beta << ',' << r.B_used << ',' << r.delta_used << ',' << r.mask_radius << ','
           << r.weighted_grad << ',' << r.paper_Q << ',' << r.weighted_hess_boundary << ',' << r.weighted_lap << ','
           << r.weighted_hess << '\n';
    }
    return os.str();
}

}  // namespace pshenv
