#include "pshenv/compare.hpp"

#include "pshenv/derivatives.hpp"
#include "pshenv/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace pshenv {

CompareReport oracle_compare(const Field& a, const Field& b, bool interior_only) {
    require_same_grid(a, b, "oracle_compare");
    const ProductGrid& g = a.grid();
    const int k0 = interior_only ? 1 : 0, k1 = interior_only ? g.nt - 1 : g.nt;
    auto d = [&](int i1, int i2, int k) { return a(i1, i2, k) - b(i1, i2, k); };
    CompareReport r;
    double sum = 0.0;
    for (int k = k0; k < k1; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                const double e = d(i1, i2, k);
                r.sup = std::max(r.sup, std::abs(e));
                sum += std::abs(e);
                ++r.nodes;
                const double g1 = (d(g.torus.wrap1(i1 + 1), i2, k) - e) / g.torus.h1();
                const double g2 = (d(i1, g.torus.wrap2(i2 + 1), k) - e) / g.torus.h2();
                r.grad_sup = std::max({r.grad_sup, std::abs(g1), std::abs(g2)});
                if (k + 1 < g.nt) r.grad_sup = std::max(r.grad_sup, std::abs((d(i1, i2, k + 1) - e) / g.ht()));
            }
        }
    }
    r.mean = r.nodes ? sum / static_cast<double>(r.nodes) : 0.0;
    return r;
}

namespace {

std::pair<double, double> hessian_measures(const Field& u) {
    const ProductGrid& g = u.grid();
    const Field H = derivative_stats(u, full_mask(g)).hess_norm;
    double sup = 0.0, jump = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                const double v = H(i1, i2, k);
                sup = std::max(sup, v);
                jump = std::max({jump, std::abs(H(g.torus.wrap1(i1 + 1), i2, k) - v),
                                 std::abs(H(i1, g.torus.wrap2(i2 + 1), k) - v)});
                if (k + 1 < g.nt) jump = std::max(jump, std::abs(H(i1, i2, k + 1) - v));
            }
        }
    }
    return {sup, jump};
}

double ratio(double fine, double coarse) { return coarse > 0.0 ? fine / coarse : 0.0; }

}  // namespace

C11Probe c11_probe(const Field& coarse, const Field& fine) {
    C11Probe p;
    std::tie(p.hess_sup_coarse, p.jump_coarse) = hessian_measures(coarse);
    std::tie(p.hess_sup_fine, p.jump_fine) = hessian_measures(fine);
    p.hess_ratio = ratio(p.hess_sup_fine, p.hess_sup_coarse);
    p.jump_ratio = ratio(p.jump_fine, p.jump_coarse);
    return p;
}

std::string to_json(const CompareReport& r) {
    return nlohmann::json{{"sup", r.sup}, {"mean", r.mean}, {"grad_sup", r.grad_sup}, {"nodes", r.nodes}}.dump(2);
}

std::string to_json(const C11Probe& p) {
    return nlohmann::json{{"hess_sup_coarse", p.hess_sup_coarse}, {"hess_sup_fine", p.hess_sup_fine},
                          {"hess_ratio", p.hess_ratio},           {"jump_coarse", p.jump_coarse},
                          {"jump_fine", p.jump_fine},             {"jump_ratio", p.jump_ratio}}
        .dump(2);
}

}  // namespace pshenv
