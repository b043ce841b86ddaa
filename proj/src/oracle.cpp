#include "pshenv/oracle.hpp"

#include "pshenv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pshenv::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// max_i (p x_i - V_i) for ascending p; no clamping.
std::vector<double> legendre_scan(const ConvexLift& lift, std::span<const double> slopes) {
    std::vector<double> out(slopes.size());
    std::size_t i = 0;
    const std::size_t m = lift.x.size();
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        const double p = slopes[j];
        while (i + 1 < m && p * lift.x[i + 1] - lift.V[i + 1] >= p * lift.x[i] - lift.V[i]) ++i;
        out[j] = p * lift.x[i] - lift.V[i];
    }
    return out;
}

std::vector<double> segment_slopes(const ConvexLift& lift) {
    std::vector<double> s(lift.x.size() - 1);
    for (std::size_t i = 0; i + 1 < lift.x.size(); ++i) {
        s[i] = (lift.V[i + 1] - lift.V[i]) / (lift.x[i + 1] - lift.x[i]);
    }
    return s;
}

// Nodes of the lift inside the base period [0, 1).
std::size_t base_start(const ConvexLift& lift) { return static_cast<std::size_t>(lift.K) * lift.n; }

// Lower convex hull of the lift as a piecewise-linear function.
struct Hull {
    std::vector<double> x, v;

    explicit Hull(const ConvexLift& lift) {
        for (std::size_t i = 0; i < lift.x.size(); ++i) {
            while (x.size() >= 2) {
                const std::size_t a = x.size() - 2, b = x.size() - 1;
                const double cross = (x[b] - x[a]) * (lift.V[i] - v[a]) - (v[b] - v[a]) * (lift.x[i] - x[a]);
                if (cross > 0.0) break;
                x.pop_back();
                v.pop_back();
            }
            x.push_back(lift.x[i]);
            v.push_back(lift.V[i]);
        }
    }

    double operator()(double y) const {
        if (y < x.front() || y > x.back()) return kInf;
        const auto it = std::upper_bound(x.begin(), x.end(), y);
        if (it == x.end()) return v.back();
        const std::size_t b = static_cast<std::size_t>(it - x.begin());
        const std::size_t a = b - 1;
        const double w = (y - x[a]) / (x[b] - x[a]);
        return (1.0 - w) * v[a] + w * v[b];
    }
};

// Minimum of a convex function on [lo, hi]: coarse scan, then golden section
// inside the bracket around the best sample.
template <typename F>
double convex_min(F&& f, double lo, double hi) {
    constexpr int kScan = 64;
    const double step = (hi - lo) / kScan;
    int best = 0;
    double fbest = f(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double fi = f(lo + i * step);
        if (fi < fbest) {
            fbest = fi;
            best = i;
        }
    }
    double a = lo + std::max(best - 1, 0) * step;
    double b = lo + std::min(best + 1, kScan) * step;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::min({fbest, fc, fd});
}

void check_pair(std::span<const double> phi0, std::span<const double> phi1) {
    if (phi0.empty() || phi0.size() != phi1.size()) {
        throw InputError("oracle: endpoint profiles must be nonempty and of equal length");
    }
}

}  // namespace

double ConvexLift::min_second_difference() const {
    double m = kInf;
    for (std::size_t i = 1; i + 1 < V.size(); ++i) m = std::min(m, V[i + 1] - 2.0 * V[i] + V[i - 1]);
    return m;
}

double ConvexLift::quasi_periodicity_defect() const {
    std::vector<double> d;
    for (std::size_t i = 0; i + n < V.size(); ++i) d.push_back(V[i + n] - V[i] - 4.0 * x[i] - 2.0);
    if (d.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return *hi - *lo;
}

double ConvexLift::slope_min() const { return (V[1] - V[0]) / (x[1] - x[0]); }

double ConvexLift::slope_max() const {
    const std::size_t m = V.size();
    return (V[m - 1] - V[m - 2]) / (x[m - 1] - x[m - 2]);
}

ConvexLift make_lift(std::span<const double> samples, double offset, int K) {
    if (samples.size() < 2) throw InputError("make_lift: need at least two samples");
    if (K < 2) throw InputError("make_lift: window K must be at least 2");
    ConvexLift L;
    L.n = samples.size();
    L.offset = offset;
    L.K = K;
    const auto n = static_cast<long>(L.n);
    for (long i = -K * n; i < (K + 1) * n; ++i) {
        const double x = (static_cast<double>(i) + offset) / static_cast<double>(n);
        const long r = ((i % n) + n) % n;
        L.x.push_back(x);
        L.V.push_back(2.0 * x * x + samples[static_cast<std::size_t>(r)]);
    }
    return L;
}

bool is_convex(const ConvexLift& lift, double tol) { return lift.min_second_difference() >= -tol; }

DualSamples discrete_legendre(const ConvexLift& lift, std::span<const double> slopes) {
    if (!is_convex(lift)) throw InputError("discrete_legendre: lift is not convex");
    if (!std::is_sorted(slopes.begin(), slopes.end())) {
        throw InputError("discrete_legendre: slopes must be ascending");
    }
    DualSamples d;
    d.p.assign(slopes.begin(), slopes.end());
    const double lo = lift.slope_min(), hi = lift.slope_max();
    for (double& p : d.p) {
        if (p < lo || p > hi) {
            p = std::clamp(p, lo, hi);
            ++d.clamped;
        }
    }
    d.value = legendre_scan(lift, d.p);
    return d;
}

std::vector<double> inverse_legendre(const DualSamples& dual, std::span<const double> x) {
    std::vector<double> out(x.size());
    std::size_t j = 0;
    const std::size_t m = dual.p.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (j + 1 < m && dual.p[j + 1] * x[i] - dual.value[j + 1] >= dual.p[j] * x[i] - dual.value[j]) ++j;
        out[i] = dual.p[j] * x[i] - dual.value[j];
    }
    return out;
}

std::vector<std::vector<double>> geodesic_profiles_by_duality(std::span<const double> phi0,
                                                              std::span<const double> phi1,
                                                              std::span<const double> t_levels,
                                                              double offset) {
    check_pair(phi0, phi1);
    const ConvexLift L0 = make_lift(phi0, offset), L1 = make_lift(phi1, offset);
    if (!is_convex(L0) || !is_convex(L1)) {
        throw InputError("geodesic_by_duality: endpoint lift is not convex (endpoint not psh)");
    }
    // The interpolated dual is piecewise linear with breakpoints at the union
    // of both lifts' segment slopes.
    std::vector<double> P = segment_slopes(L0);
    const std::vector<double> s1 = segment_slopes(L1);
    P.insert(P.end(), s1.begin(), s1.end());
    std::sort(P.begin(), P.end());
    // Near-equal slopes would give the interpolated dual segments of roundoff
    // length whose slopes are noise, which breaks the monotone inverse scan.
    P.erase(std::unique(P.begin(), P.end(),
                        [](double a, double b) { return b - a <= 1e-9 * (1.0 + std::abs(a)); }),
            P.end());
    const std::vector<double> A = legendre_scan(L0, P), B = legendre_scan(L1, P);

    const std::size_t n = phi0.size();
    const std::span<const double> xs(L0.x.data() + base_start(L0), n);
    std::vector<std::vector<double>> rows;
    rows.reserve(t_levels.size());
    DualSamples W;
    W.p = P;
    W.value.resize(P.size());
    for (double t : t_levels) {
        for (std::size_t j = 0; j < P.size(); ++j) W.value[j] = (1.0 - t) * A[j] + t * B[j];
        std::vector<double> row = inverse_legendre(W, xs);
        for (std::size_t i = 0; i < n; ++i) row[i] -= 2.0 * xs[i] * xs[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<double>> convex_envelope_profiles(std::span<const double> phi0,
                                                          std::span<const double> phi1,
                                                          std::span<const double> t_levels,
                                                          double offset) {
    check_pair(phi0, phi1);
    const ConvexLift L0 = make_lift(phi0, offset), L1 = make_lift(phi1, offset);
    const Hull H0(L0), H1(L1);
    const double wlo = L0.x.front(), whi = L0.x.back();
    const std::size_t n = phi0.size();
    const std::size_t b0 = base_start(L0);

    std::vector<std::vector<double>> rows(t_levels.size(), std::vector<double>(n));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(t_levels.size()); ++r) {
        const double t = t_levels[static_cast<std::size_t>(r)];
        for (std::size_t i = 0; i < n; ++i) {
            const double x = L0.x[b0 + i];
            double v;
            if (t <= 0.0) {
                v = H0(x);
            } else if (t >= 1.0) {
                v = H1(x);
            } else {
                // x = (1-t) x0 + t x1 with x0 = x - t d, x1 = x + (1-t) d.
                const double lo = std::max((x - whi) / t, (wlo - x) / (1.0 - t));
                const double hi = std::min((x - wlo) / t, (whi - x) / (1.0 - t));
                v = convex_min([&](double d) { return (1.0 - t) * H0(x - t * d) + t * H1(x + (1.0 - t) * d); },
                               lo, hi);
            }
            rows[static_cast<std::size_t>(r)][i] = v - 2.0 * x * x;
        }
    }
    return rows;
}

std::vector<double> x1_profile(const SurfaceField& s) {
    const TorusGrid& g = s.grid();
    const double scale = 1.0 + std::max(std::abs(s.max()), std::abs(s.min()));
    std::vector<double> row(static_cast<std::size_t>(g.nx1));
    for (int i1 = 0; i1 < g.nx1; ++i1) {
        row[static_cast<std::size_t>(i1)] = s(i1, 0);
        for (int i2 = 1; i2 < g.nx2; ++i2) {
            if (std::abs(s(i1, i2) - s(i1, 0)) > 1e-14 * scale) {
                throw InputError("oracle: endpoint data depends on x2");
            }
        }
    }
    return row;
}

Field broadcast_profiles(const std::vector<std::vector<double>>& rows, const ProductGrid& grid) {
    if (rows.size() != static_cast<std::size_t>(grid.nt)) throw InputError("broadcast_profiles: level count");
    Field f(grid, 0.0);
    for (int k = 0; k < grid.nt; ++k) {
        const auto& row = rows[static_cast<std::size_t>(k)];
        if (row.size() != static_cast<std::size_t>(grid.nx1())) throw InputError("broadcast_profiles: row length");
        for (int i2 = 0; i2 < grid.nx2(); ++i2) {
            for (int i1 = 0; i1 < grid.nx1(); ++i1) f(i1, i2, k) = row[static_cast<std::size_t>(i1)];
        }
    }
    return f;
}

namespace {

std::vector<double> grid_levels(const ProductGrid& grid) {
    std::vector<double> t(static_cast<std::size_t>(grid.nt));
    for (int k = 0; k < grid.nt; ++k) t[static_cast<std::size_t>(k)] = grid.t(k);
    return t;
}

void check_surfaces(const SurfaceField& a, const SurfaceField& b, const ProductGrid& grid) {
    if (!(a.grid() == grid.torus) || !(b.grid() == grid.torus)) {
        throw InputError("oracle: endpoints live on a different torus grid");
    }
}

}  // namespace

std::vector<std::vector<double>> sampled_geodesic_profiles(const std::function<double(double)>& phi0,
                                                           const std::function<double(double)>& phi1,
                                                           std::size_t n, std::span<const double> t_levels,
                                                           int oversample, double offset) {
    if (n == 0 || oversample < 1) throw InputError("sampled_geodesic_profiles: need n > 0 and oversample >= 1");
    const std::size_t m = static_cast<std::size_t>(oversample);
    const std::size_t nf = n * m;
    // Coarse node i sits at fine index i·m + whole with fine offset frac.
    const double off = offset * static_cast<double>(m);
    const double whole = std::floor(off), frac = off - whole;
    const auto lead = static_cast<std::size_t>(whole);
    std::vector<double> a(nf), b(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        const double x = (static_cast<double>(j) + frac) / static_cast<double>(nf);
        a[j] = phi0(x);
        b[j] = phi1(x);
    }
    const std::vector<std::vector<double>> fine = geodesic_profiles_by_duality(a, b, t_levels, frac);
    std::vector<std::vector<double>> out(fine.size(), std::vector<double>(n));
    for (std::size_t k = 0; k < fine.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) out[k][i] = fine[k][(i * m + lead) % nf];
    }
    return out;
}

Field geodesic_by_duality(const SurfaceField& phi0, const SurfaceField& phi1, const ProductGrid& grid) {
    check_surfaces(phi0, phi1, grid);
    const std::vector<double> t = grid_levels(grid);
    return broadcast_profiles(
        geodesic_profiles_by_duality(x1_profile(phi0), x1_profile(phi1), t, grid.torus.shift()), grid);
}

Field convex_envelope_2d(const SurfaceField& phi0, const SurfaceField& phi1, const ProductGrid& grid) {
    check_surfaces(phi0, phi1, grid);
    const std::vector<double> t = grid_levels(grid);
    return broadcast_profiles(
        convex_envelope_profiles(x1_profile(phi0), x1_profile(phi1), t, grid.torus.shift()), grid);
}

std::vector<std::vector<double>> lifted_determinant(const std::vector<std::vector<double>>& rows, double ht) {
    std::vector<std::vector<double>> out;
    if (rows.size() < 3) return out;
    const std::size_t n = rows.front().size();
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
            const double vxx = (rows[k][ip] - 2.0 * rows[k][i] + rows[k][im]) / (h * h) + 4.0;
            const double vtt = (rows[k + 1][i] - 2.0 * rows[k][i] + rows[k - 1][i]) / (ht * ht);
            const double vxt =
                (rows[k + 1][ip] - rows[k + 1][im] - rows[k - 1][ip] + rows[k - 1][im]) / (4.0 * h * ht);
            d[i] = vxx * vtt - vxt * vxt;
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace pshenv::oracle
