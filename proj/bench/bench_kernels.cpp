#include "pshenv/kernels.hpp"
#include "pshenv/presets.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace pshenv;

struct Setup {
    ProductGrid grid;
    Preset preset;
    std::vector<double> u, h, om;
    std::vector<double> R, rho, J;

    explicit Setup(int n)
        : grid(build_grid(n, n, n + 1, true)), preset(make_preset("smooth", grid.torus)) {
        const Field uf = Field::sample(grid, [](double x1, double x2, double t) {
            return 0.05 * std::cos(2 * M_PI * x1) * std::cos(2 * M_PI * x2) + 0.4 * t * (1 - t);
        });
        u.assign(uf.values().begin(), uf.values().end());
        h.assign(u.size(), 1.0);
        for (int k = 0; k < grid.nt; ++k) om.push_back(preset.base.omega_ww(grid.t(k)));
        const std::size_t m = grid.interior_size();
        R.resize(m);
        rho.resize(m);
        J.resize(m * kernels::kStencilWidth);
    }
};

void run_berman(benchmark::State& state, Exec exec, bool jacobian) {
    Setup s(static_cast<int>(state.range(0)));
    const kernels::BermanInputs in{s.u, s.h, s.preset.base.a.values(), s.om, 1.0 / 64, 4096.0, 1e-2};
    const kernels::BermanOutputs out{s.R, s.rho, jacobian ? std::span<double>(s.J) : std::span<double>()};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::berman(exec, s.grid, in, out));
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.interior_size()));
    state.counters["threads"] = exec == Exec::parallel ? kernels::thread_count() : 1;
}

void run_laplacian(benchmark::State& state, Exec exec) {
    Setup s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        kernels::complex_laplacian(exec, s.grid, s.u, s.om, s.R);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(s.grid.interior_size()));
}

void BM_Residual_Serial(benchmark::State& s) { run_berman(s, Exec::serial, false); }
void BM_Residual_Omp(benchmark::State& s) { run_berman(s, Exec::parallel, false); }
void BM_Jacobian_Serial(benchmark::State& s) { run_berman(s, Exec::serial, true); }
void BM_Jacobian_Omp(benchmark::State& s) { run_berman(s, Exec::parallel, true); }
void BM_Laplacian_Serial(benchmark::State& s) { run_laplacian(s, Exec::serial); }
void BM_Laplacian_Omp(benchmark::State& s) { run_laplacian(s, Exec::parallel); }

}  // namespace

BENCHMARK(BM_Residual_Serial)->Arg(32)->Arg(64);
BENCHMARK(BM_Residual_Omp)->Arg(32)->Arg(64);
BENCHMARK(BM_Jacobian_Serial)->Arg(32)->Arg(64);
BENCHMARK(BM_Jacobian_Omp)->Arg(32)->Arg(64);
BENCHMARK(BM_Laplacian_Serial)->Arg(32)->Arg(64);
BENCHMARK(BM_Laplacian_Omp)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
