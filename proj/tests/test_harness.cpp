#include "pshenv/compare.hpp"
#include "pshenv/error.hpp"
#include "pshenv/estimates.hpp"
#include "pshenv/io.hpp"
#include "pshenv/presets.hpp"
#include "pshenv/run.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace pshenv;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pshenv_test_" + name);
    fs::remove_all(p);
    return p;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

struct SmallRun {
    Preset preset;
    SingularModel model;
    BoundaryFamily family;
    std::vector<ObstacleSolution> obstacles;
    std::vector<BranchResult> branches;

    SmallRun(const std::string& name, int n, int nt, std::vector<double> eps, std::vector<double> beta,
             double mask_cells = 4.0)
        : preset(make_preset(name, build_torus(n, n, true))),
          model(make_singular_model(preset.c, preset.base, preset.ends, preset.delta, nt, {mask_cells})),
          family(build_boundary_family(preset.ends, preset.base, model, eps)) {
        for (double e : eps) obstacles.push_back(solve_obstacle(family, e));
        ContinuationSchedule s;
        s.eps_list = eps;
        s.beta_list = beta;
        s.beta0 = beta.front();
        branches = continuation_solve(s, family, [&](double e) -> const ObstacleSolution& {
            for (const ObstacleSolution& o : obstacles) {
                if (o.eps == e) return o;
            }
            throw InputError("missing obstacle");
        });
    }
};

}  // namespace

TEST_CASE("oracle_compare") {
    const ProductGrid g = build_grid(8, 8, 9, true);
    const Field a = Field::sample(g, [](double x1, double x2, double t) { return std::sin(2 * pi * x1) * x2 + t; });
    const CompareReport same = oracle_compare(a, a);
    CHECK(same.sup == 0.0);
    CHECK(same.mean == 0.0);
    CHECK(same.grad_sup == 0.0);
    CHECK(same.nodes == g.size());

    const CompareReport shifted = oracle_compare(a, a + Field(g, 1e-3));
    CHECK(shifted.sup == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(shifted.mean == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(shifted.grad_sup < 1e-9);

    const CompareReport inner = oracle_compare(a, a, true);
    CHECK(inner.nodes == g.interior_size());

    CHECK_THROWS_AS(oracle_compare(a, Field(build_grid(16, 8, 9, true))), InputError);

    const nlohmann::json j = nlohmann::json::parse(to_json(shifted));
    CHECK(j.at("sup").get<double>() == doctest::Approx(1e-3));
}

TEST_CASE("c11_probe on data with known Hessians") {
    const ProductGrid gc = build_grid(16, 8, 17, true), gf = build_grid(32, 8, 33, true);
    auto affine = [](double, double, double t) { return 0.3 - 2 * t; };
    const C11Probe lin = c11_probe(Field::sample(gc, affine), Field::sample(gf, affine));
    CHECK(lin.hess_sup_coarse < 1e-9);
    CHECK(lin.jump_fine < 1e-9);

    auto quad = [](double, double, double t) { return t * t; };
    const C11Probe q = c11_probe(Field::sample(gc, quad), Field::sample(gf, quad));
    CHECK(q.hess_sup_coarse == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(q.hess_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q.jump_fine < 1e-8);
}

TEST_CASE("field io round trip and hashes") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    const fs::path dir = scratch_dir("io");
    fs::create_directories(dir);
    const ProductGrid g = build_grid(8, 16, 9, false);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d;
    Field u(g);
    for (double& v : u.values()) v = d(rng);

    const std::string sha = io::write_field(dir / "u", u);
    CHECK(sha == io::sha256_file(dir / "u.bin"));
    CHECK(fs::file_size(dir / "u.bin") == g.size() * sizeof(double));
    const Field back = io::read_field(dir / "u");
    CHECK(back.grid() == g);
    CHECK(sup_distance(back, u) == 0.0);

    const nlohmann::json h = read_json(dir / "u.json");
    CHECK(h.at("nx1") == 8);
    CHECK(h.at("nx2") == 16);
    CHECK(h.at("nt") == 9);
    CHECK(h.at("axis_order") == "x1,x2,t");

    io::write_field_csv(dir / "u.csv", u);
    std::ifstream csv(dir / "u.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(csv, line);
    CHECK(line == "x1,x2,t,value");
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == g.size());

    std::ofstream(dir / "bad.json") << "{\"nx1\": 8}";
    CHECK_THROWS_AS(io::read_field(dir / "bad"), InputError);
    fs::remove_all(dir);
}

TEST_CASE("config parsing") {
    const RunConfig c = config_from_json(nlohmann::json::parse(
        R"({"preset": "constants", "grid": [16, 17], "eps_levels": 3, "eps_first": 2, "beta_min": 4, "beta_max": 6})"));
    CHECK(c.preset == "constants");
    CHECK(c.nx1 == 16);
    CHECK(c.nx2 == 16);
    CHECK(c.nt == 17);
    CHECK(c.eps_list == std::vector<double>{0.25, 0.125, 0.0625});
    CHECK(c.beta_list == std::vector<double>{16.0, 32.0, 64.0});
    CHECK(beta_powers(5, 4).empty());
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"grid": [1, 2, 3, 4]})")), InputError);
    const RunConfig r = config_from_json(to_json(c));
    CHECK(r.eps_list == c.eps_list);
    CHECK(r.beta_list == c.beta_list);
}

TEST_CASE("estimate_scan") {
    SUBCASE("smooth preset: bounded weight, estimates uniform at B = 0") {
        const SmallRun s("smooth", 16, 17, {1.0 / 8, 1.0 / 16}, {64.0, 128.0, 256.0, 512.0});
        const EstimateScan scan = estimate_scan(s.branches, s.model);
        CHECK(scan.reports.size() == 8 * 5);
        CHECK(scan.verdicts.size() == 5 * 5);
        for (const EstimateVerdict& v : scan.verdicts) {
            if (v.B != 0.0 || v.which == Estimate::paper_Q) continue;
            CAPTURE(estimate_name(v.which));
            CHECK(v.uniform);
        }
        // ψ ≤ -1 makes every weighted sup nonincreasing along the ladder.
        for (std::size_t i = 0; i + 1 < scan.reports.size(); ++i) {
            const EstimateReport& a = scan.reports[i];
            const EstimateReport& b = scan.reports[i + 1];
            if (a.eps != b.eps || a.beta != b.beta) continue;
            CHECK(b.B_used > a.B_used);
            CHECK(b.weighted_grad <= a.weighted_grad);
            CHECK(b.weighted_hess <= a.weighted_hess);
            CHECK(b.weighted_lap <= a.weighted_lap);
        }
        CHECK(verdict_window(s.branches).size() == 4);
        const nlohmann::json j = nlohmann::json::parse(to_json(scan));
        CHECK(j.at("verdicts").size() == 25);
        const std::string csv = to_csv(scan);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
    }
    SUBCASE("a mask below two cells is rejected") {
        const TorusGrid tg = build_torus(16, 16, true);
        const Preset p = make_preset("log-singular-c1", tg);
        const SingularModel m = make_singular_model(p.c, p.base, p.ends, p.delta, 9, {1.0});
        CHECK_THROWS_AS(estimate_scan({}, m), InputError);
    }
    SUBCASE("unconverged reports are rejected") {
        SmallRun s("constants", 8, 9, {0.25}, {16.0, 32.0});
        s.branches[0].reports[0].converged = false;
        CHECK_THROWS_AS(estimate_scan(s.branches, s.model), InputError);
    }
}

TEST_CASE("local_hessian_sup") {
    const ProductGrid g = build_grid(16, 16, 9, true);
    const Field u = Field::sample(g, [](double x1, double, double t) { return t * t + 0.01 * std::cos(2 * pi * x1); });
    NodeMask mask(g.size(), 1);
    const double near = local_hessian_sup(u, mask, {0.5, 0.5}, 0.1);
    CHECK(near >= 2.0);
    CHECK(near <= 2.0 + 0.04 * pi * pi);
    for (std::size_t n = 0; n < mask.size(); ++n) mask[n] = 0;
    CHECK(local_hessian_sup(u, mask, {0.5, 0.5}, 0.1) == 0.0);
}

TEST_CASE("run writes a deterministic layout") {
    RunConfig cfg;
    cfg.preset = "smooth";
    cfg.nx1 = cfg.nx2 = 8;
    cfg.nt = 9;
    cfg.eps_list = {0.25, 0.125};
    cfg.beta_list = {16.0, 32.0, 64.0};
    cfg.beta0 = 16.0;

    std::vector<nlohmann::json> manifests;
    for (const char* name : {"run_a", "run_b"}) {
        cfg.out = scratch_dir(name);
        const RunManifest m = run(cfg);
        CHECK(m.complete);
        CHECK(m.failures.empty());
        CHECK(fs::exists(cfg.out / "manifest.json"));
        CHECK(fs::exists(cfg.out / "fields" / "envelope.bin"));
        CHECK(fs::exists(cfg.out / "fields" / "oracle.bin"));
        CHECK(fs::exists(cfg.out / "fields" / "u_eps_m3_beta_6.csv"));
        CHECK(fs::exists(cfg.out / "reports" / "estimates.csv"));
        CHECK(fs::exists(cfg.out / "reports" / "oracle_compare.json"));
        const nlohmann::json doc = read_json(cfg.out / "manifest.json");
        CHECK(doc.at("status") == "COMPLETE");
        for (const auto& [file, sha] : doc.at("files").items()) CHECK(io::sha256_file(cfg.out / file) == sha);
        manifests.push_back(doc);
    }
    CHECK(manifests[0].at("files") == manifests[1].at("files"));
    CHECK(manifests[0].at("config").at("beta_list") == manifests[1].at("config").at("beta_list"));

    // Rescanning with another ladder rewrites only the estimate reports.
    const RunManifest r = rescan(cfg.out, {0.0, 3.0}, true);
    CHECK(r.complete);
    const nlohmann::json doc = read_json(cfg.out / "manifest.json");
    CHECK(doc.at("rescan").at("tilde_variant") == true);
    CHECK(doc.at("files").at("fields/envelope.bin") == manifests[0].at("files").at("fields/envelope.bin"));
    CHECK(doc.at("files").at("reports/estimates.json") != manifests[0].at("files").at("reports/estimates.json"));
    for (const char* name : {"run_a", "run_b"}) fs::remove_all(scratch_dir(name));
}

TEST_CASE("run reports INCOMPLETE instead of throwing") {
    RunConfig cfg;
    cfg.preset = "degenerate-lambda4";
    cfg.nx1 = cfg.nx2 = 8;
    cfg.nt = 9;
    cfg.eps_list = {0.25};
    cfg.beta_list = beta_powers(6, 5);
    cfg.out = scratch_dir("incomplete");
    const RunManifest m = run(cfg);
    CHECK_FALSE(m.complete);
    CHECK_FALSE(m.failures.empty());
    const nlohmann::json doc = read_json(cfg.out / "manifest.json");
    CHECK(doc.at("status") == "INCOMPLETE");
    CHECK(fs::exists(cfg.out / "fields" / "psi.bin"));

    cfg.preset = "corner";
    cfg.beta_list = {16.0};
    cfg.out = scratch_dir("corner");
    const RunManifest c = run(cfg);
    CHECK_FALSE(c.complete);
    REQUIRE(c.failures.size() == 1);
    CHECK(c.failures[0].find("oracle-only") != std::string::npos);
    fs::remove_all(scratch_dir("incomplete"));
    fs::remove_all(scratch_dir("corner"));
}
