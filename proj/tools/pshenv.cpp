#include "pshenv/compare.hpp"
#include "pshenv/error.hpp"
#include "pshenv/io.hpp"
#include "pshenv/oracle.hpp"
#include "pshenv/presets.hpp"
#include "pshenv/run.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace pshenv;

struct SolveFlags {
    std::string config;
    std::string preset;
    std::vector<int> grid;
    int eps_levels = 0;
    int eps_first = 5;
    int beta_min = 8;
    int beta_max = 0;
    double beta0 = 0.0;
    double mask_cells = 0.0;
    std::vector<double> ladder;
    bool tilde = false;
    bool no_csv = false;
    std::string out;
};

void add_solve_flags(CLI::App* app, SolveFlags& f) {
    app->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    app->add_option("--preset", f.preset, "preset name")->check(CLI::IsMember(preset_names()));
    app->add_option("--grid", f.grid, "NX,NT or NX1,NX2,NT")->delimiter(',')->expected(2, 3)->type_name("INT,INT[,INT]");
    app->add_option("--eps-levels", f.eps_levels, "number of eps levels 2^-first, 2^-(first+1), ...");
    app->add_option("--eps-first", f.eps_first, "exponent of the largest eps");
    app->add_option("--beta-min", f.beta_min, "exponent of the smallest beta");
    app->add_option("--beta-max", f.beta_max, "exponent of the largest beta");
    app->add_option("--beta0", f.beta0, "beta0 of the boundary family");
    app->add_option("--mask-cells", f.mask_cells, "mask radius in grid cells");
    app->add_option("--B-ladder", f.ladder, "weight exponents to scan")->delimiter(',');
    app->add_flag("--tilde-variant", f.tilde, "use u - (1 + delta/2) tilde_psi in paper_Q");
    app->add_flag("--no-csv", f.no_csv, "skip CSV copies of the fields");
    app->add_option("--out", f.out, "output directory");
}

RunConfig resolve(const CLI::App* app, const SolveFlags& f) {
    RunConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        c = config_from_json(nlohmann::json::parse(in));
    }
    nlohmann::json o = nlohmann::json::object();
    if (app->count("--preset")) o["preset"] = f.preset;
    if (app->count("--grid")) o["grid"] = f.grid;
    if (app->count("--eps-levels")) {
        o["eps_levels"] = f.eps_levels;
        o["eps_first"] = f.eps_first;
    }
    if (app->count("--beta-max")) {
        o["beta_max"] = f.beta_max;
        o["beta_min"] = f.beta_min;
    } else if (app->count("--beta-min")) {
        throw InputError("--beta-min needs --beta-max");
    }
    if (app->count("--beta0")) o["beta0"] = f.beta0;
    if (app->count("--mask-cells")) o["mask_cells"] = f.mask_cells;
    if (app->count("--B-ladder")) o["B_ladder"] = f.ladder;
    if (f.tilde) o["tilde_variant"] = true;
    if (f.no_csv) o["csv"] = false;
    if (app->count("--out")) o["out"] = f.out;
    return config_from_json(o, c);
}

int report(const RunManifest& m) {
    std::cout << "status: " << (m.complete ? "COMPLETE" : "INCOMPLETE") << "\n";
    for (const std::string& f : m.failures) std::cerr << "failure: " << f << "\n";
    return m.complete ? 0 : 1;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text << "\n";
    } else {
        io::write_text(out, text + "\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pshenv: penalized Monge-Ampere continuation, obstacles, oracles and estimate scans"};
    app.require_subcommand(1);

    SolveFlags run_flags, solve_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "build, obstacle, continuation, envelope, scan and compare");
    add_solve_flags(run_cmd, run_flags);
    CLI::App* solve_cmd = app.add_subcommand("solve", "build, obstacle, continuation and envelope only");
    add_solve_flags(solve_cmd, solve_flags);

    std::string o_preset = "smooth", o_out = "oracle-out";
    std::vector<int> o_grid = {256, 65};
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "reference geodesic of an x1-only preset by both routes");
    oracle_cmd->add_option("--preset", o_preset, "x1-only preset")->check(CLI::IsMember(preset_names()));
    oracle_cmd->add_option("--grid", o_grid, "NX,NT or NX1,NX2,NT")->delimiter(',')->expected(2, 3)->type_name("INT,INT[,INT]");
    oracle_cmd->add_option("--out", o_out, "output directory");

    std::string s_dir;
    std::vector<double> s_ladder;
    bool s_tilde = false;
    CLI::App* scan_cmd = app.add_subcommand("scan", "re-run the estimate scan on an existing run directory");
    scan_cmd->add_option("dir", s_dir, "run directory")->required()->check(CLI::ExistingDirectory);
    scan_cmd->add_option("--B-ladder", s_ladder, "weight exponents to scan")->delimiter(',');
    scan_cmd->add_flag("--tilde-variant", s_tilde, "use u - (1 + delta/2) tilde_psi in paper_Q");

    std::string p_coarse, p_fine, p_out;
    CLI::App* probe_cmd = app.add_subcommand("probe", "Hessian bound and jump measures across a refinement");
    probe_cmd->add_option("coarse", p_coarse, "field stem (path without .bin/.json)")->required();
    probe_cmd->add_option("fine", p_fine, "field stem at the finer resolution")->required();
    probe_cmd->add_option("--out", p_out, "write the JSON report here instead of stdout");

    std::string d_a, d_b, d_out;
    bool d_interior = false;
    CLI::App* diff_cmd = app.add_subcommand("diff", "sup, mean and first-difference gaps between two fields");
    diff_cmd->add_option("a", d_a, "field stem")->required();
    diff_cmd->add_option("b", d_b, "field stem")->required();
    diff_cmd->add_flag("--interior", d_interior, "skip the two t-boundary levels");
    diff_cmd->add_option("--out", d_out, "write the JSON report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return report(run(resolve(run_cmd, run_flags), RunStages::full));
        if (*solve_cmd) return report(run(resolve(solve_cmd, solve_flags), RunStages::solve));
        if (*scan_cmd) return report(rescan(s_dir, s_ladder, s_tilde));
        if (*oracle_cmd) {
            const int nx1 = o_grid[0], nx2 = o_grid.size() == 3 ? o_grid[1] : 8, nt = o_grid.back();
            const ProductGrid grid = build_grid(nx1, nx2, nt, true);
            const Preset p = make_preset(o_preset, grid.torus);
            if (!p.x1_only) throw InputError("oracle: preset " + o_preset + " depends on x2");
            const Field a = oracle::geodesic_by_duality(p.ends.phi0, p.ends.phi1, grid);
            const Field b = oracle::convex_envelope_2d(p.ends.phi0, p.ends.phi1, grid);
            io::write_field(std::filesystem::path(o_out) / "fields" / "oracle_duality", a);
            io::write_field(std::filesystem::path(o_out) / "fields" / "oracle_envelope", b);
            const CompareReport r = oracle_compare(a, b);
            io::write_text(std::filesystem::path(o_out) / "reports" / "oracle_self.json", to_json(r) + "\n");
            std::printf("duality vs envelope: sup %.3e mean %.3e\n", r.sup, r.mean);
            return 0;
        }
        if (*probe_cmd) {
            emit(to_json(c11_probe(io::read_field(p_coarse), io::read_field(p_fine))), p_out);
            return 0;
        }
        if (*diff_cmd) {
            emit(to_json(oracle_compare(io::read_field(d_a), io::read_field(d_b), d_interior)), d_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
