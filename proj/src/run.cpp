#include "pshenv/run.hpp"

#include "pshenv/compare.hpp"
#include "pshenv/error.hpp"
#include "pshenv/estimates.hpp"
#include "pshenv/io.hpp"
#include "pshenv/obstacle.hpp"
#include "pshenv/oracle.hpp"
#include "pshenv/presets.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pshenv {

std::vector<double> eps_levels(int first, int levels) {
    std::vector<double> e;
    for (int i = 0; i < levels; ++i) e.push_back(std::ldexp(1.0, -(first + i)));
    return e;
}

std::vector<double> beta_powers(int lo, int hi) {
    std::vector<double> b;
    for (int p = lo; p <= hi; ++p) b.push_back(std::ldexp(1.0, p));
    return b;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"preset", c.preset},
            {"grid", {c.nx1, c.nx2, c.nt}},
            {"offset", c.offset},
            {"eps_list", c.eps_list},
            {"beta_list", c.beta_list},
            {"beta0", c.beta0},
            {"newton",
             {{"max_iter", c.newton.max_iter},
              {"tol_residual_sup", c.newton.tol_residual_sup},
              {"damping_min", c.newton.damping_min},
              {"eta", c.newton.eta},
              {"admissible_tol", c.newton.admissible_tol}}},
            {"B_ladder", c.B_ladder},
            {"mask_cells", c.mask_cells},
            {"tilde_variant", c.tilde_variant},
            {"csv", c.csv}};
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    try {
        if (j.contains("preset")) c.preset = j.at("preset").get<std::string>();
        if (j.contains("grid")) {
            const auto g = j.at("grid").get<std::vector<int>>();
            if (g.size() == 2) {
                c.nx1 = c.nx2 = g[0];
                c.nt = g[1];
            } else if (g.size() == 3) {
                c.nx1 = g[0];
                c.nx2 = g[1];
                c.nt = g[2];
            } else {
                throw InputError("config: grid must be [NX, NT] or [NX1, NX2, NT]");
            }
        }
        if (j.contains("offset")) c.offset = j.at("offset").get<bool>();
        if (j.contains("eps_list")) c.eps_list = j.at("eps_list").get<std::vector<double>>();
        if (j.contains("eps_levels")) {
            c.eps_list = eps_levels(j.value("eps_first", 5), j.at("eps_levels").get<int>());
        }
        if (j.contains("beta_list")) c.beta_list = j.at("beta_list").get<std::vector<double>>();
        if (j.contains("beta_max")) {
            c.beta_list = beta_powers(j.value("beta_min", 8), j.at("beta_max").get<int>());
        }
        if (j.contains("beta0")) c.beta0 = j.at("beta0").get<double>();
        if (j.contains("newton")) {
            const auto& n = j.at("newton");
            c.newton.max_iter = n.value("max_iter", c.newton.max_iter);
            c.newton.tol_residual_sup = n.value("tol_residual_sup", c.newton.tol_residual_sup);
            c.newton.damping_min = n.value("damping_min", c.newton.damping_min);
            c.newton.eta = n.value("eta", c.newton.eta);
            c.newton.admissible_tol = n.value("admissible_tol", c.newton.admissible_tol);
        }
        if (j.contains("B_ladder")) c.B_ladder = j.at("B_ladder").get<std::vector<double>>();
        if (j.contains("mask_cells")) c.mask_cells = j.at("mask_cells").get<double>();
        if (j.contains("tilde_variant")) c.tilde_variant = j.at("tilde_variant").get<bool>();
        if (j.contains("csv")) c.csv = j.at("csv").get<bool>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::json to_json(const SolveReport& r) {
    nlohmann::json j = {{"eps", r.eps},
                        {"beta", r.beta},
                        {"newton_iters", r.newton_iters},
                        {"residual_sup", r.residual_sup},
                        {"eta", r.eta},
                        {"residual_path", r.residual_path},
                        {"min_eigen_path", r.min_eigen_path},
                        {"factorizations", r.factorizations},
                        {"converged", r.converged},
                        {"sandwich_ok", r.sandwich_ok},
                        {"trace_bound_ok", r.trace_bound_ok},
                        {"sandwich_lower_gap", r.sandwich_lower_gap},
                        {"sandwich_upper_gap", r.sandwich_upper_gap},
                        {"trace_violations", r.trace_violations}};
    j["log_residual_sup"] = std::isfinite(r.log_residual_sup) ? nlohmann::json(r.log_residual_sup) : nlohmann::json(nullptr);
    return j;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string tag(double v) {
    std::ostringstream os;
    const double l = std::log2(v);
    if (l == std::round(l)) {
        os << (l < 0 ? "m" : "") << std::abs(static_cast<int>(l));
    } else {
        os.precision(6);
        os << v;
    }
    return os.str();
}

class Writer {
public:
    explicit Writer(const RunConfig& cfg) : cfg_(cfg) { std::filesystem::create_directories(cfg.out); }

    void field(const std::string& name, const Field& u) {
        const std::filesystem::path stem = cfg_.out / "fields" / name;
        files_["fields/" + name + ".bin"] = io::write_field(stem, u);
        if (cfg_.csv) {
            io::write_field_csv(cfg_.out / "fields" / (name + ".csv"), u);
            files_["fields/" + name + ".csv"] = io::sha256_file(cfg_.out / "fields" / (name + ".csv"));
        }
    }
    void report(const std::string& name, const std::string& text) {
        files_["reports/" + name] = io::write_text(cfg_.out / "reports" / name, text);
    }
    const std::map<std::string, std::string>& files() const { return files_; }

private:
    const RunConfig& cfg_;
    std::map<std::string, std::string> files_;
};

struct Stopwatch {
    nlohmann::json times = nlohmann::json::object();
    Clock::time_point t = Clock::now();
    void lap(const char* stage) {
        const auto now = Clock::now();
        times[stage] = std::chrono::duration<double>(now - t).count();
        t = now;
    }
};

RunManifest close_manifest(const RunConfig& cfg, const Writer& w, const Stopwatch& sw,
                           std::vector<std::string> failures, const char* stages) {
    RunManifest m;
    m.failures = std::move(failures);
    m.complete = m.failures.empty();
    m.doc = {{"tool", "pshenv"},
             {"version", kToolVersion},
             {"stages", stages},
             {"config", to_json(cfg)},
             {"status", m.complete ? "COMPLETE" : "INCOMPLETE"},
             {"failures", m.failures},
             {"files", w.files()},
             {"wall_times", sw.times}};
    io::write_text(cfg.out / "manifest.json", m.doc.dump(2) + "\n");
    return m;
}

void scan_and_write(const std::vector<BranchResult>& branches, const SingularModel& model, const RunConfig& cfg,
                    Writer& w, std::vector<std::string>& failures) {
    EstimateOptions eo;
    eo.B_ladder = cfg.B_ladder;
    eo.tilde_variant = cfg.tilde_variant;
    const EstimateScan scan = estimate_scan(branches, model, eo);
    w.report("estimates.json", to_json(scan) + "\n");
    w.report("estimates.csv", to_csv(scan));
    for (const EstimateReport& r : scan.reports) {
        for (Estimate e : kAllEstimates) {
            if (!std::isfinite(estimate_value(r, e))) {
                failures.push_back(std::string("estimate_scan: non-finite ") + estimate_name(e));
                return;
            }
        }
    }
}

}  // namespace

RunManifest run(const RunConfig& cfg, RunStages stages) {
    Writer w(cfg);
    Stopwatch sw;
    std::vector<std::string> failures;
    const char* stage_name = stages == RunStages::full ? "full" : "solve";
    try {
        const ProductGrid grid = build_grid(cfg.nx1, cfg.nx2, cfg.nt, cfg.offset);
        const Preset preset = make_preset(cfg.preset, grid.torus);
        if (!preset.solvable) {
            throw InputError("preset '" + cfg.preset + "' is oracle-only: its endpoints are not strictly psh");
        }
        SingularModelOptions mo;
        mo.mask_cells = cfg.mask_cells;
        const SingularModel model = make_singular_model(preset.c, preset.base, preset.ends, preset.delta, cfg.nt, mo);
        FamilyOptions fo;
        fo.beta0 = cfg.beta0;
        const BoundaryFamily family = build_boundary_family(preset.ends, preset.base, model, cfg.eps_list, fo);
        w.field("psi", model.psi);
        w.field("F", model.F);
        w.field("tilde_psi", model.tilde_psi);
        w.field("phi", family.phi);
        for (const FamilyLevel& l : family.levels) w.field("phi_eps_" + tag(l.eps), l.phi_eps);
        sw.lap("build");

        std::map<double, ObstacleSolution> obstacles;
        for (double eps : cfg.eps_list) {
            obstacles.emplace(eps, solve_obstacle(family, eps));
            w.field("h_eps_" + tag(eps), obstacles.at(eps).h);
        }
        sw.lap("obstacle");

        ContinuationSchedule schedule;
        schedule.eps_list = cfg.eps_list;
        schedule.beta_list = cfg.beta_list;
        schedule.beta0 = cfg.beta0;
        schedule.newton = cfg.newton;
        const std::vector<BranchResult> branches =
            continuation_solve(schedule, family, [&](double eps) -> const ObstacleSolution& { return obstacles.at(eps); });
        nlohmann::json cont = nlohmann::json::array();
        for (const BranchResult& b : branches) {
            for (const SolveReport& r : b.reports) {
                const std::string name = "eps_" + tag(r.eps) + "_beta_" + tag(r.beta);
                w.field("u_" + name, r.u);
                w.report("solve_" + name + ".json", to_json(r).dump(2) + "\n");
                if (!r.sandwich_ok) failures.push_back("sandwich violated at " + name);
                if (!r.trace_bound_ok) failures.push_back("trace bound violated at " + name);
            }
            if (!b.complete) failures.push_back("branch eps = " + tag(b.eps) + ": " + b.failure);
            cont.push_back({{"eps", b.eps}, {"complete", b.complete}, {"failure", b.failure}, {"cauchy", b.cauchy}});
        }
        w.report("continuation.json", cont.dump(2) + "\n");
        sw.lap("continuation");

        const Envelope env = extract_envelope(branches);
        w.field("envelope", env.V);
        nlohmann::json ej = {{"eps", env.eps}, {"beta", env.beta}};
        ej["uncertainty"] = std::isfinite(env.uncertainty) ? nlohmann::json(env.uncertainty) : nlohmann::json(nullptr);
        w.report("envelope.json", ej.dump(2) + "\n");
        if (!std::isfinite(env.uncertainty)) failures.push_back("envelope: fewer than two beta levels converged");
        sw.lap("extract");

        if (stages == RunStages::full) {
            scan_and_write(branches, model, cfg, w, failures);
            sw.lap("scan");
            if (preset.x1_only) {
                const Field oracle = oracle::geodesic_by_duality(preset.ends.phi0, preset.ends.phi1, grid);
                w.field("oracle", oracle);
                w.report("oracle_compare.json", to_json(oracle_compare(env.V, oracle)) + "\n");
                sw.lap("compare");
            }
        }
    } catch (const std::exception& e) {
        failures.push_back(e.what());
    }
    return close_manifest(cfg, w, sw, std::move(failures), stage_name);
}

RunManifest rescan(const std::filesystem::path& dir, const std::vector<double>& B_ladder, bool tilde_variant) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw InputError("rescan: no manifest.json in " + dir.string());
    const nlohmann::json prior = nlohmann::json::parse(in);
    RunConfig cfg = config_from_json(prior.at("config"));
    cfg.out = dir;
    if (!B_ladder.empty()) cfg.B_ladder = B_ladder;
    cfg.tilde_variant = tilde_variant;

    Writer w(cfg);
    Stopwatch sw;
    std::vector<std::string> failures;
    try {
        const ProductGrid grid = build_grid(cfg.nx1, cfg.nx2, cfg.nt, cfg.offset);
        const Preset preset = make_preset(cfg.preset, grid.torus);
        SingularModelOptions mo;
        mo.mask_cells = cfg.mask_cells;
        const SingularModel model = make_singular_model(preset.c, preset.base, preset.ends, preset.delta, cfg.nt, mo);
        std::vector<BranchResult> branches;
        for (double eps : cfg.eps_list) {
            BranchResult b;
            b.eps = eps;
            for (double beta : cfg.beta_list) {
                const std::string name = "eps_" + tag(eps) + "_beta_" + tag(beta);
                const std::filesystem::path rep = dir / "reports" / ("solve_" + name + ".json");
                if (!std::filesystem::exists(rep)) break;
                std::ifstream rs(rep);
                const nlohmann::json j = nlohmann::json::parse(rs);
                SolveReport r;
                r.eps = eps;
                r.beta = beta;
                r.converged = j.at("converged").get<bool>();
                r.sandwich_ok = j.at("sandwich_ok").get<bool>();
                r.trace_bound_ok = j.at("trace_bound_ok").get<bool>();
                r.u = io::read_field(dir / "fields" / ("u_" + name));
                b.reports.push_back(std::move(r));
            }
            branches.push_back(std::move(b));
        }
        sw.lap("load");
        scan_and_write(branches, model, cfg, w, failures);
        sw.lap("scan");
    } catch (const std::exception& e) {
        failures.push_back(e.what());
    }
    RunManifest m;
    m.failures = failures;
    m.complete = failures.empty();
    m.doc = prior;
    for (const auto& [k, v] : w.files()) m.doc["files"][k] = v;
    m.doc["rescan"] = {{"B_ladder", cfg.B_ladder},
                       {"tilde_variant", cfg.tilde_variant},
                       {"status", m.complete ? "COMPLETE" : "INCOMPLETE"},
                       {"failures", failures},
                       {"wall_times", sw.times}};
    io::write_text(dir / "manifest.json", m.doc.dump(2) + "\n");
    return m;
}

}  // namespace pshenv
