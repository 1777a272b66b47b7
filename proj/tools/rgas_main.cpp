// Command-line front end: single gas runs, kinetic solver runs, the full
// convergence study, the pruning audit, and a quick self-test.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rgas/csv.hpp"
#include "rgas/gas.hpp"
#include "rgas/kinetic.hpp"
#include "rgas/maxwell.hpp"
#include "rgas/selftest.hpp"
#include "rgas/study.hpp"

namespace {

using namespace rgas;

struct SimulateArgs {
    uint64_t seed = 1;
    std::string eps = "1/64";
    int n = 0;  // 0 -> round(eps^{-(d-1)})
    double beta = 1.0;
    int d = 2;
    double t = 1.0;
    std::string obs;  // comma list; default {t}
    std::string rho = "constant";
    double amp = 0.5;
    int axis = 0;
    bool override_bg = false;
    std::string out = "trace.csv";
};

int cmd_simulate(const SimulateArgs& a) {
    ModelParams params;
    params.dim = a.d;
    params.eps = parse_real(a.eps);
    params.n_particles = a.n > 0 ? a.n : static_cast<int>(std::lround(std::pow(params.eps, -(a.d - 1))));
    params.beta = a.beta;
    params.allow_off_scaling = a.override_bg || a.n > 0;

    Perturbation rho = a.rho == "cosine" ? Perturbation::cosine(a.amp, a.axis)
                                         : Perturbation::constant();
    std::vector<double> obs = a.obs.empty() ? std::vector<double>{a.t} : parse_real_list(a.obs);

    Philox rng = seed_stream(a.seed, streams::gas_replica(0, 0));
    GasConfiguration cfg = init_equilibrium(params, rho, rng);
    EventDrivenGas sim(std::move(cfg));
    TrajectoryRecord rec = sim.run(a.t, obs);

    std::string header = "time";
    for (int k = 0; k < a.d; ++k) header += ",x" + std::to_string(k + 1);
    for (int k = 0; k < a.d; ++k) header += ",v" + std::to_string(k + 1);
    header += ",collisions";
    CsvWriter csv(a.out, header);
    for (size_t i = 0; i < rec.times.size(); ++i) {
        std::string row = csv_real(rec.times[i]);
        for (int k = 0; k < a.d; ++k) row += "," + csv_real(rec.tagged[i].x[k]);
        for (int k = 0; k < a.d; ++k) row += "," + csv_real(rec.tagged[i].v[k]);
        row += "," + std::to_string(rec.tagged_collisions[i]);
        csv.row(row);
    }
    csv.close();
    std::printf("wrote %s (%zu observations, %llu collisions total)\n", a.out.c_str(),
                rec.times.size(), static_cast<unsigned long long>(rec.total_collisions));
    return 0;
}

struct SolveArgs {
    uint64_t seed = 1;
    double beta = 1.0;
    int d = 2;
    double t = 0.5;
    std::string obs;
    std::string rho = "cosine";
    double amp = 0.5;
    int axis = 0;
    uint64_t paths = 100000;
    std::string bins = "16";
    int vbins = 0;
    double vmax = 4.0;
    bool collisionless = false;
    std::string out = "solution.csv";
};

void write_histograms(const std::string& path, const std::vector<Histogram>& hists) {
    if (hists.empty()) throw ConfigError("no histograms to write");
    const BinSpec& spec = hists.front().spec;
    std::string header = "time,bin";
    for (int k = 0; k < spec.dim; ++k) header += ",x" + std::to_string(k + 1) + "_center";
    if (spec.nv > 0)
        for (int k = 0; k < spec.dim; ++k) header += ",v" + std::to_string(k + 1) + "_center";
    header += ",mass,se";
    CsvWriter csv(path, header);
    for (const auto& h : hists)
        for (int b = 0; b < spec.total_cells(); ++b) {
            std::string row = csv_real(h.time) + "," + std::to_string(b);
            for (double c : spec.cell_centers(b)) row += "," + csv_real(c);
            row += "," + csv_real(h.mass[b]) + "," + csv_real(h.se[b]);
            csv.row(row);
        }
    csv.close();
}

int cmd_solve(const SolveArgs& a) {
    KineticParams kp;
    kp.dim = a.d;
    kp.beta = a.beta;
    KineticModel model(kp, a.collisionless);
    Perturbation rho = a.rho == "cosine" ? Perturbation::cosine(a.amp, a.axis)
                                         : Perturbation::constant();
    BinSpec bins;
    bins.dim = a.d;
    bins.nx = {1, 1, 1};
    auto nx = parse_int_list(a.bins);
    for (size_t k = 0; k < nx.size() && k < 3; ++k) bins.nx[k] = nx[k];
    bins.nv = a.vbins;
    bins.vmax = a.vmax;

    std::vector<double> obs = a.obs.empty() ? std::vector<double>{a.t} : parse_real_list(a.obs);
    Philox rng = seed_stream(a.seed, streams::solver_path(0, 0));
    DensityEstimate est = solve_density(model, rho, obs, a.paths, bins, rng);
    write_histograms(a.out, est.histograms);
    std::printf("wrote %s (%zu times, %d cells, %llu paths)\n", a.out.c_str(), obs.size(),
                bins.total_cells(), static_cast<unsigned long long>(a.paths));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tagged hard-sphere gas vs linear kinetic solver: simulation, "
                 "convergence study, and pruning-bound audit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "single event-driven gas run, trace CSV");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--eps", sim.eps, "sphere diameter (real or a/b)");
    simulate->add_option("--n", sim.n, "particle count (default eps^{-(d-1)})");
    simulate->add_option("--beta", sim.beta, "inverse temperature");
    simulate->add_option("--d", sim.d, "dimension (2 or 3)");
    simulate->add_option("--t", sim.t, "final time");
    simulate->add_option("--obs", sim.obs, "observation times, comma list (default t)");
    simulate->add_option("--rho", sim.rho, "perturbation: constant|cosine");
    simulate->add_option("--amp", sim.amp, "cosine amplitude");
    simulate->add_option("--axis", sim.axis, "cosine axis");
    simulate->add_flag("--override-bg", sim.override_bg, "decouple N from eps");
    simulate->add_option("--out", sim.out, "output CSV path");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "kinetic solver histogram CSV");
    solve->add_option("--seed", sol.seed, "master seed");
    solve->add_option("--beta", sol.beta, "inverse temperature");
    solve->add_option("--d", sol.d, "dimension (2 or 3)");
    solve->add_option("--t", sol.t, "final time");
    solve->add_option("--obs", sol.obs, "observation times, comma list (default t)");
    solve->add_option("--rho", sol.rho, "initial datum: constant|cosine");
    solve->add_option("--amp", sol.amp, "cosine amplitude");
    solve->add_option("--axis", sol.axis, "cosine axis");
    solve->add_option("--paths", sol.paths, "Monte Carlo paths");
    solve->add_option("--bins", sol.bins, "spatial bins per dimension, comma list");
    solve->add_option("--vbins", sol.vbins, "velocity bins per component (0 = off)");
    solve->add_option("--vmax", sol.vmax, "velocity bin range");
    solve->add_flag("--collisionless", sol.collisionless, "switch the jump kernel off");
    solve->add_option("--out", sol.out, "output CSV path");

    std::string cfg_path, ov_out, ov_eps, ov_bins;
    uint64_t ov_seed = 0, ov_replicas = 0, ov_paths = 0;
    double ov_t = -1.0, ov_alpha = -1.0;
    bool ov_override_bg = false;
    bool seed_set = false, out_set = false;
    auto* converge = app.add_subcommand("converge", "full kinetic-limit convergence study");
    converge->add_option("--config", cfg_path, "flat key=value config file");
    converge->add_option("--seed", ov_seed, "master seed")->each([&](const std::string&) { seed_set = true; });
    converge->add_option("--out", ov_out, "output directory")->each([&](const std::string&) { out_set = true; });
    converge->add_option("--eps", ov_eps, "eps list, comma separated");
    converge->add_option("--replicas", ov_replicas, "gas replicas per eps");
    converge->add_option("--paths", ov_paths, "solver paths (default 10x replicas)");
    converge->add_option("--bins", ov_bins, "spatial bins per dimension");
    converge->add_option("--t", ov_t, "horizon; also sets the observation time");
    converge->add_option("--alpha", ov_alpha, "rate-fit exponent (descriptive)");
    converge->add_flag("--override-bg", ov_override_bg, "decouple N from eps (needs n_override)");

    AuditGrid grid;
    std::string audit_out = "out";
    int kmin = 6, kmax = 14;
    std::string alphas_str = "0.1,0.25,0.4";
    auto* audit = app.add_subcommand("audit", "pruning schedule and bound audit CSVs");
    audit->add_option("--kmin", kmin, "smallest cut count");
    audit->add_option("--kmax", kmax, "largest cut count");
    audit->add_option("--alphas", alphas_str, "alpha grid, comma list");
    audit->add_option("--C", grid.C, "bound constant");
    audit->add_option("--t", grid.t, "time horizon");
    audit->add_option("--c-beta", grid.c_beta, "rate constant for the cut-count table");
    audit->add_option("--out", audit_out, "output directory");

    auto* selftest = app.add_subcommand("selftest", "quick invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (solve->parsed()) return cmd_solve(sol);
        if (converge->parsed()) {
            ExperimentConfig config =
                cfg_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(cfg_path);
            if (seed_set) config.master_seed = ov_seed;
            if (out_set) config.out_dir = ov_out;
            if (!ov_eps.empty()) config.eps_list = parse_real_list(ov_eps);
            if (ov_replicas > 0) config.replicas = ov_replicas;
            if (ov_paths > 0) config.solver_paths = ov_paths;
            if (!ov_bins.empty()) config.bins = parse_int_list(ov_bins);
            if (ov_t >= 0.0) {
                config.t_final = ov_t;
                config.obs_times = {ov_t};
            }
            if (ov_alpha >= 0.0) config.rate_fit_alpha = ov_alpha;
            if (ov_override_bg) config.override_bg = true;
            StudyResult res = run_convergence_study(config);
            std::printf("wrote %s and %s (%zu rows)\n", res.results_path.c_str(),
                        res.manifest_path.c_str(), res.rows.size());
            for (const auto& row : res.rows)
                if (row.status != "ok") {
                    std::fprintf(stderr, "eps=%g: %s\n", row.eps, row.status.c_str());
                    return 1;
                }
            return 0;
        }
        if (audit->parsed()) {
            if (kmin < 1 || kmax < kmin) throw ConfigError("bad K range");
            grid.K_values.clear();
            for (int k = kmin; k <= kmax; ++k) grid.K_values.push_back(k);
            grid.alphas = parse_real_list(alphas_str);
            AuditResult res = run_pruning_audit(grid, audit_out);
            std::printf("wrote %s, %s, %s\n", res.audit_path.c_str(), res.remark_path.c_str(),
                        res.choose_path.c_str());
            return 0;
        }
        if (selftest->parsed()) return run_selftest(std::cout) ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
