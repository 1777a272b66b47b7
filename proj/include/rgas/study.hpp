#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rgas/config.hpp"
#include "rgas/gas.hpp"
#include "rgas/histogram.hpp"
#include "rgas/kinetic.hpp"
#include "rgas/pruning.hpp"

namespace rgas {

/// Stream-id namespaces (high bits of the Philox stream word). Each worker
/// owns one stream, so results never depend on thread scheduling.
namespace streams {
inline constexpr uint64_t kGas = 0x0000000000000000ull;
inline constexpr uint64_t kSolver = 0x4000000000000000ull;
inline constexpr uint64_t kBootstrap = 0x8000000000000000ull;

inline uint64_t gas_replica(size_t eps_index, uint64_t replica) {
    return kGas | (uint64_t(eps_index) << 40) | replica;
}
inline uint64_t solver_path(size_t eps_index, uint64_t path) {
    return kSolver | (uint64_t(eps_index) << 40) | path;
}
inline uint64_t bootstrap(size_t eps_index, uint64_t time_index) {
    return kBootstrap | (uint64_t(eps_index) << 40) | time_index;
}
}  // namespace streams

/// Index-based worker pool; the body runs once per index with no shared state.
void parallel_for(uint64_t n, int threads, const std::function<void(uint64_t)>& body);

/// One (eps, observation-time) result of the convergence study.
struct ConvergenceRow {
    double eps = 0.0;
    int n_particles = 0;
    double t_obs = 0.0;
    double dist_l1 = 0.0, dist_linf = 0.0;
    double se_l1 = 0.0, se_linf = 0.0;
    uint64_t replicas = 0, solver_paths = 0;
    double rate_fit_slope = 0.0;
    std::string status = "ok";  // or "failed:<reason>" partial-result marker
    double wall_s = 0.0;

    /// Deterministic column prefix (everything except wall_s).
    std::string csv_prefix() const;
};

struct StudyResult {
    std::vector<ConvergenceRow> rows;
    std::string results_path;
    std::string manifest_path;
};

/// For each eps: run independent hard-sphere replicas, solve the kinetic
/// density on matched bins with (by default) 10x the sample count, and emit
/// binned L1/Linf distances with bootstrap standard errors, plus a JSON
/// manifest carrying the config echo, seed and per-row digests.
StudyResult run_convergence_study(const ExperimentConfig& config);

/// Pruning audit grid parameters.
struct AuditGrid {
    std::vector<int> K_values = {6, 7, 8, 9, 10, 11, 12, 13, 14};
    std::vector<double> alphas = {0.1, 0.25, 0.4};
    double C = 1.0;
    double t = 1.0;
    std::vector<int> remark_K = {8, 9, 10, 11, 12, 13, 14};
    std::vector<double> choose_eps = {};  // defaults to exp(-25..-400) inside
    double c_beta = 0.05;
    double rate_alpha = 0.25;
};

struct AuditResult {
    std::vector<BoundReport> grid;
    std::vector<RemarkReport> remark;
    std::string audit_path, remark_path, choose_path;
};

/// Full bound-report grid plus the finite-horizon variant and the cut-count
/// table, written as CSV files under out_dir.
AuditResult run_pruning_audit(const AuditGrid& grid, const std::string& out_dir);

// Building blocks shared with the CLI and the acceptance suite -------------

struct GasEnsembleResult {
    std::vector<TrajectoryRecord> records;
    MarginalHistogram marginal;
};

/// Run `replicas` independent gas replicas (deterministic per-replica
/// streams) and bin the tagged particle. A replica failure propagates as an
/// exception; the study turns it into a partial-result marker for that eps.
GasEnsembleResult run_gas_ensemble(const ExperimentConfig& config, double eps,
                                   size_t eps_index, const BinSpec& bins);

/// Solver side with per-path streams; mirrors solve_density but parallel.
DensityEstimate run_solver_ensemble(const ExperimentConfig& config, const KineticModel& model,
                                    size_t eps_index, uint64_t n_paths, const BinSpec& bins);

}  // namespace rgas
