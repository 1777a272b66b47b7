#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "rgas/collision.hpp"
#include "rgas/maxwell.hpp"
#include "rgas/params.hpp"
#include "rgas/perturbation.hpp"
#include "rgas/rng.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// Full N-particle state. Index 0 is the tagged particle.
struct GasConfiguration {
    ModelParams params;
    std::vector<PhasePoint> phase;
    double time = 0.0;

    double min_pair_distance() const;
    double total_energy() const;
    /// Throws InvariantError on pairwise overlap beyond tolerance.
    void validate() const;
};

struct InitBudget {
    long config_attempts = 1'000'000;        // perturbation-acceptance retries
    long placement_draws_per_particle = 100'000;
};

/// Equilibrium-plus-perturbation initial data: positions by sequential
/// insertion with exclusion rejection, the whole configuration accepted with
/// probability rho(x_tagged)/sup rho, velocities i.i.d. Maxwellian. The
/// configurational normalization is realized by rejection, never computed.
GasConfiguration init_equilibrium(const ModelParams& params, const Perturbation& rho,
                                  Philox& rng, const InitBudget& budget = {});

/// Tagged-particle observables sampled at requested times, plus conservation
/// diagnostics accumulated over every executed collision.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<PhasePoint> tagged;
    std::vector<uint64_t> tagged_collisions;  // cumulative at each time
    std::vector<double> energy;               // total kinetic energy at each time

    uint64_t total_collisions = 0;
    uint64_t grazing_skipped = 0;
    double max_momentum_error = 0.0;  // per-collision |dP|_inf, worst case
    double max_energy_error = 0.0;    // per-collision |dE|, worst case
    double min_pair_distance = std::numeric_limits<double>::infinity();
};

/// Event-driven hard-sphere dynamics on the torus.
///
/// Pair events live in a binary heap and are invalidated lazily through
/// per-particle version stamps. Positions are stored at their last update
/// time and materialized on access (free flight is exact). Periodic images
/// are handled with the minimum image plus a re-prediction horizon, so each
/// prediction is a single quadratic solve.
class EventDrivenGas {
public:
    explicit EventDrivenGas(GasConfiguration config);

    /// Advance to t_final, recording the tagged particle at each observation
    /// time (sorted, inside (time(), t_final]). May be called repeatedly.
    TrajectoryRecord run(double t_final, std::span<const double> observation_times);

    /// Reverse every velocity in place (all pending events are rebuilt).
    void flip_velocities();

    GasConfiguration snapshot() const;
    double time() const { return time_; }
    uint64_t total_collisions() const { return total_collisions_; }
    uint64_t tagged_collisions() const { return tagged_collisions_; }
    double total_energy() const;

    /// Full O(N^2) overlap scan at each observation time (default on).
    void set_validate_at_observations(bool on) { validate_at_obs_ = on; }

private:
    struct Event {
        double time;
        uint32_t i, j;
        uint32_t ver_i, ver_j;
        bool is_contact;  // otherwise a horizon re-prediction
    };
    struct EventLater {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.i != b.i) return a.i > b.i;        // deterministic tie order
            if (a.j != b.j) return a.j > b.j;
            return a.is_contact < b.is_contact;
        }
    };

    void position_at(uint32_t i, double t, double* out) const;
    void commit(uint32_t i, double t);
    void predict_pair(uint32_t i, uint32_t j, double t_ref);
    void predict_all(uint32_t i, double t_ref, uint32_t skip);
    void rebuild_all_events();
    void execute_contact(const Event& e);
    void observe(double t_obs, TrajectoryRecord& rec);
    double min_pair_distance_at(double t) const;

    ModelParams params_;
    int d_;
    uint32_t n_;
    double time_ = 0.0;

    std::vector<double> pos_;      // d*N, reduced, valid at stamp_
    std::vector<double> vel_;      // d*N
    std::vector<double> stamp_;    // per-particle position timestamp
    std::vector<uint32_t> ver_;    // per-particle version, bumped by collisions
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;

    uint64_t total_collisions_ = 0;
    uint64_t tagged_collisions_ = 0;
    uint64_t grazing_skipped_ = 0;
    double max_dp_ = 0.0;
    double max_de_ = 0.0;
    double min_dist_seen_ = std::numeric_limits<double>::infinity();
    bool validate_at_obs_ = true;
};

/// Single-shot convenience wrapper.
TrajectoryRecord run_gas(GasConfiguration config, double t_final,
                         std::span<const double> observation_times);

}  // namespace rgas
