#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rgas/histogram.hpp"
#include "rgas/numeric.hpp"
#include "rgas/params.hpp"
#include "rgas/perturbation.hpp"
#include "rgas/rng.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// One velocity jump of the tagged-particle kinetic process.
struct JumpEvent {
    double time = 0.0;
    Vec v_before;
    Vec v_background;  // thermal scatterer velocity
    Vec direction;     // unit impact direction
    Vec v_after;       // v + [direction.(v_background - v_before)] direction
    uint64_t proposals = 0;
};

/// Velocity-jump Markov process whose forward equation is the linear
/// hard-sphere kinetic equation at inverse temperature beta.
///
/// The jump intensity is lambda(v) = c_d * E|v_c - v| with v_c thermal and
/// c_d the angular integral of the positive-part kernel over the sphere; the
/// reduction constant is verified numerically at construction. lambda is
/// evaluated by adaptive quadrature of the one-dimensional relative-speed
/// integral and cached as a Chebyshev fit in |v|.
class KineticModel {
public:
    explicit KineticModel(KineticParams params, bool collisionless = false);

    const KineticParams& params() const { return params_; }
    bool collisionless() const { return collisionless_; }

    /// Total jump rate lambda(v); depends on |v| only.
    double total_rate(const Vec& v) const { return total_rate_speed(v.norm()); }
    double total_rate_speed(double speed) const;

    /// Quadrature route without the interpolation cache (slow; used to build
    /// the cache and for cross-checks).
    double total_rate_direct(double speed) const;

    /// Mean thermal speed E|v_c|.
    double mean_speed() const { return mean_speed_; }

    /// Angular reduction constant c_d.
    double angular_constant() const { return c_d_; }

    /// Draw (v_c, omega) proportional to the kernel M_beta(v_c) [omega.(v_c - v)]_+
    /// by rejection with the |v| + |v_c| majorant.
    JumpEvent sample_jump(const Vec& v, Philox& rng, long budget = 1'000'000) const;

    /// Free flight plus jumps up to time t. Transport moves x by +v ds.
    PhasePoint evolve(const PhasePoint& z0, double t, Philox& rng) const;

    /// Dual walk: same jump law, transport reversed (x by -v ds).
    PhasePoint evolve_adjoint(const PhasePoint& z0, double t, Philox& rng) const;

    /// Forward path reporting the state at each time in `times` (sorted).
    void evolve_observed(const PhasePoint& z0, std::span<const double> times, Philox& rng,
                         const std::function<void(size_t, const PhasePoint&)>& sink) const;

private:
    PhasePoint walk(const PhasePoint& z0, double t, Philox& rng, double drift_sign,
                    std::span<const double> times,
                    const std::function<void(size_t, const PhasePoint&)>* sink) const;

    KineticParams params_;
    bool collisionless_;
    double c_d_;
    double mean_speed_;
    double u_max_;
    ChebyshevFit rate_fit_;
};

/// Pointwise Monte Carlo estimate with its spread.
struct PhiEstimate {
    double mean = 0.0;
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
    uint64_t n_paths = 0;
};

/// Dual-walk estimator of the perturbation field phi(t, x, v): average of
/// rho over adjoint paths started at (x, v). Every path value is a rho
/// evaluation, so estimates obey min rho <= estimate <= max rho exactly.
PhiEstimate estimate_phi(const KineticModel& model, const Vec& x, const Vec& v, double t,
                         const Perturbation& rho, uint64_t n_paths, Philox& rng);

/// Binned forward-in-time density estimate at each observation time.
struct DensityEstimate {
    std::vector<double> times;
    std::vector<Histogram> histograms;
    std::vector<std::vector<uint32_t>> sample_cells;  // [time][path]
};

/// Sample initial data (x ~ rho-normalized, v thermal), run forward paths,
/// and bin the positions (and optionally velocities). Histograms are
/// empirical measures: they sum to one exactly.
DensityEstimate solve_density(const KineticModel& model, const Perturbation& rho,
                              std::span<const double> times, uint64_t n_paths,
                              const BinSpec& bins, Philox& rng);

/// Single-time convenience overload.
DensityEstimate solve_density(const KineticModel& model, const Perturbation& rho, double t,
                              uint64_t n_paths, const BinSpec& bins, Philox& rng);

}  // namespace rgas
