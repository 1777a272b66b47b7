#include "rgas/gas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rgas {

namespace {

double exclusion_ball_volume(int dim, double eps) {
    return dim == 2 ? std::numbers::pi * eps * eps
                    : (4.0 / 3.0) * std::numbers::pi * eps * eps * eps;
}

}  // namespace

// ---------------------------------------------------------------------------
// GasConfiguration
// ---------------------------------------------------------------------------

double GasConfiguration::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < phase.size(); ++i)
        for (size_t j = i + 1; j < phase.size(); ++j)
            best = std::min(best, torus_distance(phase[i].x, phase[j].x));
    return best;
}

double GasConfiguration::total_energy() const {
    double s = 0.0;
    for (const PhasePoint& z : phase) s += z.v.norm2();
    return 0.5 * s;
}

void GasConfiguration::validate() const {
    params.validate();
    if (phase.size() != static_cast<size_t>(params.n_particles))
        throw InvariantError("configuration size does not match n_particles");
    if (phase.size() > 1) {
        double dmin = min_pair_distance();
        if (dmin < params.eps * (1.0 - kContactTol))
            throw InvariantError("pairwise overlap: min distance " + std::to_string(dmin) +
                                 " below diameter " + std::to_string(params.eps));
    }
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

GasConfiguration init_equilibrium(const ModelParams& params, const Perturbation& rho,
                                  Philox& rng, const InitBudget& budget) {
    params.validate();
    const int d = params.dim;
    const int n = params.n_particles;
    double packing = n * exclusion_ball_volume(d, params.eps);
    if (packing >= 0.3)
        throw ConfigError("packing fraction " + std::to_string(packing) +
                          " too dense for rejection initialization (need N*vol(eps-ball) < 0.3)");

    GasConfiguration cfg;
    cfg.params = params;
    cfg.phase.resize(n);
    std::vector<Vec> xs(n, Vec(d));

    for (long attempt = 0; attempt < budget.config_attempts; ++attempt) {
        bool placed_all = true;
        for (int i = 0; i < n && placed_all; ++i) {
            long draws = 0;
            for (;;) {
                if (++draws > budget.placement_draws_per_particle) {
                    placed_all = false;
                    break;
                }
                Vec x(d);
                for (int k = 0; k < d; ++k) x[k] = rng.uniform();
                bool clear = true;
                for (int j = 0; j < i; ++j) {
                    if (torus_distance(x, xs[j]) <= params.eps) {
                        clear = false;
                        break;
                    }
                }
                if (clear) {
                    xs[i] = x;
                    break;
                }
            }
        }
        if (!placed_all)
            throw SamplingError("exclusion placement exhausted its budget (packing too dense)");
        if (rng.uniform() * rho.sup() > rho(xs[0])) continue;

        for (int i = 0; i < n; ++i) {
            cfg.phase[i].x = xs[i];
            cfg.phase[i].v = maxwellian_sample(params.beta, d, rng);
        }
        return cfg;
    }
    throw SamplingError("perturbation acceptance exhausted its budget (is rho ~ 0?)");
}

// ---------------------------------------------------------------------------
// EventDrivenGas
// ---------------------------------------------------------------------------

EventDrivenGas::EventDrivenGas(GasConfiguration config)
    : params_(config.params), d_(config.params.dim),
      n_(static_cast<uint32_t>(config.params.n_particles)), time_(config.time) {
    config.validate();
    pos_.resize(size_t{n_} * d_);
    vel_.resize(size_t{n_} * d_);
    stamp_.assign(n_, time_);
    ver_.assign(n_, 0);
    for (uint32_t i = 0; i < n_; ++i)
        for (int k = 0; k < d_; ++k) {
            pos_[size_t{i} * d_ + k] = wrap_unit(config.phase[i].x[k]);
            vel_[size_t{i} * d_ + k] = config.phase[i].v[k];
        }
    rebuild_all_events();
}

void EventDrivenGas::position_at(uint32_t i, double t, double* out) const {
    double dt = t - stamp_[i];
    const double* p = &pos_[size_t{i} * d_];
    const double* v = &vel_[size_t{i} * d_];
    for (int k = 0; k < d_; ++k) out[k] = wrap_unit(p[k] + dt * v[k]);
}

void EventDrivenGas::commit(uint32_t i, double t) {
    double x[3];
    position_at(i, t, x);
    double* p = &pos_[size_t{i} * d_];
    for (int k = 0; k < d_; ++k) p[k] = x[k];
    stamp_[i] = t;
}

void EventDrivenGas::predict_pair(uint32_t i, uint32_t j, double t_ref) {
    double xi[3], xj[3];
    position_at(i, t_ref, xi);
    position_at(j, t_ref, xj);
    Vec dx(d_), dv(d_);
    for (int k = 0; k < d_; ++k) {
        double u = xj[k] - xi[k];
        dx[k] = u - std::floor(u + 0.5);
        dv[k] = vel_[size_t{j} * d_ + k] - vel_[size_t{i} * d_ + k];
    }
    ContactPrediction p = predict_contact(dx, dv, params_.eps);
    if (p.kind == ContactPrediction::kNone) return;
    queue_.push(Event{t_ref + p.tau, i, j, ver_[i], ver_[j],
                      p.kind == ContactPrediction::kContact});
}

void EventDrivenGas::predict_all(uint32_t i, double t_ref, uint32_t skip) {
    for (uint32_t j = 0; j < n_; ++j)
        if (j != i && j != skip) predict_pair(std::min(i, j), std::max(i, j), t_ref);
}

void EventDrivenGas::rebuild_all_events() {
    queue_ = {};
    for (uint32_t i = 0; i + 1 < n_; ++i)
        for (uint32_t j = i + 1; j < n_; ++j) predict_pair(i, j, time_);
}

void EventDrivenGas::execute_contact(const Event& e) {
    const uint32_t i = e.i, j = e.j;
    commit(i, e.time);
    commit(j, e.time);

    Vec r(d_), vi(d_), vj(d_);
    for (int k = 0; k < d_; ++k) {
        double u = pos_[size_t{i} * d_ + k] - pos_[size_t{j} * d_ + k];
        r[k] = u - std::floor(u + 0.5);  // x_i - x_j, minimum image
        vi[k] = vel_[size_t{i} * d_ + k];
        vj[k] = vel_[size_t{j} * d_ + k];
    }
    double dist = r.norm();
    min_dist_seen_ = std::min(min_dist_seen_, dist);
    if (std::abs(dist - params_.eps) > kContactTol * params_.eps)
        throw InvariantError("contact event executed off the contact surface (distance " +
                             std::to_string(dist) + ")");

    double b = r.dot(vi - vj);
    if (b > -kGrazingTol) {
        // non-transversal contact: a measure-zero no-op
        ++grazing_skipped_;
        predict_pair(i, j, e.time);
        return;
    }

    Vec p_before = vi + vj;
    double e_before = vi.norm2() + vj.norm2();
    exchange_normal_velocity(r, vi, vj);
    Vec dp = (vi + vj) - p_before;
    double de = (vi.norm2() + vj.norm2()) - e_before;
    for (int k = 0; k < d_; ++k) {
        max_dp_ = std::max(max_dp_, std::abs(dp[k]));
        vel_[size_t{i} * d_ + k] = vi[k];
        vel_[size_t{j} * d_ + k] = vj[k];
    }
    max_de_ = std::max(max_de_, 0.5 * std::abs(de));

    ++ver_[i];
    ++ver_[j];
    ++total_collisions_;
    if (i == 0 || j == 0) ++tagged_collisions_;

    predict_all(i, e.time, j);
    predict_all(j, e.time, i);
    predict_pair(i, j, e.time);
}

void EventDrivenGas::observe(double t_obs, TrajectoryRecord& rec) {
    rec.times.push_back(t_obs);
    double x[3];
    position_at(0, t_obs, x);
    PhasePoint z;
    z.x = Vec(d_);
    z.v = Vec(d_);
    for (int k = 0; k < d_; ++k) {
        z.x[k] = x[k];
        z.v[k] = vel_[k];
    }
    rec.tagged.push_back(z);
    rec.tagged_collisions.push_back(tagged_collisions_);
    rec.energy.push_back(total_energy());

    if (validate_at_obs_ && n_ > 1) {
        double dmin = min_pair_distance_at(t_obs);
        min_dist_seen_ = std::min(min_dist_seen_, dmin);
        if (dmin < params_.eps * (1.0 - kContactTol))
            throw InvariantError("overlap detected at observation time (distance " +
                                 std::to_string(dmin) + ")");
    }
}

double EventDrivenGas::min_pair_distance_at(double t) const {
    std::vector<double> xs(size_t{n_} * d_);
    for (uint32_t i = 0; i < n_; ++i) position_at(i, t, &xs[size_t{i} * d_]);
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t i = 0; i + 1 < n_; ++i)
        for (uint32_t j = i + 1; j < n_; ++j) {
            double s = 0.0;
            for (int k = 0; k < d_; ++k) {
                double u = xs[size_t{i} * d_ + k] - xs[size_t{j} * d_ + k];
                u -= std::floor(u + 0.5);
                s += u * u;
            }
            best = std::min(best, s);
        }
    return std::sqrt(best);
}

double EventDrivenGas::total_energy() const {
    double s = 0.0;
    for (double v : vel_) s += v * v;
    return 0.5 * s;
}

TrajectoryRecord EventDrivenGas::run(double t_final, std::span<const double> observation_times) {
    if (t_final < time_) throw ConfigError("t_final precedes the current simulation time");
    for (size_t k = 0; k < observation_times.size(); ++k) {
        if (observation_times[k] < time_ || observation_times[k] > t_final)
            throw ConfigError("observation times must lie within [current time, t_final]");
        if (k > 0 && observation_times[k] < observation_times[k - 1])
            throw ConfigError("observation times must be sorted");
    }

    TrajectoryRecord rec;
    size_t obs_idx = 0;
    for (;;) {
        double t_next = queue_.empty() ? std::numeric_limits<double>::infinity() : queue_.top().time;
        double t_stop = std::min(t_next, t_final);
        while (obs_idx < observation_times.size() && observation_times[obs_idx] <= t_stop)
            observe(observation_times[obs_idx++], rec);
        if (queue_.empty() || t_next > t_final) break;

        Event e = queue_.top();
        queue_.pop();
        if (ver_[e.i] != e.ver_i || ver_[e.j] != e.ver_j) continue;  // stale
        time_ = e.time;
        if (e.is_contact)
            execute_contact(e);
        else
            predict_pair(e.i, e.j, e.time);
    }
    if (queue_.empty() && n_ > 1) {
        // legal only if no pair has relative motion; anything else is a lost event
        for (uint32_t i = 0; i + 1 < n_; ++i)
            for (uint32_t j = i + 1; j < n_; ++j)
                for (int k = 0; k < d_; ++k)
                    if (vel_[size_t{i} * d_ + k] != vel_[size_t{j} * d_ + k])
                        throw InvariantError("event queue exhausted before t_final");
    }
    time_ = t_final;

    rec.total_collisions = total_collisions_;
    rec.grazing_skipped = grazing_skipped_;
    rec.max_momentum_error = max_dp_;
    rec.max_energy_error = max_de_;
    rec.min_pair_distance = min_dist_seen_;
    return rec;
}

void EventDrivenGas::flip_velocities() {
    for (uint32_t i = 0; i < n_; ++i) {
        commit(i, time_);
        for (int k = 0; k < d_; ++k) vel_[size_t{i} * d_ + k] = -vel_[size_t{i} * d_ + k];
        ++ver_[i];
    }
    rebuild_all_events();
}

GasConfiguration EventDrivenGas::snapshot() const {
    GasConfiguration cfg;
    cfg.params = params_;
    cfg.time = time_;
    cfg.phase.resize(n_);
    for (uint32_t i = 0; i < n_; ++i) {
        double x[3];
        position_at(i, time_, x);
        cfg.phase[i].x = Vec(d_);
        cfg.phase[i].v = Vec(d_);
        for (int k = 0; k < d_; ++k) {
            cfg.phase[i].x[k] = x[k];
            cfg.phase[i].v[k] = vel_[size_t{i} * d_ + k];
        }
    }
    return cfg;
}

TrajectoryRecord run_gas(GasConfiguration config, double t_final,
                         std::span<const double> observation_times) {
    EventDrivenGas sim(std::move(config));
    return sim.run(t_final, observation_times);
}

}  // namespace rgas
