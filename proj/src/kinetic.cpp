#include "rgas/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rgas/maxwell.hpp"

namespace rgas {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(-s) * integral_0^pi exp(s cos t) dt, the scaled angular factor of the
// planar noncentral speed density. Periodic trapezoid; the point count grows
// with sqrt(s) to resolve the peak at t = 0.
double scaled_angular_d2(double s) {
    int n = 64 + 16 * static_cast<int>(std::ceil(std::sqrt(s)));
    double h = kPi / n;
    double sum = 0.5 * (1.0 + std::exp(-2.0 * s));  // endpoints t = 0, pi
    for (int k = 1; k < n; ++k) sum += std::exp(-s * (1.0 - std::cos(k * h)));
    return h * sum;
}

// exp(-s) * 2 sinh(s)/s, the spatial analogue.
double scaled_angular_d3(double s) {
    if (s < 1e-8) return 2.0 - 2.0 * s;
    return -std::expm1(-2.0 * s) / s;
}

}  // namespace

KineticModel::KineticModel(KineticParams params, bool collisionless)
    : params_(params), collisionless_(collisionless) {
    params_.validate();
    const int d = params_.dim;
    c_d_ = std::pow(kPi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));

    // Check the angular reduction int_{S^{d-1}} [w.e]_+ dw = c_d before use.
    double numeric = d == 2 ? integrate([](double t) { return std::cos(t); }, -kPi / 2, kPi / 2, 1e-13)
                            : 2.0 * kPi * integrate([](double t) { return std::cos(t) * std::sin(t); },
                                                    0.0, kPi / 2, 1e-13);
    if (std::abs(numeric - c_d_) > 1e-8)
        throw InvariantError("angular reduction constant failed its numeric check");

    mean_speed_ = std::sqrt(2.0 / params_.beta) * std::tgamma(0.5 * (d + 1)) / std::tgamma(0.5 * d);

    u_max_ = 16.0 / std::sqrt(params_.beta);
    rate_fit_ = ChebyshevFit([this](double u) { return total_rate_direct(u); }, 0.0, u_max_, 96);
}

double KineticModel::total_rate_direct(double speed) const {
    const double beta = params_.beta;
    const int d = params_.dim;
    const double u = std::abs(speed);
    // Relative-speed density: p(r) = (beta/2pi)^{d/2} S_{d-2} r^{d-1}
    //   exp(-beta (r-u)^2 / 2) * scaled_angular(beta r u); lambda = c_d int r p(r) dr.
    double pref = std::pow(beta / (2.0 * kPi), 0.5 * d) * (d == 2 ? 2.0 : 2.0 * kPi);
    auto integrand = [&](double r) {
        double s = beta * r * u;
        double ang = d == 2 ? scaled_angular_d2(s) : scaled_angular_d3(s);
        double gauss = std::exp(-0.5 * beta * (r - u) * (r - u));
        return std::pow(r, d) * gauss * ang;
    };
    double r_hi = u + 10.0 / std::sqrt(beta);
    double scale = c_d_ * pref * (u + mean_speed_ + 1.0);
    double integral = integrate(integrand, 0.0, r_hi, 1e-12 * std::max(scale, 1.0));
    return c_d_ * pref * integral;
}

double KineticModel::total_rate_speed(double speed) const {
    if (collisionless_) return 0.0;
    double u = std::abs(speed);
    if (u <= u_max_) return rate_fit_(u);
    return total_rate_direct(u);  // far outside the thermal bulk; rare
}

JumpEvent KineticModel::sample_jump(const Vec& v, Philox& rng, long budget) const {
    const int d = params_.dim;
    const double beta = params_.beta;
    const double vnorm = v.norm();
    const double weight = vnorm + mean_speed_;
    for (long k = 1; k <= budget; ++k) {
        Vec vc(d);
        if (rng.uniform() * weight < vnorm) {
            vc = maxwellian_sample(beta, d, rng);
        } else {
            // speed-biased thermal draw: radial density ~ r^d exp(-beta r^2/2)
            double r = std::sqrt(2.0 * rng.gamma(0.5 * (d + 1)) / beta);
            vc = r * rng.unit_vector(d);
        }
        Vec omega = rng.unit_vector(d);
        double s = omega.dot(vc - v);
        if (s <= 0.0) continue;
        if (rng.uniform() * (vnorm + vc.norm()) >= s) continue;
        JumpEvent ev;
        ev.v_before = v;
        ev.v_background = vc;
        ev.direction = omega;
        ev.v_after = v + s * omega;
        ev.proposals = static_cast<uint64_t>(k);
        return ev;
    }
    throw SamplingError("jump sampling exhausted its budget of " + std::to_string(budget) +
                        " proposals at speed " + std::to_string(vnorm) +
                        "; the |v|+|v_c| majorant should accept within a few tries");
}

PhasePoint KineticModel::walk(const PhasePoint& z0, double t, Philox& rng, double drift_sign,
                              std::span<const double> times,
                              const std::function<void(size_t, const PhasePoint&)>* sink) const {
    PhasePoint z = z0;
    z.x = torus_reduce(z.x);
    double now = 0.0;
    size_t ti = 0;
    auto drift_to = [&](double target) {
        while (ti < times.size() && times[ti] <= target) {
            PhasePoint obs = z;
            obs.x = torus_reduce(obs.x + drift_sign * (times[ti] - now) * obs.v);
            (*sink)(ti, obs);
            ++ti;
        }
        z.x = torus_reduce(z.x + drift_sign * (target - now) * z.v);
        now = target;
    };

    for (;;) {
        double lambda = total_rate(z.v);
        double dt = lambda > 0.0 ? rng.exponential(lambda) : kInf;
        if (now + dt >= t) {
            drift_to(t);
            return z;
        }
        drift_to(now + dt);
        JumpEvent ev = sample_jump(z.v, rng);
        z.v = ev.v_after;
    }
}

PhasePoint KineticModel::evolve(const PhasePoint& z0, double t, Philox& rng) const {
    return walk(z0, t, rng, +1.0, {}, nullptr);
}

PhasePoint KineticModel::evolve_adjoint(const PhasePoint& z0, double t, Philox& rng) const {
    return walk(z0, t, rng, -1.0, {}, nullptr);
}

void KineticModel::evolve_observed(const PhasePoint& z0, std::span<const double> times,
                                   Philox& rng,
                                   const std::function<void(size_t, const PhasePoint&)>& sink) const {
    if (times.empty()) return;
    walk(z0, times.back(), rng, +1.0, times, &sink);
}

PhiEstimate estimate_phi(const KineticModel& model, const Vec& x, const Vec& v, double t,
                         const Perturbation& rho, uint64_t n_paths, Philox& rng) {
    if (n_paths < 2) throw ConfigError("estimate_phi needs at least 2 paths");
    PhiEstimate est;
    est.n_paths = n_paths;
    est.min = kInf;
    est.max = -kInf;
    double sum = 0.0, sum2 = 0.0;
    for (uint64_t p = 0; p < n_paths; ++p) {
        PhasePoint z = model.evolve_adjoint({x, v}, t, rng);
        double value = rho(z.x);
        sum += value;
        sum2 += value * value;
        est.min = std::min(est.min, value);
        est.max = std::max(est.max, value);
    }
    est.mean = sum / n_paths;
    double var = std::max(0.0, sum2 / n_paths - est.mean * est.mean);
    est.se = std::sqrt(var / n_paths);
    return est;
}

DensityEstimate solve_density(const KineticModel& model, const Perturbation& rho,
                              std::span<const double> times, uint64_t n_paths,
                              const BinSpec& bins, Philox& rng) {
    bins.validate();
    if (n_paths < 2) throw ConfigError("solve_density needs at least 2 paths");
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0) throw ConfigError("observation times must be nonnegative");
        if (k > 0 && times[k] < times[k - 1]) throw ConfigError("observation times must be sorted");
    }
    const int d = model.params().dim;
    DensityEstimate out;
    out.times.assign(times.begin(), times.end());
    out.sample_cells.assign(times.size(), {});
    for (auto& v : out.sample_cells) v.resize(n_paths);

    for (uint64_t p = 0; p < n_paths; ++p) {
        PhasePoint z0;
        z0.x = rho.sample_position(d, rng);
        z0.v = maxwellian_sample(model.params().beta, d, rng);
        model.evolve_observed(z0, times, rng, [&](size_t ti, const PhasePoint& z) {
            out.sample_cells[ti][p] = static_cast<uint32_t>(bins.cell_of(z));
        });
    }
    for (size_t ti = 0; ti < times.size(); ++ti)
        out.histograms.push_back(histogram_from_cells(bins, times[ti], out.sample_cells[ti]));
    return out;
}

DensityEstimate solve_density(const KineticModel& model, const Perturbation& rho, double t,
                              uint64_t n_paths, const BinSpec& bins, Philox& rng) {
    double times[1] = {t};
    return solve_density(model, rho, std::span<const double>(times, 1), n_paths, bins, rng);
}

}  // namespace rgas
