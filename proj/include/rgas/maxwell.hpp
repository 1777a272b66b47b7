#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "rgas/rng.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// Equilibrium velocity density (beta/2pi)^{d/2} exp(-beta |v|^2 / 2).
inline double maxwellian_density(const Vec& v, double beta) {
    double pref = std::pow(beta / (2.0 * std::numbers::pi), 0.5 * v.dim());
    return pref * std::exp(-0.5 * beta * v.norm2());
}

/// Draw a velocity with i.i.d. Gaussian components of variance 1/beta.
inline Vec maxwellian_sample(double beta, int dim, Philox& rng) {
    Vec v(dim);
    double sigma = 1.0 / std::sqrt(beta);
    for (int k = 0; k < dim; ++k) v[k] = sigma * rng.normal();
    return v;
}

/// Total kinetic energy (1/2) sum |v_i|^2.
inline double kinetic_energy(std::span<const Vec> velocities) {
    double s = 0.0;
    for (const Vec& v : velocities) s += v.norm2();
    return 0.5 * s;
}

}  // namespace rgas
