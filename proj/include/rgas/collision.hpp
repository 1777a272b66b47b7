#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "rgas/params.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// Relative contact tolerance: a pair is "in contact" when ||dx| - eps| <= this * eps.
inline constexpr double kContactTol = 1e-9;

/// Transversality floor: contacts with normal relative speed below this are
/// treated as grazing no-ops (the dynamics is defined off a null set anyway).
inline constexpr double kGrazingTol = 1e-12;

/// Specular exchange of the normal velocity component along the contact
/// vector r = x_i - x_j. Normalizing by r.r (= eps^2 at contact) keeps the
/// map an exact reflection, so momentum and energy survive to roundoff.
inline void exchange_normal_velocity(const Vec& r, Vec& vi, Vec& vj) {
    double q = (vi - vj).dot(r) / r.norm2();
    vi -= q * r;
    vj += q * r;
}

/// Hard-sphere collision law for a pair at contact. Requires the pair to be
/// incoming or exactly grazing ((x_i - x_j).(v_i - v_j) <= 0; grazing leaves
/// the velocities unchanged); an outgoing pair indicates a simulator logic
/// error, not bad data.
inline std::pair<Vec, Vec> collide(const PhasePoint& zi, const PhasePoint& zj, double eps) {
    Vec r = torus_displacement(zj.x, zi.x);  // x_i - x_j, minimum image
    if (std::abs(r.norm() - eps) > kContactTol * eps)
        throw InvariantError("collide() called on a pair that is not at contact");
    if (r.dot(zi.v - zj.v) > 0.0)
        throw InvariantError("collide() called on an outgoing pair");
    Vec vi = zi.v, vj = zj.v;
    exchange_normal_velocity(r, vi, vj);
    return {vi, vj};
}

/// Outcome of a pair prediction.
struct ContactPrediction {
    enum Kind { kNone, kContact, kHorizon } kind = kNone;
    double tau = 0.0;  // time offset from the prediction instant
};

/// Distance budget within which the minimum image stays the relevant one:
/// no other periodic image can reach contact before the relative motion has
/// covered at least (1/2 - eps), and we re-examine at half the distance-1/2
/// traversal time (tighter near eps = 1/2).
inline double horizon_distance(double eps) {
    return std::min(0.25, 0.5 * (0.5 - eps));
}

/// First contact time of a pair under free flight, from the minimum image.
/// dx is the minimum-image displacement x_j - x_i, dv = v_j - v_i. Returns a
/// contact inside the image-validity horizon, a horizon event (re-predict
/// later), or nothing (zero relative velocity). Grazing roots (normal speed
/// below kGrazingTol) are not reported.
inline ContactPrediction predict_contact(const Vec& dx, const Vec& dv, double eps) {
    double a = dv.norm2();
    if (a == 0.0) return {ContactPrediction::kNone, 0.0};
    double tau_h = horizon_distance(eps) / std::sqrt(a);
    double b = dx.dot(dv);
    double c = dx.norm2() - eps * eps;
    if (b < 0.0) {
        double disc = b * b - a * c;
        if (disc > 0.0) {
            double sq = std::sqrt(disc);
            if (sq > kGrazingTol) {
                // stable small root; equals (-b - sq)/a without cancellation
                double tau = c > 0.0 ? c / (-b + sq) : 0.0;
                if (tau <= tau_h) return {ContactPrediction::kContact, tau};
            }
        }
    }
    return {ContactPrediction::kHorizon, tau_h};
}

/// Spec-level wrapper: earliest contact time of two phase points, if any
/// occurs before the re-prediction horizon.
inline std::optional<double> predict_collision(const PhasePoint& zi, const PhasePoint& zj,
                                               double eps) {
    ContactPrediction p = predict_contact(torus_displacement(zi.x, zj.x), zj.v - zi.v, eps);
    if (p.kind == ContactPrediction::kContact) return p.tau;
    return std::nullopt;
}

}  // namespace rgas
