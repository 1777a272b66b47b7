#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>

#include "rgas/params.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// Nonnegative continuous weight on the torus with known sup/inf bounds.
/// Used both as the tagged-particle space perturbation of the gas initial
/// data and as the initial datum of the kinetic equation.
class Perturbation {
public:
    using Fn = std::function<double(const Vec&)>;

    static Perturbation constant() {
        Perturbation p;
        p.name_ = "constant";
        p.fn_ = [](const Vec&) { return 1.0; };
        p.sup_ = p.inf_ = 1.0;
        return p;
    }

    /// 1 + a cos(2 pi x_axis), |a| < 1.
    static Perturbation cosine(double amplitude, int axis = 0) {
        if (!(std::abs(amplitude) < 1.0)) throw ConfigError("cosine amplitude must satisfy |a| < 1");
        Perturbation p;
        p.name_ = "cosine";
        p.amplitude_ = amplitude;
        p.axis_ = axis;
        p.fn_ = [amplitude, axis](const Vec& x) {
            return 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x[axis]);
        };
        p.sup_ = 1.0 + std::abs(amplitude);
        p.inf_ = 1.0 - std::abs(amplitude);
        return p;
    }

    static Perturbation custom(std::string name, Fn fn, double sup, double inf) {
        if (!(sup > 0.0) || inf < 0.0 || inf > sup) throw ConfigError("bad perturbation bounds");
        Perturbation p;
        p.name_ = std::move(name);
        p.fn_ = std::move(fn);
        p.sup_ = sup;
        p.inf_ = inf;
        return p;
    }

    double operator()(const Vec& x) const { return fn_(x); }
    double sup() const { return sup_; }
    double inf() const { return inf_; }
    const std::string& name() const { return name_; }
    double amplitude() const { return amplitude_; }
    int axis() const { return axis_; }

    /// Torus point distributed proportionally to the weight (exact rejection).
    Vec sample_position(int dim, Philox& rng, long budget = 1000000) const {
        for (long i = 0; i < budget; ++i) {
            Vec x(dim);
            for (int k = 0; k < dim; ++k) x[k] = rng.uniform();
            if (rng.uniform() * sup_ <= fn_(x)) return x;
        }
        throw SamplingError("perturbation position sampling exhausted its budget (is the weight ~0?)");
    }

private:
    std::string name_;
    Fn fn_;
    double sup_ = 1.0;
    double inf_ = 1.0;
    double amplitude_ = 0.0;
    int axis_ = 0;
};

}  // namespace rgas
