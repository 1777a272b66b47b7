#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rgas {

/// Bad user input (config file, CLI, parameter domain). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A simulator self-check failed; indicates a logic bug, not bad input. Exit code 1.
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A rejection sampler exhausted its budget.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Hard-sphere gas parameters. Unit torus, unit mass, dimensionless time.
struct ModelParams {
    int dim = 2;              // spatial dimension, 2 or 3
    double eps = 0.0;         // sphere diameter (centers may not come closer)
    int n_particles = 1;
    double beta = 1.0;        // inverse temperature
    bool allow_off_scaling = false;  // permit N*eps^{d-1} far from 1

    double scaling_product() const { return n_particles * std::pow(eps, dim - 1); }

    void validate() const {
        if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
        if (!(eps > 0.0 && eps < 0.5))
            throw ConfigError("eps must lie in (0, 1/2); the minimum image is unique only there");
        if (n_particles < 1) throw ConfigError("n_particles must be >= 1");
        if (!(beta > 0.0)) throw ConfigError("beta must be positive");
        if (!allow_off_scaling) {
            double drift = std::abs(scaling_product() - 1.0);
            if (drift > 1.0 / n_particles)
                throw ConfigError(
                    "N*eps^{d-1} = " + std::to_string(scaling_product()) +
                    " is off the constant-mean-free-path scaling; pass the override to allow it");
        }
    }
};

/// Parameters of the limiting kinetic model.
struct KineticParams {
    int dim = 2;
    double beta = 1.0;

    void validate() const {
        if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
        if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    }
};

}  // namespace rgas
