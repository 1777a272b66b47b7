#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rgas/histogram.hpp"
#include "rgas/params.hpp"
#include "rgas/perturbation.hpp"

namespace rgas {

/// Convergence-study configuration. Loadable from a flat key=value file
/// (one key per line, '#' comments); every knob also has a CLI flag.
struct ExperimentConfig {
    int dim = 2;
    double beta = 1.0;

    std::string rho_name = "cosine";  // constant | cosine
    double rho_amplitude = 0.5;
    int rho_axis = 0;

    double t_final = 0.5;
    std::vector<double> obs_times = {0.5};

    std::vector<double> eps_list = {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
    bool override_bg = false;  // decouple N from eps
    int n_override = 0;        // particle count when override_bg is set

    uint64_t replicas = 2000;
    uint64_t solver_paths = 0;  // 0 -> 10x replicas

    std::vector<int> bins = {16};  // per-dimension spatial bins; missing dims get 1
    int vbins = 0;
    double vmax = 4.0;

    uint64_t master_seed = 1;
    std::string out_dir = "out";
    int threads = 0;  // 0 -> hardware concurrency
    int bootstrap_rounds = 200;
    double rate_fit_alpha = 0.25;  // exponent of the descriptive rate fit

    static ExperimentConfig from_file(const std::string& path);
    void set_key(const std::string& key, const std::string& value);
    void validate() const;

    Perturbation make_rho() const;
    BinSpec make_bins() const;
    int particles_for(double eps) const;

    /// Canonical key=value echo (deterministic order) for manifests.
    std::map<std::string, std::string> echo() const;
};

/// "0.5", "1e-3" or "a/b" fractions.
double parse_real(const std::string& s);
std::vector<double> parse_real_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

}  // namespace rgas
