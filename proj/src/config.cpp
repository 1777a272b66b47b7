#include "rgas/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rgas {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::string& sep,
                 std::string (*fmt)(T)) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += fmt(xs[i]);
    }
    return out;
}

}  // namespace

double parse_real(const std::string& s) {
    std::string v = trim(s);
    size_t slash = v.find('/');
    try {
        if (slash != std::string::npos) {
            std::string num = trim(v.substr(0, slash));
            std::string den = trim(v.substr(slash + 1));
            size_t un = 0, ud = 0;
            double a = std::stod(num, &un);
            double b = std::stod(den, &ud);
            if (un != num.size() || ud != den.size() || b == 0.0)
                throw std::invalid_argument(v);
            return a / b;
        }
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse real value '" + s + "'");
    }
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(item));
    }
    if (out.empty()) throw ConfigError("empty list value");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double x : parse_real_list(s)) {
        if (x != std::floor(x)) throw ConfigError("expected integers in list '" + s + "'");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "d") dim = static_cast<int>(parse_real(value));
    else if (key == "beta") beta = parse_real(value);
    else if (key == "rho") rho_name = value;
    else if (key == "rho_amplitude") rho_amplitude = parse_real(value);
    else if (key == "rho_axis") rho_axis = static_cast<int>(parse_real(value));
    else if (key == "t_final") t_final = parse_real(value);
    else if (key == "obs_times") obs_times = parse_real_list(value);
    else if (key == "eps") eps_list = parse_real_list(value);
    else if (key == "override_bg") override_bg = parse_bool(value);
    else if (key == "n_override") n_override = static_cast<int>(parse_real(value));
    else if (key == "replicas") replicas = static_cast<uint64_t>(parse_real(value));
    else if (key == "paths") solver_paths = static_cast<uint64_t>(parse_real(value));
    else if (key == "bins") bins = parse_int_list(value);
    else if (key == "vbins") vbins = static_cast<int>(parse_real(value));
    else if (key == "vmax") vmax = parse_real(value);
    else if (key == "seed") master_seed = static_cast<uint64_t>(std::stoull(value));
    else if (key == "out") out_dir = value;
    else if (key == "threads") threads = static_cast<int>(parse_real(value));
    else if (key == "bootstrap") bootstrap_rounds = static_cast<int>(parse_real(value));
    else if (key == "rate_fit_alpha") rate_fit_alpha = parse_real(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("d must be 2 or 3");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (rho_name != "constant" && rho_name != "cosine")
        throw ConfigError("rho must be 'constant' or 'cosine'");
    if (eps_list.empty()) throw ConfigError("eps list is empty");
    for (double e : eps_list)
        if (!(e > 0.0 && e < 0.5)) throw ConfigError("every eps must lie in (0, 1/2)");
    if (replicas < 2) throw ConfigError("replicas must be >= 2");
    if (obs_times.empty()) throw ConfigError("obs_times is empty");
    for (size_t i = 0; i < obs_times.size(); ++i) {
        if (obs_times[i] < 0.0 || obs_times[i] > t_final)
            throw ConfigError("observation times must lie in [0, t_final]");
        if (i > 0 && obs_times[i] < obs_times[i - 1])
            throw ConfigError("observation times must be sorted");
    }
    if (override_bg && n_override < 1)
        throw ConfigError("override_bg requires n_override >= 1");
    if (static_cast<int>(bins.size()) > dim) throw ConfigError("more bin axes than dimensions");
    make_bins().validate();
    if (bootstrap_rounds < 200) throw ConfigError("bootstrap must be >= 200 resamples");
}

Perturbation ExperimentConfig::make_rho() const {
    if (rho_name == "constant") return Perturbation::constant();
    return Perturbation::cosine(rho_amplitude, rho_axis);
}

BinSpec ExperimentConfig::make_bins() const {
    BinSpec spec;
    spec.dim = dim;
    spec.nx = {1, 1, 1};
    for (size_t k = 0; k < bins.size(); ++k) spec.nx[k] = bins[k];
    spec.nv = vbins;
    spec.vmax = vmax;
    return spec;
}

int ExperimentConfig::particles_for(double eps) const {
    if (override_bg) return n_override;
    return static_cast<int>(std::lround(std::pow(eps, -(dim - 1))));
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> m;
    m["d"] = std::to_string(dim);
    m["beta"] = format_real(beta);
    m["rho"] = rho_name;
    m["rho_amplitude"] = format_real(rho_amplitude);
    m["rho_axis"] = std::to_string(rho_axis);
    m["t_final"] = format_real(t_final);
    m["obs_times"] = join<double>(obs_times, ",", format_real);
    m["eps"] = join<double>(eps_list, ",", format_real);
    m["override_bg"] = override_bg ? "1" : "0";
    m["n_override"] = std::to_string(n_override);
    m["replicas"] = std::to_string(replicas);
    m["paths"] = std::to_string(solver_paths);
    m["bins"] = join<int>(bins, ",", +[](int x) { return std::to_string(x); });
    m["vbins"] = std::to_string(vbins);
    m["vmax"] = format_real(vmax);
    m["seed"] = std::to_string(master_seed);
    m["out"] = out_dir;
    m["threads"] = std::to_string(threads);
    m["bootstrap"] = std::to_string(bootstrap_rounds);
    m["rate_fit_alpha"] = format_real(rate_fit_alpha);
    return m;
}

}  // namespace rgas
