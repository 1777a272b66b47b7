#include "rgas/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rgas/numeric.hpp"

namespace rgas {

namespace {

// log of exp(-2^e): -2^e, or -inf once 2^e overflows the double range.
double neg_pow2_log(double e) {
    if (e > 1020.0) return -kInf;
    return -std::exp2(e);
}

Schedule schedule_from_logs(int K, double t, const std::vector<double>& log_raw,
                            const std::vector<bool>& underflow) {
    Schedule s;
    s.K = K;
    s.t = t;
    KahanSum raw;
    for (double lv : log_raw) raw.add(lv == -kInf ? 0.0 : std::exp(lv));
    s.raw_sum = raw.value();
    s.raw_feasible = s.raw_sum >= t;
    double log_scale = std::log(t) - std::log(s.raw_sum);
    s.h.resize(K);
    s.log_h.resize(K);
    for (int i = 0; i < K; ++i) {
        s.log_h[i] = log_raw[i] + log_scale;
        s.h[i] = s.log_h[i] == -kInf ? 0.0 : std::exp(s.log_h[i]);
        s.any_underflow = s.any_underflow || underflow[i];
    }
    // backward cumulative: tp[k-1] = sum of the cuts past index k; exact 0 at K
    s.tp.assign(K, 0.0);
    KahanSum tail;
    for (int k = K - 1; k >= 0; --k) {
        s.tp[k] = tail.value();
        tail.add(s.h[k]);
    }
    return s;
}

}  // namespace

Cut raw_cut(int i, int K, double alpha, double C) {
    if (i < 1 || i > K) throw ConfigError("raw_cut: index out of range");
    double e = K - std::pow(K, 1.0 - alpha) - i;
    Cut cut;
    cut.log_value = neg_pow2_log(e) - std::log(2.0 * C * std::sqrt(static_cast<double>(K)));
    cut.value = cut.log_value == -kInf ? 0.0 : std::exp(cut.log_value);
    cut.underflowed = cut.value == 0.0;
    return cut;
}

Schedule build_schedule_unchecked(const PruningParams& p) {
    p.validate();
    std::vector<double> log_raw(p.K);
    std::vector<bool> under(p.K);
    for (int i = 1; i <= p.K; ++i) {
        Cut c = raw_cut(i, p.K, p.alpha, p.C);
        log_raw[i - 1] = c.log_value;
        under[i - 1] = c.underflowed;
    }
    Schedule s = schedule_from_logs(p.K, p.t, log_raw, under);
    s.scaling_feasible = p.t <= p.c * std::pow(static_cast<double>(p.K), 0.5 - p.alpha);
    return s;
}

Schedule build_schedule(const PruningParams& p) {
    Schedule s = build_schedule_unchecked(p);
    if (!s.raw_feasible) throw InfeasibleSchedule(s.raw_sum);
    return s;
}

Schedule remark_schedule(int K, double C, double t) {
    if (K < 1 || !(C > 0.0) || !(t > 0.0)) throw ConfigError("remark_schedule: bad parameters");
    Schedule s;
    s.K = K;
    s.t = t;
    s.h.resize(K);
    s.log_h.resize(K);
    double log_norm = std::log(2.0 * C * std::sqrt(static_cast<double>(K)));
    KahanSum sum;
    for (int i = 1; i <= K; ++i) {
        s.log_h[i - 1] = neg_pow2_log(static_cast<double>(K - i)) - log_norm;
        s.h[i - 1] = s.log_h[i - 1] == -kInf ? 0.0 : std::exp(s.log_h[i - 1]);
        s.any_underflow = s.any_underflow || (s.h[i - 1] == 0.0);
        sum.add(s.h[i - 1]);
    }
    s.raw_sum = sum.value();
    s.raw_feasible = s.raw_sum <= t;  // unrescaled cuts must fit inside [0, t]
    s.tp.assign(K, 0.0);
    return s;
}

BoundReport remainder_chain(const PruningParams& p, const Schedule& s, double rhs_log) {
    BoundReport rep;
    rep.params = p;
    rep.feasible = s.raw_feasible;
    rep.rhs_log = rhs_log;

    rep.precond_ok = true;
    for (int k = 1; k <= p.K; ++k) {
        double hk = s.h[k - 1];
        if (std::sqrt(static_cast<double>(k)) * p.C * hk > 0.5 || p.C * hk >= 1.0) {
            rep.precond_ok = false;
            rep.failing_k = k;
            break;
        }
    }

    const double logC = std::log(p.C);
    std::vector<double> term_logs;
    term_logs.reserve(p.K);
    bool divergent = false;
    for (int k = 1; k <= p.K; ++k) {
        double chk = p.C * s.h[k - 1];
        if (chk >= 1.0) {  // geometric tail no longer sums
            divergent = true;
            break;
        }
        double two_k = std::exp2(static_cast<double>(k));
        double term = 2.0 * two_k * logC;  // C^{2^{k+1}}
        double sqrt_k = std::sqrt(static_cast<double>(k));
        for (int i = 1; i <= k; ++i)
            term += log_geom_sum(sqrt_k * p.C * s.h[i - 1], std::exp2(static_cast<double>(i)));
        double log_chk = logC + s.log_h[k - 1];
        term += two_k * log_chk - std::log1p(-chk);
        term_logs.push_back(term);
    }
    rep.lhs_log = divergent ? kInf : log_sum_exp(term_logs);
    rep.holds = rep.lhs_log <= rep.rhs_log;
    rep.margin_log = rep.rhs_log - rep.lhs_log;
    return rep;
}

BoundReport remainder_chain(const PruningParams& p) {
    Schedule s = build_schedule_unchecked(p);
    double rhs_log = neg_pow2_log(p.K - std::pow(static_cast<double>(p.K), 1.0 - p.alpha));
    return remainder_chain(p, s, rhs_log);
}

RemarkReport remark_chain(int K, double C, double t) {
    Schedule s = remark_schedule(K, C, t);
    PruningParams p;
    p.K = K;
    p.alpha = 0.25;  // unused by the chain itself
    p.t = t;
    p.C = C;
    BoundReport rep = remainder_chain(p, s, neg_pow2_log(static_cast<double>(K)));
    RemarkReport out;
    out.K = K;
    out.C = C;
    out.t = t;
    out.sum_h = s.raw_sum;
    out.fits = s.raw_feasible;
    out.lhs_log = rep.lhs_log;
    out.rhs_log = rep.rhs_log;
    out.holds = rep.holds;
    return out;
}

MomentIdentity gaussian_moment_identity(double lambda, int dim, double v_norm) {
    if (!(lambda > 0.0)) throw ConfigError("gaussian_moment_identity: lambda must be positive");
    if (dim != 2 && dim != 3) throw ConfigError("gaussian_moment_identity: dim must be 2 or 3");
    if (v_norm < 0.0) throw ConfigError("gaussian_moment_identity: |v| must be nonnegative");

    MomentIdentity m;
    double area = sphere_area(dim);
    m.c_d = area * std::exp2(0.5 * (dim - 1)) * std::tgamma(0.5 * (dim + 1));
    m.c_tilde_d = std::pow(2.0 * std::numbers::pi, 0.5 * dim);
    m.rhs = m.c_d * std::pow(lambda, -0.5 * (dim + 1)) +
            v_norm * m.c_tilde_d * std::pow(lambda, -0.5 * dim);

    double r_hi = std::sqrt(180.0 / lambda);
    m.lhs = area * integrate(
                       [&](double r) {
                           return (r + v_norm) * std::pow(r, dim - 1) *
                                  std::exp(-0.5 * lambda * r * r);
                       },
                       0.0, r_hi, 1e-13 * m.rhs);
    if (!std::isfinite(m.lhs)) throw InvariantError("gaussian moment quadrature did not converge");
    m.rel_err = std::abs(m.lhs - m.rhs) / m.rhs;
    m.ok = m.rel_err <= 1e-8;
    return m;
}

SupBound cauchy_schwarz_bound(int n, int s, double b, double lambda, Philox* rng) {
    if (n < 1 || s < 1) throw ConfigError("cauchy_schwarz_bound: n, s must be >= 1");
    if (!(b >= 2.0)) throw ConfigError("cauchy_schwarz_bound: b must be >= 2");
    if (!(lambda > 0.0)) throw ConfigError("cauchy_schwarz_bound: lambda must be positive");

    const int m = n + s - 1;
    const double c = lambda / (2.0 * b * s);
    SupBound out;
    out.sup = std::sqrt(static_cast<double>(m) * b * s / (lambda * std::numbers::e));
    out.bound = (n + s) * std::sqrt(b / (lambda * std::numbers::e));

    if (rng != nullptr) {
        auto value = [&](const std::vector<double>& r) {
            double sum = 0.0, sq = 0.0;
            for (double x : r) {
                sum += x;
                sq += x * x;
            }
            return sum * std::exp(-c * sq);
        };
        double r_star = 1.0 / std::sqrt(2.0 * c * m);
        std::vector<double> r(m), grad(m);
        for (int start = 0; start < 8; ++start) {
            for (auto& x : r) x = rng->uniform(0.0, 3.0 * r_star);
            double f = value(r);
            double step = 0.5 * r_star;
            for (int it = 0; it < 200; ++it) {
                double sum = 0.0, sq = 0.0;
                for (double x : r) {
                    sum += x;
                    sq += x * x;
                }
                double e = std::exp(-c * sq);
                for (int i = 0; i < m; ++i) grad[i] = e * (1.0 - 2.0 * c * r[i] * sum);
                std::vector<double> trial(m);
                for (int i = 0; i < m; ++i) trial[i] = std::max(0.0, r[i] + step * grad[i]);
                double ft = value(trial);
                if (ft > f) {
                    r = trial;
                    f = ft;
                } else {
                    step *= 0.5;
                    if (step < 1e-12 * r_star) break;
                }
            }
            out.search_sup = std::max(out.search_sup, f);
        }
    }
    out.holds = std::max(out.sup, out.search_sup) <= out.bound * (1.0 + 1e-12);
    return out;
}

KChoice choose_K(double eps, double c_beta) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("choose_K: eps must lie in (0,1)");
    if (!(c_beta > 0.0)) throw ConfigError("choose_K: c_beta must be positive");
    KChoice k;
    k.argument = 2.0 * c_beta * std::abs(std::log(eps));
    if (k.argument <= 1.0)
        throw ConfigError("choose_K: 2 c_beta |log eps| = " + std::to_string(k.argument) +
                          " <= 1; need |log eps| > " + std::to_string(1.0 / (2.0 * c_beta)));
    k.K = static_cast<int>(std::floor(std::log2(k.argument)));
    return k;
}

double convergence_rate_bound(double eps, double c_beta, double alpha) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("rate bound: eps must lie in (0,1)");
    return std::exp(-c_beta * std::pow(std::abs(std::log(eps)), 1.0 - alpha));
}

}  // namespace rgas
