#pragma once

#include <string>
#include <vector>

#include "rgas/params.hpp"
#include "rgas/rng.hpp"

namespace rgas {

/// Parameters of the backward time cutting. C stands in for the unnamed
/// analysis constants (the bounds are audited over ranges of C, never pinned
/// to a guessed value); c is the constant of the feasibility requirement
/// t <= c K^{1/2 - alpha}.
struct PruningParams {
    int K = 8;
    double alpha = 0.25;
    double t = 1.0;
    double C = 1.0;
    double c = 0.18393972058572117;  // 1/(2e)

    void validate() const {
        if (K < 1) throw ConfigError("pruning: K must be >= 1");
        if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("pruning: alpha must lie in (0, 1/2)");
        if (!(t > 0.0)) throw ConfigError("pruning: t must be positive");
        if (!(C > 0.0)) throw ConfigError("pruning: C must be positive");
    }
};

/// One unrescaled cutting time, exp(-2^{K - K^{1-alpha} - i}) / (2 C sqrt(K)).
/// For small i the double exponent drives the value below the smallest
/// double; the log stays finite and the underflow is flagged.
struct Cut {
    double value = 0.0;
    double log_value = 0.0;
    bool underflowed = false;
};

Cut raw_cut(int i, int K, double alpha, double C);

/// Cutting times h_1..h_K indexed backward from the horizon (h_1 adjacent to
/// t), rescaled so they sum to t exactly.
struct Schedule {
    int K = 0;
    double t = 0.0;
    std::vector<double> h;        // h[i-1] = h_i
    std::vector<double> log_h;    // finite even where h underflows
    std::vector<double> tp;       // tp[k-1] = t - sum_{j<=k} h_j; tp[K-1] = 0
    double raw_sum = 0.0;            // sum of the unrescaled cuts
    bool raw_feasible = false;       // raw_sum >= t (rescaling shrinks each cut)
    bool scaling_feasible = false;   // t <= c K^{1/2-alpha}, the sufficient condition
    bool any_underflow = false;
};

/// Thrown when the unrescaled cuts cannot cover [0, t].
struct InfeasibleSchedule : ConfigError {
    double max_feasible_t;
    explicit InfeasibleSchedule(double mft)
        : ConfigError("schedule infeasible: raw cuts sum to " + std::to_string(mft) +
                      " < t; reduce t or increase K"),
          max_feasible_t(mft) {}
};

/// Rescaled schedule; throws InfeasibleSchedule when raw_sum < t.
Schedule build_schedule(const PruningParams& p);

/// Same construction without the feasibility gate (audits evaluate the bound
/// chain on infeasible tuples too, reporting them as such).
Schedule build_schedule_unchecked(const PruningParams& p);

/// Fixed-horizon variant: unrescaled cuts exp(-2^{K-i}) / (2 C sqrt(K)).
/// Covers only a vanishing fraction of [0, t]; audited against exp(-2^K).
Schedule remark_schedule(int K, double C, double t);

/// Outcome of the pruned-tail bound audit for one parameter tuple.
struct BoundReport {
    PruningParams params;
    bool feasible = false;      // raw cuts cover t
    bool precond_ok = false;    // sqrt(k) C h_k <= 1/2 and C h_k < 1 for all k
    int failing_k = 0;          // first k violating the precondition (0 = none)
    double lhs_log = 0.0;       // log of the remainder chain value
    double rhs_log = 0.0;       // log of exp(-2^{K - K^{1-alpha}})
    bool holds = false;         // lhs <= rhs
    double margin_log = 0.0;    // rhs_log - lhs_log
};

/// Evaluate the remainder chain
///   sum_k C^{2^{k+1}} prod_i [sum_{j<2^i} (sqrt(k) C h_i)^j] (C h_k)^{2^k} / (1 - C h_k)
/// in log space (terms span hundreds of orders of magnitude) and compare it
/// against exp(-2^{K - K^{1-alpha}}). Geometric tails are closed forms.
BoundReport remainder_chain(const PruningParams& p);

/// Chain evaluation on a caller-supplied schedule and right-hand side.
BoundReport remainder_chain(const PruningParams& p, const Schedule& s, double rhs_log);

/// Audit of the fixed-horizon variant against exp(-2^K).
struct RemarkReport {
    int K = 0;
    double C = 0.0, t = 0.0;
    double sum_h = 0.0;  // total length of the unrescaled cuts
    bool fits = false;   // sum_h <= t
    double lhs_log = 0.0, rhs_log = 0.0;
    bool holds = false;
};

RemarkReport remark_chain(int K, double C, double t);

/// Gaussian moment integral check: quadrature of
///   int_{R^d} (|v| + u) exp(-lambda |v|^2 / 2) dv
/// against its Gamma-function closed form c_d lambda^{-(d+1)/2} + u c~_d lambda^{-d/2}.
struct MomentIdentity {
    double lhs = 0.0;       // quadrature value
    double rhs = 0.0;       // closed form
    double c_d = 0.0;       // speed-moment constant
    double c_tilde_d = 0.0; // mass constant (2 pi)^{d/2}
    double rel_err = 0.0;
    bool ok = false;        // rel_err <= 1e-8
};

MomentIdentity gaussian_moment_identity(double lambda, int dim, double v_norm);

/// Supremum of (sum_i r_i) exp(-lambda sum_i r_i^2 / (2 b s)) over m = n+s-1
/// magnitudes, against the bound (n+s) sqrt(b/(lambda e)). The maximum sits
/// at equal magnitudes; a random multi-start ascent confirms the reduction.
struct SupBound {
    double sup = 0.0;         // analytic value sqrt(m b s / (lambda e))
    double search_sup = 0.0;  // best value found by multi-start ascent
    double bound = 0.0;
    bool holds = false;
};

SupBound cauchy_schwarz_bound(int n, int s, double b, double lambda, Philox* rng = nullptr);

/// Cut-count scaling K = floor(log2(2 c_beta |log eps|)) with the companion
/// convergence-rate bound exp(-c_beta |log eps|^{1-alpha}).
struct KChoice {
    int K = 0;
    double argument = 0.0;  // 2 c_beta |log eps|
};

KChoice choose_K(double eps, double c_beta);
double convergence_rate_bound(double eps, double c_beta, double alpha);

}  // namespace rgas
