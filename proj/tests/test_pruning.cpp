#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rgas/numeric.hpp"
#include "rgas/pruning.hpp"
#include "rgas/rng.hpp"

using namespace rgas;

namespace {

PruningParams params(int K, double alpha, double t = 1.0, double C = 1.0) {
    PruningParams p;
    p.K = K;
    p.alpha = alpha;
    p.t = t;
    p.C = C;
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// log-space helpers
// ---------------------------------------------------------------------------

TEST_CASE("log_geom_sum matches naive summation on both sides of x=1") {
    for (double x : {0.0, 0.2, 0.5, 0.99, 1.0, 1.01, 1.7}) {
        for (int n : {1, 2, 5, 31}) {
            long double naive = 0.0L, pw = 1.0L;
            for (int j = 0; j < n; ++j) {
                naive += pw;
                pw *= x;
            }
            CHECK(log_geom_sum(x, n) ==
                  doctest::Approx(std::log(static_cast<double>(naive))).epsilon(1e-12));
        }
    }
    // astronomically long sums stay finite in log space
    CHECK(log_geom_sum(0.5, std::exp2(40.0)) == doctest::Approx(std::log(2.0)));
    double huge = log_geom_sum(1.5, std::exp2(40.0));
    CHECK(huge == doctest::Approx(std::exp2(40.0) * std::log(1.5)).epsilon(1e-10));
}

// ---------------------------------------------------------------------------
// raw_cut
// ---------------------------------------------------------------------------

TEST_CASE("raw cut: integer-exponent case evaluates in closed form") {
    // K = 16, alpha = 0.25 makes K^{1-alpha} = 8 exactly, so the last cut is
    // exp(-2^-8) / (2 sqrt(16)).
    Cut c = raw_cut(16, 16, 0.25, 1.0);
    CHECK(c.value == doctest::Approx(std::exp(-std::exp2(-8.0)) / 8.0).epsilon(1e-15));
    CHECK(c.value == doctest::Approx(0.1245126711837646862579).epsilon(1e-15));
    CHECK_FALSE(c.underflowed);
}

TEST_CASE("raw cut: 40-digit reference value at K=9, alpha=0.25, i=9") {
    Cut c = raw_cut(9, 9, 0.25, 1.0);
    CHECK(c.value == doctest::Approx(0.1621818853626885497137).epsilon(1e-15));
}

TEST_CASE("raw cut: strictly increasing in the index (K=12, alpha=0.3)") {
    double prev = -1.0;
    for (int i = 1; i <= 12; ++i) {
        Cut c = raw_cut(i, 12, 0.3, 1.0);
        CHECK(c.value > prev);
        prev = c.value;
    }
}

TEST_CASE("raw cut: early cuts underflow gracefully with the flag set") {
    Cut tiny = raw_cut(1, 40, 0.25, 1.0);
    CHECK(tiny.value == 0.0);
    CHECK(tiny.underflowed);
    CHECK(std::isfinite(tiny.log_value));  // about -2^23, representable as a log
    CHECK(tiny.log_value < -1e6);

    Cut beyond = raw_cut(1, 2000, 0.49, 1.0);
    CHECK(beyond.value == 0.0);
    CHECK(beyond.underflowed);
    CHECK(beyond.log_value == -kInf);  // even the log exponent overflows

    CHECK_THROWS_AS((void)raw_cut(0, 9, 0.25, 1.0), ConfigError);
}

// ---------------------------------------------------------------------------
// build_schedule
// ---------------------------------------------------------------------------

TEST_CASE("schedule: cuts sum to t exactly and shrink under rescaling") {
    PruningParams p = params(16, 0.1);
    Schedule s = build_schedule(p);
    CHECK(s.raw_feasible);
    KahanSum sum;
    for (double h : s.h) sum.add(h);
    CHECK(std::abs(sum.value() - p.t) <= 1e-12 * p.t);
    CHECK(std::abs(s.tp.back()) <= 1e-15);
    for (int i = 0; i < p.K; ++i) {
        Cut c = raw_cut(i + 1, p.K, p.alpha, p.C);
        CHECK(s.h[i] <= c.value * (1 + 1e-12));  // rescale factor <= 1 when feasible
    }
    for (int i = 1; i < p.K; ++i) CHECK(s.h[i] > s.h[i - 1]);
}

TEST_CASE("schedule: infeasible horizon reports the maximal coverable t") {
    // K = 16, alpha = 0.25 covers only ~0.96 of a unit horizon
    PruningParams p = params(16, 0.25);
    bool threw = false;
    try {
        (void)build_schedule(p);
    } catch (const InfeasibleSchedule& e) {
        threw = true;
        CHECK(e.max_feasible_t > 0.9);
        CHECK(e.max_feasible_t < 1.0);
    }
    CHECK(threw);

    Schedule s = build_schedule_unchecked(p);
    CHECK_FALSE(s.raw_feasible);
    KahanSum sum;
    for (double h : s.h) sum.add(h);
    CHECK(std::abs(sum.value() - p.t) <= 1e-12 * p.t);  // rescaling still lands on t
}

TEST_CASE("schedule: the trailing-cut lower bound from the construction") {
    // sum_{j=0}^{floor(K^{1-a})} h~_{K-j} >= (floor(K^{1-a})+1) e^{-1} / (2 C sqrt(K))
    for (int K = 8; K <= 20; ++K)
        for (double alpha : {0.1, 0.25, 0.4}) {
            int m = static_cast<int>(std::floor(std::pow(K, 1.0 - alpha)));
            double sum = 0.0;
            for (int j = 0; j <= m && j <= K - 1; ++j) sum += raw_cut(K - j, K, alpha, 1.0).value;
            double lower = (m + 1) * std::exp(-1.0) / (2.0 * std::sqrt(static_cast<double>(K)));
            CHECK(sum >= lower * (1 - 1e-12));
        }
}

TEST_CASE("schedule: maximal feasible horizon is nondecreasing in K") {
    double prev = 0.0;
    for (int K = 6; K <= 18; ++K) {
        Schedule s = build_schedule_unchecked(params(K, 0.25, 10.0));  // t irrelevant here
        CHECK(s.raw_sum >= prev * (1 - 1e-12));
        prev = s.raw_sum;
    }
}

TEST_CASE("schedule: deep cuts underflow but bookkeeping stays consistent") {
    PruningParams p = params(40, 0.25, 0.5);
    Schedule s = build_schedule(p);
    CHECK(s.any_underflow);
    CHECK(s.h.front() == 0.0);
    CHECK(std::isfinite(s.log_h.front()));
    KahanSum sum;
    for (double h : s.h) sum.add(h);
    CHECK(std::abs(sum.value() - p.t) <= 1e-12 * p.t);
}

// ---------------------------------------------------------------------------
// remainder_chain
// ---------------------------------------------------------------------------

TEST_CASE("remainder chain: K=10, alpha=0.25, C=1, t=1 satisfies the bound") {
    BoundReport rep = remainder_chain(params(10, 0.25));
    CHECK(rep.holds);
    CHECK_FALSE(rep.feasible);  // raw cuts cover < 1, the audit reports that
    CHECK_FALSE(rep.precond_ok);
    CHECK(rep.failing_k >= 9);  // sqrt(k) C h_k creeps above 1/2 for the last cuts
    CHECK(rep.lhs_log < rep.rhs_log);
}

TEST_CASE("remainder chain: feasible tuples hold with room (K=7..14, alpha=0.1)") {
    for (int K = 7; K <= 14; ++K) {
        BoundReport rep = remainder_chain(params(K, 0.1));
        CHECK(rep.feasible);
        CHECK(rep.precond_ok);
        CHECK(rep.holds);
    }
}

TEST_CASE("remainder chain: K=1 against a naive partial-sum oracle") {
    const double t = 0.01, C = 1.0;
    BoundReport rep = remainder_chain(params(1, 0.25, t, C));
    // S = C^4 (1 + C t) (C t)^2 / (1 - C t), summed termwise to depth 100
    long double tail = 0.0L;
    for (int s = 2; s <= 100; ++s) tail += std::pow(static_cast<long double>(C * t), s);
    long double naive = std::pow(C, 4.0L) * (1.0L + C * t) * tail;
    CHECK(std::exp(rep.lhs_log) ==
          doctest::Approx(static_cast<double>(naive)).epsilon(1e-12));
}

TEST_CASE("remainder chain: rhs tends to e^{-1} as alpha -> 0") {
    BoundReport rep = remainder_chain(params(7, 1e-9));
    CHECK(rep.rhs_log == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("remainder chain: rhs decays doubly exponentially in K") {
    for (double alpha : {0.1, 0.25, 0.4}) {
        double prev_gap = 0.0;
        for (int K = 5; K <= 14; ++K) {
            double rhs_log = remainder_chain(params(K, alpha)).rhs_log;
            double rhs_log_next = remainder_chain(params(K + 1, alpha)).rhs_log;
            double gap = rhs_log_next - rhs_log;  // log of the successive ratio
            if (K >= 6) CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }
}

TEST_CASE("remainder chain: a divergent tail is reported, not clipped") {
    // C large enough that C h_K >= 1: the geometric tail cannot be summed
    BoundReport rep = remainder_chain(params(8, 0.1, 8.0, 12.0));
    CHECK_FALSE(rep.precond_ok);
    CHECK(rep.failing_k >= 1);
    CHECK_FALSE(rep.holds);
    CHECK(rep.lhs_log == kInf);
}

// ---------------------------------------------------------------------------
// fixed-horizon variant
// ---------------------------------------------------------------------------

TEST_CASE("fixed-horizon cutting beats exp(-2^K) for K = 8..14") {
    for (int K = 8; K <= 14; ++K) {
        RemarkReport rep = remark_chain(K, 1.0, 1.0);
        CHECK(rep.fits);  // unrescaled cuts occupy a fraction of [0, t]
        CHECK(rep.sum_h < 1.0);
        CHECK(rep.rhs_log == doctest::Approx(-std::exp2(K)));
        CHECK(rep.holds);
    }
}

// ---------------------------------------------------------------------------
// scalar inequalities
// ---------------------------------------------------------------------------

TEST_CASE("gaussian moment: planar zero-velocity case has the closed value 2 pi sqrt(pi/2)") {
    MomentIdentity m = gaussian_moment_identity(1.0, 2, 0.0);
    CHECK(m.lhs == doctest::Approx(7.874804972861209872).epsilon(1e-10));
    CHECK(m.ok);
}

TEST_CASE("gaussian moment: quadrature equals the Gamma closed form on the grid") {
    for (double lambda : {0.5, 1.0, 2.0, 4.0})
        for (int d : {2, 3})
            for (double u : {0.0, 1.0, 5.0}) {
                MomentIdentity m = gaussian_moment_identity(lambda, d, u);
                CHECK(m.ok);
                CHECK(m.rel_err <= 1e-8);
            }
}

TEST_CASE("gaussian moment: dilation scaling lambda^{-(d+1)/2} at zero velocity") {
    double base = gaussian_moment_identity(1.0, 2, 0.0).lhs;
    for (double lambda : {0.5, 2.0, 4.0}) {
        MomentIdentity m = gaussian_moment_identity(lambda, 2, 0.0);
        CHECK(m.lhs / base == doctest::Approx(std::pow(lambda, -1.5)).epsilon(1e-8));
    }
}

TEST_CASE("velocity-sum bound: single-magnitude case has slack factor two") {
    Philox rng(60, 0);
    SupBound sb = cauchy_schwarz_bound(1, 1, 4.0, 1.5, &rng);
    double expect = std::sqrt(4.0 / (1.5 * std::numbers::e));
    CHECK(sb.sup == doctest::Approx(expect).epsilon(1e-12));
    CHECK(sb.bound == doctest::Approx(2.0 * expect).epsilon(1e-12));
    CHECK(sb.holds);
    CHECK(sb.search_sup <= sb.sup * (1 + 1e-9));
    CHECK(sb.search_sup >= sb.sup * (1 - 1e-6));  // the ascent finds the analytic maximum
}

TEST_CASE("velocity-sum bound: sup scales as lambda^{-1/2}") {
    SupBound a = cauchy_schwarz_bound(2, 3, 2.0, 1.0);
    SupBound b = cauchy_schwarz_bound(2, 3, 2.0, 4.0);
    CHECK(b.sup == doctest::Approx(0.5 * a.sup).epsilon(1e-12));
}

TEST_CASE("velocity-sum bound: holds on 1000 random parameter draws") {
    Philox rng(61, 0);
    for (int it = 0; it < 1000; ++it) {
        int n = 1 + static_cast<int>(rng.below(6));
        int s = 1 + static_cast<int>(rng.below(6));
        double b = 2.0 + 8.0 * rng.uniform();
        double lambda = 0.2 + 4.8 * rng.uniform();
        SupBound sb = cauchy_schwarz_bound(n, s, b, lambda, it % 10 == 0 ? &rng : nullptr);
        CHECK(sb.holds);
    }
    CHECK_THROWS_AS((void)cauchy_schwarz_bound(1, 1, 1.5, 1.0), ConfigError);  // b < 2
}

// ---------------------------------------------------------------------------
// cut-count selection
// ---------------------------------------------------------------------------

TEST_CASE("cut count: K=3 at eps = e^-100 with c_beta = 0.05") {
    KChoice k = choose_K(std::exp(-100.0), 0.05);
    CHECK(k.K == 3);
    CHECK(k.argument == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(convergence_rate_bound(std::exp(-100.0), 0.05, 0.25) ==
          doctest::Approx(std::exp(-0.05 * std::pow(100.0, 0.75))).epsilon(1e-12));
}

TEST_CASE("cut count: argument at the domain boundary is rejected") {
    CHECK_THROWS_AS((void)choose_K(std::exp(-10.0), 0.05), ConfigError);
}

TEST_CASE("cut count: squaring eps advances K by exactly one") {
    for (double L : {30.0, 47.0, 80.0, 133.0, 250.0}) {
        int k1 = choose_K(std::exp(-L), 0.05).K;
        int k2 = choose_K(std::exp(-2.0 * L), 0.05).K;
        CHECK(k2 - k1 >= 0);
        CHECK(k2 - k1 <= 1);
    }
}
