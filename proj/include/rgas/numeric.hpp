#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rgas {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Compensated (Kahan) accumulator.
class KahanSum {
public:
    void add(double x) {
        double y = x - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// log(sum exp(a_i)) without overflow; -inf entries are ignored.
inline double log_sum_exp(const std::vector<double>& a) {
    double m = -kInf;
    for (double x : a) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    KahanSum s;
    for (double x : a) s.add(std::exp(x - m));
    return m + std::log(s.value());
}

/// log of the finite geometric sum 1 + x + ... + x^{n-1}, x >= 0.
/// n may be astronomically large (closed form, never a truncated loop).
inline double log_geom_sum(double x, double n_terms) {
    if (x <= 0.0) return 0.0;
    if (x == 1.0) return std::log(n_terms);
    double log_xn = n_terms * std::log(x);  // exponent of x^n
    if (x < 1.0) {
        double xn = log_xn < -745.0 ? 0.0 : std::exp(log_xn);  // graceful underflow
        return std::log1p(-xn) - std::log1p(-x);
    }
    // (x^n - 1)/(x - 1) for x > 1
    double xmn = -log_xn < -745.0 ? 0.0 : std::exp(-log_xn);
    return log_xn + std::log1p(-xmn) - std::log(x - 1.0);
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double h = b - a;
    double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson rule on [a,b] with absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// ---------------------------------------------------------------------------
// Incomplete gamma / chi-square tail
// ---------------------------------------------------------------------------

namespace detail {
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}
}  // namespace detail

/// Regularized upper incomplete gamma Q(a,x).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Upper-tail p-value of a chi-square statistic.
inline double chi_square_pvalue(double chi2, int dof) {
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

// ---------------------------------------------------------------------------
// Chebyshev interpolation on [a,b]
// ---------------------------------------------------------------------------

/// Chebyshev fit of a smooth function; evaluation by Clenshaw recurrence.
class ChebyshevFit {
public:
    ChebyshevFit() = default;

    ChebyshevFit(const std::function<double(double)>& f, double a, double b, int n)
        : a_(a), b_(b), coef_(n) {
        std::vector<double> fv(n);
        for (int k = 0; k < n; ++k) {
            double theta = std::numbers::pi * (k + 0.5) / n;
            double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
            fv[k] = f(x);
        }
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += fv[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
            coef_[j] = 2.0 * s / n;
        }
    }

    double operator()(double x) const {
        double u = (2.0 * x - a_ - b_) / (b_ - a_);
        double d = 0.0, dd = 0.0;
        for (int j = static_cast<int>(coef_.size()) - 1; j >= 1; --j) {
            double sv = d;
            d = 2.0 * u * d - dd + coef_[j];
            dd = sv;
        }
        return u * d - dd + 0.5 * coef_[0];
    }

    bool empty() const { return coef_.empty(); }
    double lo() const { return a_; }
    double hi() const { return b_; }

private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<double> coef_;
};

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double sphere_area(int dim) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace rgas
