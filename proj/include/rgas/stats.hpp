#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rgas/numeric.hpp"
#include "rgas/params.hpp"

namespace rgas {

/// Streaming mean/variance.
class Welford {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
    double se_of_mean() const { return n_ > 1 ? std::sqrt(variance() / n_) : 0.0; }

private:
    uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Pearson chi-square p-value of observed counts against expected cell
/// probabilities (no fitted parameters; dof = cells - 1).
inline double chi_square_counts_pvalue(std::span<const uint64_t> counts,
                                       std::span<const double> expected_prob) {
    if (counts.size() != expected_prob.size() || counts.size() < 2)
        throw ConfigError("chi-square: need matching cell counts and probabilities");
    uint64_t n = 0;
    for (uint64_t c : counts) n += c;
    if (n == 0) throw ConfigError("chi-square: empty sample");
    double chi2 = 0.0;
    for (size_t b = 0; b < counts.size(); ++b) {
        double e = n * expected_prob[b];
        if (e <= 0.0) throw ConfigError("chi-square: zero expected count");
        double d = counts[b] - e;
        chi2 += d * d / e;
    }
    return chi_square_pvalue(chi2, static_cast<int>(counts.size()) - 1);
}

/// Chi-square against the uniform law on n_cells cells, from raw cell labels.
inline double chi_square_uniform_pvalue(std::span<const uint32_t> cells, int n_cells) {
    std::vector<uint64_t> counts(n_cells, 0);
    for (uint32_t c : cells) ++counts[c];
    std::vector<double> probs(n_cells, 1.0 / n_cells);
    return chi_square_counts_pvalue(counts, probs);
}

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw ConfigError("correlation: bad sample sizes");
    double ma = 0, mb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Gaussian cell probabilities for velocity-component bins on [-vmax, vmax]
/// with open tails folded into the edge cells (matches BinSpec clamping).
inline std::vector<double> gaussian_bin_probs(int n_bins, double vmax, double beta) {
    std::vector<double> p(n_bins);
    double sigma = 1.0 / std::sqrt(beta);
    auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); };
    for (int b = 0; b < n_bins; ++b) {
        double lo = -vmax + b * (2.0 * vmax / n_bins);
        double hi = lo + 2.0 * vmax / n_bins;
        double mass = cdf(hi) - cdf(lo);
        if (b == 0) mass += cdf(lo);              // left tail clamps in
        if (b == n_bins - 1) mass += 1.0 - cdf(hi);  // right tail clamps in
        p[b] = mass;
    }
    return p;
}

}  // namespace rgas
