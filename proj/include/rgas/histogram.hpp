#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgas/gas.hpp"
#include "rgas/params.hpp"
#include "rgas/rng.hpp"
#include "rgas/vec.hpp"

namespace rgas {

/// Phase-space binning: a product grid over the torus, optionally extended by
/// coarse velocity bins per component on [-vmax, vmax] (outliers clamp to the
/// edge bins).
struct BinSpec {
    int dim = 2;
    std::array<int, 3> nx{16, 1, 1};
    int nv = 0;
    double vmax = 0.0;

    int spatial_cells() const {
        int c = 1;
        for (int k = 0; k < dim; ++k) c *= nx[k];
        return c;
    }
    int velocity_cells() const {
        if (nv <= 0) return 1;
        int c = 1;
        for (int k = 0; k < dim; ++k) c *= nv;
        return c;
    }
    int total_cells() const { return spatial_cells() * velocity_cells(); }
    double spatial_cell_volume() const { return 1.0 / spatial_cells(); }

    int cell_of(const PhasePoint& z) const;
    /// Midpoints of the spatial (and velocity) intervals of a flat cell index.
    std::vector<double> cell_centers(int cell) const;

    void validate() const;
    bool operator==(const BinSpec&) const = default;
};

/// Normalized binned estimate with per-bin binomial standard errors.
struct Histogram {
    BinSpec spec;
    double time = 0.0;
    uint64_t n_samples = 0;
    std::vector<double> mass;  // sums to 1 when n_samples > 0
    std::vector<double> se;
    bool has_errors = true;  // false when built from a single sample
};

Histogram histogram_from_cells(const BinSpec& spec, double time, std::span<const uint32_t> cells);

/// Binned tagged-particle estimate across replicas, one histogram per
/// observation time. Raw cell indices are retained for bootstrap use.
struct MarginalHistogram {
    BinSpec spec;
    std::vector<double> times;
    std::vector<Histogram> histograms;
    std::vector<std::vector<uint32_t>> sample_cells;  // [time][replica]
    bool has_errors = true;
};

/// All records must share observation times. Fewer than 2 replicas yields no
/// error bars (flagged via has_errors).
MarginalHistogram estimate_marginal(std::span<const TrajectoryRecord> records,
                                    const BinSpec& spec);

// ---------------------------------------------------------------------------
// Distances between binned estimates
// ---------------------------------------------------------------------------

/// Sum of absolute per-bin mass differences (equals the L1 distance of the
/// piecewise-constant densities).
double l1_distance(const Histogram& a, const Histogram& b);

/// Max per-bin mass difference divided by the spatial cell volume (a binned
/// surrogate for the sup-norm distance of densities).
double linf_distance(const Histogram& a, const Histogram& b);

struct DistanceEstimate {
    double l1 = 0.0, linf = 0.0;
    double se_l1 = 0.0, se_linf = 0.0;
    int bootstrap_rounds = 0;
};

/// L1/Linf with standard errors from a paired bootstrap: each side is
/// resampled independently (>= 200 rounds) and the variances add.
DistanceEstimate histogram_distance(const Histogram& a, std::span<const uint32_t> cells_a,
                                    const Histogram& b, std::span<const uint32_t> cells_b,
                                    int bootstrap_rounds, Philox& rng);

}  // namespace rgas
