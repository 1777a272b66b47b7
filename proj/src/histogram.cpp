#include "rgas/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace rgas {

void BinSpec::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("BinSpec: dim must be 2 or 3");
    for (int k = 0; k < dim; ++k)
        if (nx[k] < 1) throw ConfigError("BinSpec: spatial bin counts must be >= 1");
    if (nv < 0) throw ConfigError("BinSpec: velocity bin count must be >= 0");
    if (nv > 0 && !(vmax > 0.0)) throw ConfigError("BinSpec: velocity bins need vmax > 0");
}

int BinSpec::cell_of(const PhasePoint& z) const {
    int idx = 0;
    for (int k = 0; k < dim; ++k) {
        int b = static_cast<int>(z.x[k] * nx[k]);
        b = std::clamp(b, 0, nx[k] - 1);
        idx = idx * nx[k] + b;
    }
    if (nv > 0) {
        int vidx = 0;
        for (int k = 0; k < dim; ++k) {
            int b = static_cast<int>((z.v[k] + vmax) / (2.0 * vmax) * nv);
            b = std::clamp(b, 0, nv - 1);
            vidx = vidx * nv + b;
        }
        idx += spatial_cells() * vidx;
    }
    return idx;
}

std::vector<double> BinSpec::cell_centers(int cell) const {
    std::vector<double> centers;
    int spatial = cell % spatial_cells();
    int vpart = cell / spatial_cells();
    std::array<int, 3> sidx{};
    for (int k = dim - 1; k >= 0; --k) {
        sidx[k] = spatial % nx[k];
        spatial /= nx[k];
    }
    for (int k = 0; k < dim; ++k) centers.push_back((sidx[k] + 0.5) / nx[k]);
    if (nv > 0) {
        std::array<int, 3> vidx{};
        for (int k = dim - 1; k >= 0; --k) {
            vidx[k] = vpart % nv;
            vpart /= nv;
        }
        for (int k = 0; k < dim; ++k)
            centers.push_back(-vmax + (vidx[k] + 0.5) * (2.0 * vmax / nv));
    }
    return centers;
}

Histogram histogram_from_cells(const BinSpec& spec, double time,
                               std::span<const uint32_t> cells) {
    Histogram h;
    h.spec = spec;
    h.time = time;
    h.n_samples = cells.size();
    int m = spec.total_cells();
    std::vector<uint64_t> counts(m, 0);
    for (uint32_t c : cells) ++counts[c];
    h.mass.resize(m);
    h.se.resize(m);
    h.has_errors = cells.size() >= 2;
    double n = static_cast<double>(cells.size());
    for (int b = 0; b < m; ++b) {
        double p = n > 0 ? counts[b] / n : 0.0;
        h.mass[b] = p;
        h.se[b] = h.has_errors ? std::sqrt(p * (1.0 - p) / n) : 0.0;
    }
    return h;
}

MarginalHistogram estimate_marginal(std::span<const TrajectoryRecord> records,
                                    const BinSpec& spec) {
    spec.validate();
    if (records.empty()) throw ConfigError("estimate_marginal: no records");
    const auto& times = records.front().times;
    for (const auto& r : records)
        if (r.times != times)
            throw ConfigError("estimate_marginal: records disagree on observation times");

    MarginalHistogram out;
    out.spec = spec;
    out.times = times;
    out.has_errors = records.size() >= 2;
    out.sample_cells.resize(times.size());
    for (size_t ti = 0; ti < times.size(); ++ti) {
        auto& cells = out.sample_cells[ti];
        cells.reserve(records.size());
        for (const auto& r : records)
            cells.push_back(static_cast<uint32_t>(spec.cell_of(r.tagged[ti])));
        out.histograms.push_back(histogram_from_cells(spec, times[ti], cells));
    }
    return out;
}

double l1_distance(const Histogram& a, const Histogram& b) {
    if (!(a.spec == b.spec)) throw ConfigError("histogram distance: binning mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
    return s;
}

double linf_distance(const Histogram& a, const Histogram& b) {
    if (!(a.spec == b.spec)) throw ConfigError("histogram distance: binning mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.mass.size(); ++i) m = std::max(m, std::abs(a.mass[i] - b.mass[i]));
    return m / a.spec.spatial_cell_volume();
}

namespace {

// Multinomial resample of one side, the other held fixed.
void bootstrap_side(const BinSpec& spec, double time, std::span<const uint32_t> cells,
                    const Histogram& fixed, bool side_is_a, int rounds, Philox& rng,
                    double& var_l1, double& var_linf) {
    double m1_l1 = 0, m2_l1 = 0, m1_li = 0, m2_li = 0;
    std::vector<uint32_t> resampled(cells.size());
    for (int r = 0; r < rounds; ++r) {
        for (auto& c : resampled) c = cells[rng.below(cells.size())];
        Histogram h = histogram_from_cells(spec, time, resampled);
        double l1 = side_is_a ? l1_distance(h, fixed) : l1_distance(fixed, h);
        double li = side_is_a ? linf_distance(h, fixed) : linf_distance(fixed, h);
        m1_l1 += l1;
        m2_l1 += l1 * l1;
        m1_li += li;
        m2_li += li * li;
    }
    m1_l1 /= rounds;
    m1_li /= rounds;
    var_l1 = std::max(0.0, m2_l1 / rounds - m1_l1 * m1_l1);
    var_linf = std::max(0.0, m2_li / rounds - m1_li * m1_li);
}

}  // namespace

DistanceEstimate histogram_distance(const Histogram& a, std::span<const uint32_t> cells_a,
                                    const Histogram& b, std::span<const uint32_t> cells_b,
                                    int bootstrap_rounds, Philox& rng) {
    DistanceEstimate est;
    est.l1 = l1_distance(a, b);
    est.linf = linf_distance(a, b);
    est.bootstrap_rounds = bootstrap_rounds;
    if (bootstrap_rounds > 0 && !cells_a.empty() && !cells_b.empty()) {
        double va_l1, va_li, vb_l1, vb_li;
        bootstrap_side(a.spec, a.time, cells_a, b, true, bootstrap_rounds, rng, va_l1, va_li);
        bootstrap_side(b.spec, b.time, cells_b, a, false, bootstrap_rounds, rng, vb_l1, vb_li);
        est.se_l1 = std::sqrt(va_l1 + vb_l1);
        est.se_linf = std::sqrt(va_li + vb_li);
    }
    return est;
}

}  // namespace rgas
