#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "rgas/vec.hpp"

namespace rgas {

/// Counter-based random stream (Philox-4x32-10).
///
/// A stream is addressed by (key, stream id); the 128-bit counter holds the
/// stream id in its high half and the draw position in its low half, so
/// streams with the same key never overlap and are statistically independent.
/// All distributions below are hand-rolled on top of the raw generator, which
/// keeps replay identical across standard libraries.
class Philox {
public:
    explicit Philox(uint64_t key, uint64_t stream = 0)
        : k0_(static_cast<uint32_t>(key)), k1_(static_cast<uint32_t>(key >> 32)) {
        ctr_[2] = static_cast<uint32_t>(stream);
        ctr_[3] = static_cast<uint32_t>(stream >> 32);
    }

    uint32_t next32() {
        if (pos_ == 4) refill();
        return out_[pos_++];
    }

    uint64_t next64() {
        uint64_t lo = next32();
        uint64_t hi = next32();
        return (hi << 32) | lo;
    }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double a = 2.0 * std::numbers::pi * uniform();
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
    double gamma(double shape) {
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform_pos();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

    /// Unbiased integer in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            uint64_t x = next64();
            if (x < limit) return x % n;
        }
    }

    /// Uniform direction on the unit sphere S^{d-1}, d in {2,3}.
    Vec unit_vector(int dim) {
        if (dim == 2) {
            double a = 2.0 * std::numbers::pi * uniform();
            return {std::cos(a), std::sin(a)};
        }
        double z = 2.0 * uniform() - 1.0;
        double a = 2.0 * std::numbers::pi * uniform();
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(a), r * std::sin(a), z};
    }

private:
    void refill() {
        uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        uint32_t k0 = k0_, k1 = k1_;
        for (int round = 0; round < 10; ++round) {
            if (round != 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            uint64_t p0 = uint64_t{0xD2511F53u} * c0;
            uint64_t p1 = uint64_t{0xCD9E8D57u} * c2;
            uint32_t n0 = static_cast<uint32_t>(p1 >> 32) ^ c1 ^ k0;
            uint32_t n1 = static_cast<uint32_t>(p1);
            uint32_t n2 = static_cast<uint32_t>(p0 >> 32) ^ c3 ^ k1;
            uint32_t n3 = static_cast<uint32_t>(p0);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
        }
        out_[0] = c0;
        out_[1] = c1;
        out_[2] = c2;
        out_[3] = c3;
        if (++ctr_[0] == 0) ++ctr_[1];  // position counter; stream id words untouched
        pos_ = 0;
    }

    uint32_t ctr_[4]{};
    uint32_t k0_, k1_;
    uint32_t out_[4]{};
    int pos_ = 4;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Deterministic, pairwise-independent replica streams.
inline Philox seed_stream(uint64_t master_seed, uint64_t stream_index) {
    return Philox(master_seed, stream_index);
}

}  // namespace rgas
