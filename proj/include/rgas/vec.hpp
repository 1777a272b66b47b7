#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace rgas {

/// Small dimension-generic vector (d = 2 or 3 at runtime).
/// Doubles as a torus point (components in [0,1)) or a free vector in R^d.
class Vec {
public:
    Vec() = default;
    explicit Vec(int dim) : dim_(dim) { assert(dim >= 1 && dim <= 3); }
    Vec(double x, double y) : dim_(2) { c_[0] = x; c_[1] = y; }
    Vec(double x, double y, double z) : dim_(3) { c_[0] = x; c_[1] = y; c_[2] = z; }

    int dim() const { return dim_; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }

    Vec& operator+=(const Vec& o) {
        for (int k = 0; k < dim_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int k = 0; k < dim_; ++k) c_[k] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

    double dot(const Vec& o) const {
        double s = 0;
        for (int k = 0; k < dim_; ++k) s += c_[k] * o.c_[k];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

private:
    std::array<double, 3> c_{};
    int dim_ = 2;
};

/// Reduce a scalar coordinate to [0,1).
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r < 1.0 ? r : 0.0;  // floor rounding can land exactly on 1.0
}

/// Reduce every component to [0,1).
inline Vec torus_reduce(Vec x) {
    for (int k = 0; k < x.dim(); ++k) x[k] = wrap_unit(x[k]);
    return x;
}

/// Minimum-image representative of b - a, components in [-1/2, 1/2).
/// Its norm is the torus distance whenever that distance is < 1/2.
inline Vec torus_displacement(const Vec& a, const Vec& b) {
    Vec d(a.dim());
    for (int k = 0; k < a.dim(); ++k) {
        double u = b[k] - a[k];
        d[k] = u - std::floor(u + 0.5);
    }
    return d;
}

inline double torus_distance(const Vec& a, const Vec& b) {
    return torus_displacement(a, b).norm();
}

/// Phase-space point: torus position and velocity.
struct PhasePoint {
    Vec x;
    Vec v;
};

}  // namespace rgas
