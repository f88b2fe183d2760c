#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace kycrec {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

/// L2-normalize in place; a zero vector stays zero.
inline Vec normalized(Vec v) {
    double n = norm2(v);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
    return v;
}

inline bool is_zero(std::span<const double> a) {
    for (double x : a)
        if (x != 0.0) return false;
    return true;
}

/// Cosine similarity; 0 if either vector is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    double na = norm2(a);
    double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

inline Vec& axpy(Vec& y, double alpha, std::span<const double> x) {
    if (y.size() != x.size())
        throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
    return y;
}

inline Vec scaled(Vec v, double alpha) {
    for (double& x : v) x *= alpha;
    return v;
}

/// Mean of a set of equal-dimension vectors; empty input gives the zero
/// vector of dimension `dim`.
inline Vec mean_of(const std::vector<Vec>& vs, std::size_t dim) {
    Vec m(dim, 0.0);
    if (vs.empty()) return m;
    for (const Vec& v : vs) axpy(m, 1.0, v);
    for (double& x : m) x /= static_cast<double>(vs.size());
    return m;
}

} // namespace kycrec
