#pragma once

// Small dense vector/matrix helpers for low-dimensional normal-space
// computations (k <= ~8). No external dependencies.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace isoflow {

using Vec = std::vector<double>;

// Neumaier-compensated accumulator. The chamber formulas involve sums of
// terms with large magnitude spread near the walls; identity checks at
// 1e-12 relative need the extra digits.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_sq(const Vec& a) { return dot(a, a); }

inline Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec add: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec sub: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline Vec normalized(const Vec& a, double eps = 1e-300) {
    double n = norm(a);
    if (n <= eps) throw std::invalid_argument("normalized: zero vector");
    return (1.0 / n) * a;
}

// Row-major dense k x k matrix, only used for tiny Newton systems.
struct SmallMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n row major

    explicit SmallMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Gaussian elimination with partial pivoting; fine for k <= 8.
inline Vec solve(SmallMatrix m, Vec rhs) {
    const std::size_t n = m.n;
    if (rhs.size() != n) throw std::invalid_argument("solve: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (std::abs(m(piv, col)) < 1e-300) throw std::runtime_error("solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = m(r, col) / m(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
            rhs[r] -= f * rhs[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

// Numerical rank of a set of vectors via modified Gram-Schmidt.
// tol is relative to the largest input norm.
inline std::size_t numerical_rank(const std::vector<Vec>& vs, double tol = 1e-9) {
    std::vector<Vec> basis;
    double scale = 0.0;
    for (const auto& v : vs) scale = std::max(scale, norm(v));
    if (scale == 0.0) return 0;
    for (const auto& v : vs) {
        Vec w = v;
        for (const auto& b : basis) {
            double c = dot(w, b);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * b[i];
        }
        // second pass for orthogonality at near-degenerate inputs
        for (const auto& b : basis) {
            double c = dot(w, b);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * b[i];
        }
        double r = norm(w);
        if (r > tol * scale) basis.push_back((1.0 / r) * w);
    }
    return basis.size();
}

}  // namespace isoflow
