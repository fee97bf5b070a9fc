#pragma once

// Root-sum formulas for the mean curvature vector and shape-operator norms of
// the parallel submanifold M_x through a chamber point x:
//
//   H_E(x)      = - sum_i m_i alpha_i / <x, alpha_i>
//   H_S(x)      = H_E(x) + n x / |x|^2
//   |A_E(x)|^2  = sum_i m_i / <x, alpha_i>^2
//   |A_S(x)|^2  = |A_E(x)|^2 - n / |x|^2
//   phi(x)      = |A_S|^2 - |H_S|^2 / n     (traceless part, spherical)
//
// These sums are the brute-force oracle the rank-2 closed forms are checked
// against. Superscript E is the ambient Euclidean space, S the sphere of
// radius |x|.

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isoflow/linalg.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow {

inline constexpr double kMarginGuardRel = 1e-13;

namespace detail {

inline void require_chamber(const RootSystemData& rs, const Vec& x) {
    auto [inside, margin] = rs.in_chamber(x);
    double scale = norm(x);
    if (!inside || margin < kMarginGuardRel * scale) {
        std::ostringstream os;
        os << "chamber violation: margin " << margin << " at |x| = " << scale;
        throw std::domain_error(os.str());
    }
}

}  // namespace detail

// Unguarded field evaluation for ODE right-hand sides: trial stages of an
// adaptive step may poke outside the chamber, where the value is garbage and
// the step gets rejected by error control. Never throws.
inline Vec mean_curvature_euclidean_raw(const RootSystemData& rs, const Vec& x) {
    const int k = rs.rank();
    std::vector<KahanSum> acc(k);
    for (int i = 0; i < rs.root_count(); ++i) {
        const Vec& a = rs.roots()[i];
        double c = -rs.multiplicities()[i] / dot(x, a);
        for (int j = 0; j < k; ++j) acc[j].add(c * a[j]);
    }
    Vec h(k);
    for (int j = 0; j < k; ++j) h[j] = acc[j].value();
    return h;
}

inline Vec mean_curvature_spherical_raw(const RootSystemData& rs, const Vec& x) {
    Vec h = mean_curvature_euclidean_raw(rs, x);
    double c = rs.dimension() / norm_sq(x);
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += c * x[j];
    return h;
}

inline Vec mean_curvature_euclidean(const RootSystemData& rs, const Vec& x) {
    detail::require_chamber(rs, x);
    return mean_curvature_euclidean_raw(rs, x);
}

inline Vec mean_curvature_spherical(const RootSystemData& rs, const Vec& x) {
    detail::require_chamber(rs, x);
    return mean_curvature_spherical_raw(rs, x);
}

inline double shape_norm_sq_euclidean(const RootSystemData& rs, const Vec& x) {
    detail::require_chamber(rs, x);
    KahanSum s;
    for (int i = 0; i < rs.root_count(); ++i) {
        double d = dot(x, rs.roots()[i]);
        s.add(rs.multiplicities()[i] / (d * d));
    }
    return s.value();
}

inline double shape_norm_sq_spherical(const RootSystemData& rs, const Vec& x) {
    double a2 = shape_norm_sq_euclidean(rs, x);
    return a2 - rs.dimension() / norm_sq(x);
}

inline double traceless_norm_sq(const RootSystemData& rs, const Vec& x) {
    double a2s = shape_norm_sq_spherical(rs, x);
    double h2s = norm_sq(mean_curvature_spherical(rs, x));
    double phi = a2s - h2s / rs.dimension();
    // phi is a squared norm; tiny negatives are rounding
    if (phi < 0.0 && phi > -1e-10 * std::max(1.0, a2s)) phi = 0.0;
    return phi;
}

enum class QuantitySource { oracle, closed_form, ode };

inline const char* to_string(QuantitySource s) {
    switch (s) {
        case QuantitySource::oracle: return "oracle";
        case QuantitySource::closed_form: return "closed_form";
        case QuantitySource::ode: return "ode";
    }
    return "?";
}

struct CurvatureReport {
    Vec h_euclidean;
    Vec h_spherical;
    double a2_euclidean = 0.0;
    double a2_spherical = 0.0;
    double phi = 0.0;
    QuantitySource source = QuantitySource::oracle;
};

inline CurvatureReport curvature_report(const RootSystemData& rs, const Vec& x) {
    detail::require_chamber(rs, x);
    CurvatureReport rep;
    rep.h_euclidean = mean_curvature_euclidean_raw(rs, x);
    rep.h_spherical = rep.h_euclidean;
    double c = rs.dimension() / norm_sq(x);
    for (std::size_t j = 0; j < rep.h_spherical.size(); ++j) rep.h_spherical[j] += c * x[j];
    rep.a2_euclidean = shape_norm_sq_euclidean(rs, x);
    rep.a2_spherical = rep.a2_euclidean - rs.dimension() / norm_sq(x);
    double phi = rep.a2_spherical - norm_sq(rep.h_spherical) / rs.dimension();
    if (phi < 0.0 && phi > -1e-10 * std::max(1.0, rep.a2_spherical)) phi = 0.0;
    rep.phi = phi;
    rep.source = QuantitySource::oracle;
    return rep;
}

}  // namespace isoflow
