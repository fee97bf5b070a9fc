#pragma once

// Closed forms for isoparametric hypersurfaces in spheres (dihedral rank-2
// case, g distinct principal curvatures, multiplicity data m1 <= m2).
//
// Chamber convention: x = r e^{i theta} with theta in (0, pi/g); the focal
// direction M+ sits at theta = 0 and M- at theta = pi/g. With
// delta = (m2 - m1)/(m2 + m1) and n = g (m1 + m2)/2:
//
//   H_E(x)     = -(n/r) e^{i theta} { 1 + i cot(g theta) + i delta csc(g theta) }
//   H_S(x)     = -(n/r) i e^{i theta} { cot(g theta) + delta csc(g theta) }
//   |A_E|^2    = (n g / r^2) csc^2(g theta) (1 + delta cos(g theta))
//   |A_S|^2    = |A_E|^2 - n / r^2
//   phi        = n csc^2(g theta) (g - 1 - delta^2 + delta (g-2) cos(g theta))
//
// Flows (initial point e^{i theta0} at t = 0):
//   Euclidean:  r(t) = sqrt(1 - 2 n t),
//               cos g theta(t) = (1 - 2 n t)^{-g/2} (cos g theta0 + delta) - delta
//   spherical:  cos g theta(t) = e^{g n t} (cos g theta0 + delta) - delta
//
// The minimal hypersurface sits at cos(g theta_min) = -delta; the flow
// collapses at T = (1/(g n)) ln((delta +- 1)/(delta + cos g theta0)).
//
// Complex notation is realized in R^2 via e^{i t} -> (cos t, sin t) and
// i e^{i t} -> (-sin t, cos t).

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "isoflow/linalg.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow::rank2 {

// Threshold below which |cos(g theta0) + delta| is treated as an exact fixed
// point (the stationary minimal branch).
inline constexpr double kStationaryTol = 1e-13;

// Tolerance for clamping the arccos argument at the collapse instant.
inline constexpr double kArccosClampTol = 1e-14;

// Thrown when a requested time lies beyond the collapse of the flow; carries
// the collapse time.
struct FlowDomainError : std::domain_error {
    FlowDomainError(const std::string& msg, double collapse_time_)
        : std::domain_error(msg), collapse_time(collapse_time_) {}
    double collapse_time;
};

struct Rank2Config {
    int g = 0;
    int m1 = 0;
    int m2 = 0;
    double delta = 0.0;
    int n = 0;
    double theta0 = 0.0;

    static Rank2Config make(int g, int m1, int m2, double theta0) {
        // reuse the dihedral rule checks
        (void)RootSystemData::dihedral(g, m1, m2);
        return make_unchecked(g, m1, m2, theta0);
    }

    // Skips the multiplicity rules but keeps the structural requirements.
    static Rank2Config make_unchecked(int g, int m1, int m2, double theta0) {
        if (g < 1) throw std::invalid_argument("rank2 config: g must be positive");
        if (m1 < 1 || m2 < 1) throw std::invalid_argument("rank2 config: multiplicities must be positive");
        Rank2Config c;
        c.g = g;
        c.m1 = m1;
        c.m2 = m2;
        c.delta = g >= 2 ? double(m2 - m1) / double(m2 + m1) : 0.0;
        // sum of the alternating multiplicities; equals g (m1 + m2) / 2 when
        // the Munzner alternation is consistent
        c.n = m1 * ((g + 1) / 2) + m2 * (g / 2);
        if (!(theta0 > 0.0 && theta0 < std::numbers::pi / g))
            throw std::invalid_argument("rank2 config: theta0 must lie in (0, pi/g)");
        c.theta0 = theta0;
        return c;
    }

    Rank2Config with_theta0(double t0) const {
        Rank2Config c = *this;
        if (!(t0 > 0.0 && t0 < std::numbers::pi / g))
            throw std::invalid_argument("rank2 config: theta0 must lie in (0, pi/g)");
        c.theta0 = t0;
        return c;
    }

    RootSystemData roots() const { return RootSystemData::dihedral_unchecked(g, m1, m2); }

    bool stationary() const { return std::abs(std::cos(g * theta0) + delta) < kStationaryTol; }
};

// Unique theta in (0, pi/g) with cos(g theta) = -delta.
inline double theta_min(const Rank2Config& cfg) {
    return std::acos(-cfg.delta) / cfg.g;
}

namespace detail {

inline double arccos_clamped(double u, double collapse_t, const char* what) {
    if (u > 1.0) {
        if (u > 1.0 + kArccosClampTol) {
            std::ostringstream os;
            os << what << ": time beyond collapse (arccos argument " << u << ")";
            throw FlowDomainError(os.str(), collapse_t);
        }
        u = 1.0;
    } else if (u < -1.0) {
        if (u < -1.0 - kArccosClampTol) {
            std::ostringstream os;
            os << what << ": time beyond collapse (arccos argument " << u << ")";
            throw FlowDomainError(os.str(), collapse_t);
        }
        u = -1.0;
    }
    return u;
}

}  // namespace detail

enum class FocalTarget { M_plus, M_minus };

struct CollapseInfo {
    double time = 0.0;
    FocalTarget target = FocalTarget::M_plus;
};

// Collapse time of the spherical flow: empty when theta0 = theta_min, else
// T = (1/(g n)) ln((delta +- 1)/(delta + cos g theta0)), hitting M+ when
// theta0 < theta_min and M- when theta0 > theta_min.
inline std::optional<CollapseInfo> collapse_times(const Rank2Config& cfg) {
    double c0 = std::cos(cfg.g * cfg.theta0);
    if (std::abs(c0 + cfg.delta) < kStationaryTol) return std::nullopt;
    CollapseInfo info;
    if (c0 + cfg.delta > 0.0) {
        info.target = FocalTarget::M_plus;
        info.time = std::log((cfg.delta + 1.0) / (cfg.delta + c0)) / (cfg.g * cfg.n);
    } else {
        info.target = FocalTarget::M_minus;
        info.time = std::log((cfg.delta - 1.0) / (cfg.delta + c0)) / (cfg.g * cfg.n);
    }
    return info;
}

// Spherical flow angle theta(t); theta(0) = theta0.
inline double spherical_theta(const Rank2Config& cfg, double t) {
    if (cfg.stationary()) return cfg.theta0;
    double c0 = std::cos(cfg.g * cfg.theta0);
    double u = std::exp(cfg.g * cfg.n * t) * (c0 + cfg.delta) - cfg.delta;
    auto info = collapse_times(cfg);
    u = detail::arccos_clamped(u, info ? info->time : 0.0, "spherical_theta");
    return std::acos(u) / cfg.g;
}

// Euclidean flow (r(t), theta(t)); starts at (1, theta0).
inline std::pair<double, double> euclidean_solution(const Rank2Config& cfg, double t) {
    double s = 1.0 - 2.0 * cfg.n * t;
    if (!(s > 0.0))
        throw FlowDomainError("euclidean_solution: t >= 1/(2n)", 1.0 / (2.0 * cfg.n));
    double r = std::sqrt(s);
    if (cfg.stationary()) return {r, cfg.theta0};
    double c0 = std::cos(cfg.g * cfg.theta0);
    double u = std::pow(s, -0.5 * cfg.g) * (c0 + cfg.delta) - cfg.delta;
    // Euclidean collapse time: 1 - 2 n T0 = ((cos g theta0 + delta)/(delta +- 1))^{2/g}
    auto info = collapse_times(cfg);
    double t0_collapse = 1.0 / (2.0 * cfg.n);
    if (info) {
        double side = info->target == FocalTarget::M_plus ? cfg.delta + 1.0 : cfg.delta - 1.0;
        double rho = (c0 + cfg.delta) / side;
        t0_collapse = (1.0 - std::pow(rho, 2.0 / cfg.g)) / (2.0 * cfg.n);
    }
    u = detail::arccos_clamped(u, t0_collapse, "euclidean_solution");
    return {r, std::acos(u) / cfg.g};
}

// d theta/dt of the spherical flow at angle theta.
inline double theta_dot(const Rank2Config& cfg, double theta) {
    double gt = cfg.g * theta;
    return -cfg.n * (std::cos(gt) + cfg.delta) / std::sin(gt);
}

// Closed-form mean curvature vectors at x = r e^{i theta}.
inline std::pair<Vec, Vec> mean_curvature_closed(const Rank2Config& cfg, double r, double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / cfg.g))
        throw std::domain_error("mean_curvature_closed: theta outside (0, pi/g)");
    if (!(r > 0.0)) throw std::domain_error("mean_curvature_closed: r must be positive");
    double gt = cfg.g * theta;
    double cot = std::cos(gt) / std::sin(gt);
    double csc = 1.0 / std::sin(gt);
    double w = cot + cfg.delta * csc;
    double c = std::cos(theta), s = std::sin(theta);
    double f = -double(cfg.n) / r;
    // e^{i theta} -> (c, s); i e^{i theta} -> (-s, c)
    Vec he{f * (c - w * s), f * (s + w * c)};
    Vec hs{f * (-w * s), f * (w * c)};
    return {he, hs};
}

inline double h_s_norm_sq_closed(const Rank2Config& cfg, double r, double theta) {
    double gt = cfg.g * theta;
    double w = (std::cos(gt) + cfg.delta) / std::sin(gt);
    double v = cfg.n / r * w;
    return v * v;
}

// Closed-form shape-operator norms (|A_E|^2, |A_S|^2).
inline std::pair<double, double> shape_norms_closed(const Rank2Config& cfg, double r, double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / cfg.g))
        throw std::domain_error("shape_norms_closed: theta outside (0, pi/g)");
    if (!(r > 0.0)) throw std::domain_error("shape_norms_closed: r must be positive");
    double gt = cfg.g * theta;
    double csc2 = 1.0 / (std::sin(gt) * std::sin(gt));
    double a2e = cfg.n * cfg.g / (r * r) * csc2 * (1.0 + cfg.delta * std::cos(gt));
    double a2s = a2e - cfg.n / (r * r);
    return {a2e, a2s};
}

// Traceless norm at r = 1:
// phi = n csc^2(g theta) (g - 1 - delta^2 + delta (g-2) cos(g theta)).
inline double phi_closed(const Rank2Config& cfg, double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / cfg.g))
        throw std::domain_error("phi_closed: theta outside (0, pi/g)");
    double gt = cfg.g * theta;
    double csc2 = 1.0 / (std::sin(gt) * std::sin(gt));
    return cfg.n * csc2 * (cfg.g - 1.0 - cfg.delta * cfg.delta +
                           cfg.delta * (cfg.g - 2.0) * std::cos(gt));
}

// v(t) = cos(g theta(t)) + delta = e^{gnt} (cos(g theta0) + delta), the exact
// exponential law of the spherical flow. Working with v directly avoids the
// arccos round trip, which loses the distance to the fixed point to rounding
// once e^{gnt} falls below machine precision.
inline double flow_v(const Rank2Config& cfg, double t) {
    if (cfg.stationary()) return 0.0;
    return std::exp(cfg.g * cfg.n * t) * (std::cos(cfg.g * cfg.theta0) + cfg.delta);
}

struct FlowPointNorms {
    double a2_spherical = 0.0;
    double h2_spherical = 0.0;
    double phi = 0.0;
};

// Spherical curvature norms at r = 1 as functions of v = cos(g theta) + delta.
inline FlowPointNorms norms_from_v(const Rank2Config& cfg, double v) {
    double sin2 = (1.0 + cfg.delta - v) * (1.0 - cfg.delta + v);  // sin^2(g theta)
    if (!(sin2 > 0.0)) throw std::domain_error("norms_from_v: state at or past a wall");
    FlowPointNorms out;
    double d = cfg.delta;
    out.a2_spherical = cfg.n * cfg.g * (1.0 - d * d + d * v) / sin2 - cfg.n;
    out.h2_spherical = double(cfg.n) * cfg.n * v * v / sin2;
    out.phi = cfg.n * (cfg.g - 1.0 - d * d + d * (cfg.g - 2.0) * (v - d)) / sin2;
    return out;
}

// Backward-time limits of the spherical flow:
//   |A(t)|^2        -> (g-1) n
//   H^2(t) e^{-2gnt} -> C0 = n^2 (cos g theta0 + delta)^2 / (1 - delta^2)
// C0 degenerates to 0 on the stationary branch.
struct LimitConstants {
    double a2_limit = 0.0;
    double c0 = 0.0;
    bool degenerate = false;  // theta0 = theta_min, C0 = 0
};

inline LimitConstants limit_constants(const Rank2Config& cfg) {
    LimitConstants lc;
    lc.a2_limit = (cfg.g - 1.0) * cfg.n;
    double c0 = std::cos(cfg.g * cfg.theta0);
    if (std::abs(c0 + cfg.delta) < kStationaryTol) {
        lc.c0 = 0.0;
        lc.degenerate = true;
    } else {
        double num = cfg.n * (c0 + cfg.delta);
        lc.c0 = num * num / (1.0 - cfg.delta * cfg.delta);
    }
    return lc;
}

namespace detail {

inline void require_away_from_poles(int g, double beta) {
    for (int k = 1; k <= g; ++k) {
        if (std::abs(std::sin(k * std::numbers::pi / g + beta)) < 1e-12)
            throw std::domain_error("cotangent sum: angle too close to a pole");
    }
}

}  // namespace detail

// Literal left-hand side of sum_{k=1}^{g} cot(k pi/g + beta).
inline double sum_cot(int g, double beta) {
    if (g < 1) throw std::invalid_argument("sum_cot: g must be positive");
    detail::require_away_from_poles(g, beta);
    KahanSum s;
    for (int k = 1; k <= g; ++k) {
        double a = k * std::numbers::pi / g + beta;
        s.add(std::cos(a) / std::sin(a));
    }
    return s.value();
}

// Right-hand side g cot(g beta).
inline double sum_cot_rhs(int g, double beta) {
    if (std::abs(std::sin(g * beta)) < 1e-12)
        throw std::domain_error("sum_cot_rhs: g beta too close to a pole");
    return g * std::cos(g * beta) / std::sin(g * beta);
}

// Literal left-hand side of sum_{k=1}^{g} cot^2(k pi/g + beta).
inline double sum_cot_sq(int g, double beta) {
    if (g < 1) throw std::invalid_argument("sum_cot_sq: g must be positive");
    detail::require_away_from_poles(g, beta);
    KahanSum s;
    for (int k = 1; k <= g; ++k) {
        double a = k * std::numbers::pi / g + beta;
        double c = std::cos(a) / std::sin(a);
        s.add(c * c);
    }
    return s.value();
}

// Right-hand side g^2 csc^2(g beta) - g.
inline double sum_cot_sq_rhs(int g, double beta) {
    double sg = std::sin(g * beta);
    if (std::abs(sg) < 1e-12)
        throw std::domain_error("sum_cot_sq_rhs: g beta too close to a pole");
    return double(g) * g / (sg * sg) - g;
}

}  // namespace isoflow::rank2
