#pragma once

// Audits of rigidity-style estimates along exact isoparametric flows. All
// quantities are spherical: A = A_S, H = H_S along the flow y(t), with
// ratio = |A(t)|^2 / |H(t)|^2. The audited conditions:
//
//   (ratio bounded)   0 < |A|^2 < C |H|^2 for all t < 0; for g >= 2 the ratio
//                     grows like e^{-2gnt}, so only g = 1 satisfies it.
//   (exponential)     |A|^2 < e^{-Bt} |H|^2 with B < 4n; the fitted infimum
//                     tends to 2gn from the tail.
//   (traceless)       |A|^2 - |H|^2/(n-1) <= 2.
//   (ratio envelope)  c2 e^{-2gnt} <= ratio <= c1 e^{-2gnt} for t < -t1;
//                     the tail value of ratio e^{2gnt} is (g-1) n / C0.
//   (phi band)        (g-1)n <= phi <= (g-1+eps)n (one-sided for delta > 0)
//                     for starts within c0 of theta_min, over t <= 0.
//   (sharpness)       for n > g a start angle with
//                     g(1+delta)/(n (cos g theta0 + delta)^2) < 1 certifies
//                     |A(t)|^2 < e^{-2gnt} |H(t)|^2 strictly.
//
// Constants are fitted over the most-negative half of the grid by max/min of
// exact ratios, not by regression.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/curvature.hpp"
#include "isoflow/flow.hpp"
#include "isoflow/rank2.hpp"

namespace isoflow::invariants {

enum class ConditionId {
    hs_ratio_bounded,
    hs_exponential,
    hs_traceless,
    ratio_envelope,
    phi_band,
    sharpness,
};

inline const char* to_string(ConditionId id) {
    switch (id) {
        case ConditionId::hs_ratio_bounded: return "hs_ratio_bounded";
        case ConditionId::hs_exponential: return "hs_exponential";
        case ConditionId::hs_traceless: return "hs_traceless";
        case ConditionId::ratio_envelope: return "ratio_envelope";
        case ConditionId::phi_band: return "phi_band";
        case ConditionId::sharpness: return "sharpness";
    }
    return "?";
}

struct EstimateAudit {
    ConditionId id = ConditionId::hs_ratio_bounded;
    bool holds = false;
    bool applicable = true;
    std::map<std::string, double> witness;
    std::string note;
    QuantitySource source = QuantitySource::closed_form;
};

// A spherical flow sampled as (t, |A|^2, |H|^2) triples.
struct SampledFlow {
    std::vector<double> t;
    std::vector<double> a2;
    std::vector<double> h2;
    int g = 0;
    int n = 0;
    double delta = 0.0;
    double theta0 = 0.0;
    QuantitySource source = QuantitySource::closed_form;

    bool stationary() const {
        double m = 0.0;
        for (double v : h2) m = std::max(m, v);
        return m < 1e-20;
    }
};

inline SampledFlow sample_closed_form(const rank2::Rank2Config& cfg, double t_lo, double t_hi,
                                      int npts) {
    if (npts < 2) throw std::invalid_argument("sample_closed_form: need at least two points");
    SampledFlow f;
    f.g = cfg.g;
    f.n = cfg.n;
    f.delta = cfg.delta;
    f.theta0 = cfg.theta0;
    f.source = QuantitySource::closed_form;
    for (int j = 0; j < npts; ++j) {
        double t = t_lo + (t_hi - t_lo) * j / (npts - 1);
        auto norms = rank2::norms_from_v(cfg, rank2::flow_v(cfg, t));
        f.t.push_back(t);
        f.a2.push_back(norms.a2_spherical);
        f.h2.push_back(norms.h2_spherical);
    }
    return f;
}

// Samples an integrated rank-2 spherical trajectory through the root-sum
// oracle, so audits of ODE output are independent of the closed forms.
inline SampledFlow sample_trajectory(const FlowTrajectory& traj, int npts) {
    if (traj.kind != FlowKind::spherical)
        throw std::invalid_argument("sample_trajectory: spherical trajectories only");
    if (traj.rs.rank() != 2 || !traj.rs.dihedral_g())
        throw std::invalid_argument("sample_trajectory: dihedral rank-2 trajectories only");
    if (npts < 2) throw std::invalid_argument("sample_trajectory: need at least two points");
    SampledFlow f;
    f.g = *traj.rs.dihedral_g();
    f.n = traj.rs.dimension();
    const auto& mults = traj.rs.multiplicities();
    int m1 = mults[0];
    int m2 = f.g >= 2 ? mults[1] : m1;
    f.delta = f.g >= 2 ? double(m2 - m1) / double(m2 + m1) : 0.0;
    f.source = QuantitySource::ode;
    double t_lo = traj.t_front(), t_hi = traj.t_back();
    for (int j = 0; j < npts; ++j) {
        double t = t_lo + (t_hi - t_lo) * j / (npts - 1);
        Vec y = traj.eval(t);
        f.t.push_back(t);
        f.a2.push_back(shape_norm_sq_spherical(traj.rs, y));
        f.h2.push_back(norm_sq(mean_curvature_spherical(traj.rs, y)));
    }
    double t_ref = std::clamp(0.0, t_lo, t_hi);
    f.theta0 = traj.theta_at(t_ref);
    return f;
}

namespace detail {

// least-squares slope of ln(ratio) against t over [begin, end)
inline double log_slope(const SampledFlow& f, std::size_t begin, std::size_t end) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t m = 0;
    for (std::size_t j = begin; j < end; ++j) {
        if (f.h2[j] <= 0.0) continue;
        double y = std::log(f.a2[j] / f.h2[j]);
        st += f.t[j];
        sy += y;
        stt += f.t[j] * f.t[j];
        sty += f.t[j] * y;
        ++m;
    }
    double denom = m * stt - st * st;
    if (m < 2 || std::abs(denom) < 1e-300) return 0.0;
    return (m * sty - st * sy) / denom;
}

inline std::size_t most_negative_half_end(const SampledFlow& f) {
    double cut = f.t.front() / 2.0;
    std::size_t e = 0;
    while (e < f.t.size() && f.t[e] <= cut) ++e;
    return std::max<std::size_t>(e, 2);
}

}  // namespace detail

// Audits of the three shrinking-cap rigidity conditions along a sampled
// non-stationary spherical flow covering [t_start, 0].
inline std::vector<EstimateAudit> audit_hs_conditions(const SampledFlow& f) {
    if (f.t.size() < 8) throw std::invalid_argument("audit_hs_conditions: grid too small");
    std::vector<EstimateAudit> out;
    const bool stationary = f.stationary();
    const std::size_t half = detail::most_negative_half_end(f);

    // (1) bounded ratio
    {
        EstimateAudit a;
        a.id = ConditionId::hs_ratio_bounded;
        a.source = f.source;
        if (stationary) {
            a.applicable = false;
            a.note = "stationary flow: H == 0, ratio conditions undefined";
        } else {
            double c_fit = 0.0;
            for (std::size_t j = 0; j < half; ++j) c_fit = std::max(c_fit, f.a2[j] / f.h2[j]);
            double slope = detail::log_slope(f, 0, half);
            a.witness["C_fit"] = c_fit;
            a.witness["log_ratio_slope"] = slope;
            a.witness["expected_slope"] = f.g >= 2 ? -2.0 * f.g * f.n : 0.0;
            // bounded iff the ratio does not blow up into the past
            a.holds = slope > -0.5 * f.g * f.n;
            if (!a.holds) a.note = "ratio grows like e^{-2gnt} into the past";
        }
        out.push_back(std::move(a));
    }

    // (2) exponential bound with B < 4n
    {
        EstimateAudit a;
        a.id = ConditionId::hs_exponential;
        a.source = f.source;
        if (stationary) {
            a.applicable = false;
            a.note = "stationary flow: H == 0, ratio conditions undefined";
        } else {
            double b_fit = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < half; ++j) {
                if (f.t[j] >= 0.0) continue;
                b_fit = std::max(b_fit, std::log(f.a2[j] / f.h2[j]) / (-f.t[j]));
            }
            a.witness["B_fit"] = b_fit;
            a.witness["four_n"] = 4.0 * f.n;
            a.witness["tail_limit_2gn"] = 2.0 * f.g * f.n;
            a.holds = b_fit < 4.0 * f.n;
        }
        out.push_back(std::move(a));
    }

    // (3) traceless bound
    {
        EstimateAudit a;
        a.id = ConditionId::hs_traceless;
        a.source = f.source;
        if (f.n < 2) {
            a.applicable = false;
            a.note = "n < 2: the 1/(n-1) normalization is undefined";
        } else {
            double max_q = -std::numeric_limits<double>::infinity();
            double t_at = 0.0;
            for (std::size_t j = 0; j < f.t.size(); ++j) {
                double q = f.a2[j] - f.h2[j] / (f.n - 1.0) - 2.0;
                if (q > max_q) {
                    max_q = q;
                    t_at = f.t[j];
                }
            }
            a.witness["max_excess"] = max_q;
            a.witness["t_at_max"] = t_at;
            a.holds = max_q <= 1e-12;
        }
        out.push_back(std::move(a));
    }
    return out;
}

// Fits the two-sided envelope c2 e^{-2gnt} <= ratio <= c1 e^{-2gnt} over the
// most-negative half of the grid.
inline EstimateAudit ratio_envelope(const SampledFlow& f) {
    if (f.t.size() < 8) throw std::invalid_argument("ratio_envelope: grid too small");
    EstimateAudit a;
    a.id = ConditionId::ratio_envelope;
    a.source = f.source;
    if (f.stationary()) {
        a.applicable = false;
        a.note = "stationary flow: H == 0, ratio undefined";
        return a;
    }
    if (f.g == 1) {
        // ratio is identically 1/n
        double worst = 0.0;
        for (std::size_t j = 0; j < f.t.size(); ++j)
            worst = std::max(worst, std::abs(f.a2[j] / f.h2[j] - 1.0 / f.n));
        a.witness["c1"] = 1.0 / f.n;
        a.witness["c2"] = 1.0 / f.n;
        a.witness["max_ratio_deviation"] = worst;
        a.holds = worst <= 1e-9;
        a.note = "g = 1: ratio is constant 1/n, envelope degenerate";
        return a;
    }
    const std::size_t half = detail::most_negative_half_end(f);
    double c1 = -std::numeric_limits<double>::infinity();
    double c2 = std::numeric_limits<double>::infinity();
    auto product = [&](std::size_t j) {
        return f.a2[j] / f.h2[j] * std::exp(2.0 * f.g * f.n * f.t[j]);
    };
    for (std::size_t j = 0; j < half; ++j) {
        double p = product(j);
        c1 = std::max(c1, p);
        c2 = std::min(c2, p);
    }
    // first grid time after which the fitted envelope holds with 1e-9 slack
    double slack = 1e-9 * std::max(1.0, c1);
    std::size_t i1 = f.t.size();
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        bool ok = true;
        for (std::size_t j = i; j < f.t.size() && ok; ++j) {
            double p = product(j);
            ok = p >= c2 - slack && p <= c1 + slack;
        }
        if (ok) {
            i1 = i;
            break;
        }
    }
    a.witness["c1"] = c1;
    a.witness["c2"] = c2;
    a.witness["t1"] = i1 < f.t.size() ? f.t[i1] : f.t.back();
    // theoretical tail value (g-1) n / C0 from the start angle
    double c0cos = std::cos(f.g * f.theta0) + f.delta;
    if (std::abs(c0cos) > rank2::kStationaryTol) {
        double C0 = double(f.n) * f.n * c0cos * c0cos / (1.0 - f.delta * f.delta);
        a.witness["tail_theory"] = (f.g - 1.0) * f.n / C0;
    }
    a.holds = std::isfinite(c1) && std::isfinite(c2) && c2 > 0.0;
    return a;
}

namespace detail {

// phi range over the theta interval swept by the flow for t <= 0, i.e.
// between theta0 and theta_min (monotone in t on each side).
inline std::pair<double, double> phi_range(const rank2::Rank2Config& cfg, double theta0,
                                           int samples = 257) {
    double tm = rank2::theta_min(cfg);
    double lo = std::min(theta0, tm), hi = std::max(theta0, tm);
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
    for (int j = 0; j < samples; ++j) {
        double th = lo + (hi - lo) * j / (samples - 1);
        double p = rank2::phi_closed(cfg, th);
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    return {pmin, pmax};
}

inline bool phi_window_ok(const rank2::Rank2Config& cfg, double theta0, double band_lo,
                          double band_hi) {
    auto [pmin, pmax] = phi_range(cfg, theta0);
    double tol = 1e-9 * cfg.n;
    return pmin >= band_lo - tol && pmax <= band_hi + tol;
}

inline double bisect_window(const rank2::Rank2Config& cfg, bool below, double band_lo,
                            double band_hi) {
    double tm = rank2::theta_min(cfg);
    double width = below ? tm : std::numbers::pi / cfg.g - tm;
    auto edge = [&](double c0) { return below ? tm - c0 : tm + c0; };
    double lo = 0.0, hi = width * (1.0 - 1e-9);
    if (phi_window_ok(cfg, edge(hi), band_lo, band_hi)) return hi;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (phi_window_ok(cfg, edge(mid), band_lo, band_hi) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

// Largest c0 such that every start angle within c0 of theta_min keeps phi(t)
// inside the band for all t <= 0. For delta = 0 the band is
// [(g-1)n, (g-1+eps)n] on both sides; for delta > 0 the band is one-sided:
// [(g-1-eps)n, (g-1)n] below theta_min and [(g-1)n, (g-1+eps)n] above.
inline std::pair<double, EstimateAudit> phi_band(const rank2::Rank2Config& cfg, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("phi_band: eps must be in (0,1)");
    EstimateAudit a;
    a.id = ConditionId::phi_band;
    a.source = QuantitySource::closed_form;
    const double n = cfg.n, g = cfg.g;
    a.witness["eps"] = eps;

    if (cfg.g == 1) {
        // phi vanishes identically; any start angle keeps it inside [0, eps n]
        double worst = 0.0;
        for (int j = 1; j < 256; ++j)
            worst = std::max(worst,
                             std::abs(rank2::phi_closed(cfg, j * std::numbers::pi / 256.0)));
        a.witness["c0"] = std::numbers::pi / 2.0;
        a.witness["max_phi"] = worst;
        a.holds = worst <= eps * n;
        a.note = "g = 1: phi is identically zero, window unconstrained";
        return {std::numbers::pi / 2.0, std::move(a)};
    }

    double c0_below, c0_above;
    if (cfg.delta == 0.0) {
        c0_below = detail::bisect_window(cfg, true, (g - 1.0) * n, (g - 1.0 + eps) * n);
        c0_above = detail::bisect_window(cfg, false, (g - 1.0) * n, (g - 1.0 + eps) * n);
    } else {
        c0_below = detail::bisect_window(cfg, true, (g - 1.0 - eps) * n, (g - 1.0) * n);
        c0_above = detail::bisect_window(cfg, false, (g - 1.0) * n, (g - 1.0 + eps) * n);
    }
    double c0 = std::min(c0_below, c0_above);
    a.witness["c0"] = c0;
    a.witness["c0_below"] = c0_below;
    a.witness["c0_above"] = c0_above;
    a.holds = c0 > 0.0;
    return {c0, std::move(a)};
}

// Start angle certifying the sharpness of the exponential condition: returns
// the largest theta0 with g(1+delta)/(n (cos g theta0 + delta)^2) < 1 and the
// audit of |A(t)|^2 < e^{-2gnt} |H(t)|^2 over t in [t_start, 0.9 T+].
inline std::pair<double, EstimateAudit> sharpness_witness(int g, int m1, int m2,
                                                          double t_start = -5.0) {
    auto base = rank2::Rank2Config::make(g, m1, m2, 1e-3 / g);
    const int n = base.n;
    const double delta = base.delta;
    if (!(n > g))
        throw std::invalid_argument("sharpness_witness: requires n > g");
    double tm = rank2::theta_min(base);
    auto coeff = [&](double th0) {
        double c = std::cos(g * th0) + delta;
        return g * (1.0 + delta) / (n * c * c);
    };
    double lo = 1e-9, hi = tm * (1.0 - 1e-9);
    if (coeff(lo) >= 1.0)
        throw std::runtime_error("sharpness_witness: no admissible start angle");
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        (coeff(mid) < 1.0 ? lo : hi) = mid;
    }
    double theta0 = lo;  // strictly below the coefficient threshold

    auto cfg = base.with_theta0(theta0);
    auto info = rank2::collapse_times(cfg);
    double t_hi = info ? 0.9 * info->time : 0.0;
    auto f = sample_closed_form(cfg, t_start, t_hi, 501);

    EstimateAudit a;
    a.id = ConditionId::sharpness;
    a.source = QuantitySource::closed_form;
    double margin_min = std::numeric_limits<double>::infinity();
    double chain_margin_min = std::numeric_limits<double>::infinity();
    const double chain_bound = 2.0 * (1.0 + delta) / ((std::cos(g * theta0) + delta) *
                                                      (std::cos(g * theta0) + delta));
    for (std::size_t j = 0; j < f.t.size(); ++j) {
        double envelope = std::exp(-2.0 * g * n * f.t[j]) * f.h2[j];
        margin_min = std::min(margin_min, (envelope - f.a2[j]) / envelope);
        double chain = 2.0 * n / g * (f.a2[j] / f.h2[j]) * std::exp(2.0 * g * n * f.t[j]);
        chain_margin_min = std::min(chain_margin_min, chain_bound - chain);
    }
    a.witness["theta0"] = theta0;
    a.witness["coefficient"] = coeff(theta0);
    a.witness["T_plus"] = info ? info->time : 0.0;
    a.witness["relative_margin_min"] = margin_min;
    a.witness["chain_margin_min"] = chain_margin_min;
    a.holds = margin_min > 0.0 && coeff(theta0) < 1.0;
    return {theta0, std::move(a)};
}

}  // namespace isoflow::invariants
