#pragma once

// Mean curvature flow in the chamber, as an ODE for the normal-space point:
//
//   Euclidean:  x'(t) = H_E(x) = - sum_i m_i alpha_i / <x, alpha_i>
//   spherical:  y'(t) = H_S(y),  |y| = 1 preserved
//
// The initial point sits at t = 0 (clamped into the span when 0 lies outside
// it). Forward integration terminates when the chamber margin drops below
// collapse_margin; backward spherical integration terminates at the minimal
// point when |H_S| < 1e-11. Euclidean and spherical flows are related by
// x(t) = sqrt(1 - 2 n t) y(-ln(1 - 2 n t)/(2 n)).
//
// The vector field blows up like 1/sqrt(T - t) at a wall, so time stepping
// alone cannot push the margin to 1e-8 at tolerance 1e-12: the required step
// size falls below the spacing of representable times before the threshold is
// reached. Below a switch margin the integration therefore continues in
// unit-speed (arc-length) parametrization with t carried as a state
// component, which crosses the wall region with bounded derivatives.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/curvature.hpp"
#include "isoflow/linalg.hpp"
#include "isoflow/ode.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow {

enum class FlowKind { euclidean, spherical };

inline const char* to_string(FlowKind k) {
    return k == FlowKind::euclidean ? "euclidean" : "spherical";
}

inline constexpr double kFixedPointResidual = 1e-11;
inline constexpr double kTailSwitchMargin = 1e-5;

struct FlowSpec {
    FlowKind kind = FlowKind::spherical;
    RootSystemData rs;
    Vec x0;
    double t_start = 0.0;
    double t_end = 1.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double collapse_margin = 1e-8;

    void validate() const {
        if (!(t_start < t_end)) throw std::invalid_argument("flow spec: t_start must be < t_end");
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw std::invalid_argument("flow spec: tolerances must be positive");
        if (!(collapse_margin > 0.0))
            throw std::invalid_argument("flow spec: collapse_margin must be positive");
        if (static_cast<int>(x0.size()) != rs.rank())
            throw std::invalid_argument("flow spec: x0 dimension does not match rank");
        auto [inside, margin] = rs.in_chamber(x0);
        if (!inside) throw std::invalid_argument("flow spec: x0 outside the chamber");
        if (margin <= collapse_margin)
            throw std::invalid_argument("flow spec: x0 margin at or below the collapse threshold");
        if (kind == FlowKind::spherical && std::abs(norm(x0) - 1.0) > 1e-12)
            throw std::invalid_argument("flow spec: spherical x0 must be a unit vector");
    }
};

struct Termination {
    enum class Reason { reached_end, collapsed, converged_to_fixed_point, step_underflow };
    Reason reason = Reason::reached_end;
    double t_hit = 0.0;   // collapsed
    int wall_index = -1;  // collapsed
    Vec fixed_point;      // converged_to_fixed_point
    std::string detail;
};

inline const char* to_string(Termination::Reason r) {
    switch (r) {
        case Termination::Reason::reached_end: return "reached_end";
        case Termination::Reason::collapsed: return "collapsed";
        case Termination::Reason::converged_to_fixed_point: return "converged_to_fixed_point";
        case Termination::Reason::step_underflow: return "step_underflow";
    }
    return "?";
}

class FlowInterpolant {
public:
    virtual ~FlowInterpolant() = default;
    virtual double t_min() const = 0;
    virtual double t_max() const = 0;
    virtual void eval(double t, Vec& out) const = 0;
};

namespace detail {

class DensePlusTail final : public FlowInterpolant {
public:
    ode::DenseOutput dense;
    std::vector<std::pair<double, Vec>> tail;  // strictly increasing t, after dense_cap
    double dense_cap = std::numeric_limits<double>::infinity();

    double t_min() const override {
        return dense.empty() ? tail.front().first : dense.t_min();
    }
    double t_max() const override {
        return tail.empty() ? dense.t_max() : tail.back().first;
    }
    void eval(double t, Vec& out) const override {
        double cap = dense.empty() ? -std::numeric_limits<double>::infinity()
                                   : std::min(dense.t_max(), dense_cap);
        if (tail.empty() || t <= cap) {
            dense.eval(t, out);
            return;
        }
        // the tail covers a vanishing time interval; linear interpolation
        double lo_t = dense.empty() ? tail.front().first : cap;
        Vec lo_y;
        if (dense.empty())
            lo_y = tail.front().second;
        else
            dense.eval(lo_t, lo_y);
        for (const auto& [tt, yy] : tail) {
            if (t <= tt) {
                double w = (tt - lo_t) > 0.0 ? (t - lo_t) / (tt - lo_t) : 1.0;
                out.resize(yy.size());
                for (std::size_t i = 0; i < yy.size(); ++i)
                    out[i] = (1.0 - w) * lo_y[i] + w * yy[i];
                return;
            }
            lo_t = tt;
            lo_y = yy;
        }
        out = tail.back().second;
    }
};

}  // namespace detail

struct FlowTrajectory {
    FlowKind kind = FlowKind::spherical;
    RootSystemData rs;
    std::vector<double> times;
    std::vector<Vec> points;
    std::vector<double> margins;
    Termination termination;
    std::optional<double> backward_converged_t;  // backward phase stopped early here
    std::shared_ptr<const FlowInterpolant> interp;
    bool renormalize_eval = false;

    double t_front() const { return times.front(); }
    double t_back() const { return times.back(); }

    Vec eval(double t) const {
        if (!interp) throw std::runtime_error("trajectory: no interpolant");
        Vec out;
        interp->eval(t, out);
        if (renormalize_eval) {
            double n = norm(out);
            if (n > 0.0)
                for (auto& v : out) v /= n;
        }
        return out;
    }

    // Chamber angle at time t (dihedral rank-2 trajectories).
    double theta_at(double t) const {
        Vec y = eval(t);
        return std::atan2(y[1], y[0]);
    }
};

namespace detail {

inline ode::Rhs flow_rhs(const RootSystemData& rs, FlowKind kind) {
    if (kind == FlowKind::euclidean) {
        return [&rs](double, const Vec& y, Vec& dy) { dy = mean_curvature_euclidean_raw(rs, y); };
    }
    return [&rs](double, const Vec& y, Vec& dy) {
        dy = mean_curvature_spherical_raw(rs, y);
        // remove the radial component explicitly before stepping
        double c = dot(dy, y) / norm_sq(y);
        for (std::size_t i = 0; i < dy.size(); ++i) dy[i] -= c * y[i];
    };
}

inline ode::PostStep unit_projection() {
    return [](Vec& y) {
        double n = norm(y);
        if (n > 0.0)
            for (auto& v : y) v /= n;
    };
}

// Unit-speed continuation below the switch margin: state u = (x, t),
// du/ds = (v/|v|, 1/|v|) with v the flow field. Returns the event point
// (x_hit, t_hit) at margin = collapse_margin, plus intermediate samples.
struct TailResult {
    std::vector<std::pair<double, Vec>> samples;  // (t, x), strictly increasing t
    double t_hit = 0.0;
    Vec x_hit;
};

inline TailResult run_collapse_tail(const RootSystemData& rs, FlowKind kind, const Vec& x_start,
                                    double t_start, double collapse_margin, double rtol,
                                    double atol) {
    const int k = rs.rank();
    Vec u0 = x_start;
    u0.push_back(t_start);

    auto field = flow_rhs(rs, kind);
    ode::Rhs rhs = [&](double, const Vec& u, Vec& du) {
        Vec x(u.begin(), u.begin() + k);
        Vec v(k);
        field(0.0, x, v);
        double nv = norm(v);
        du.resize(k + 1);
        for (int i = 0; i < k; ++i) du[i] = v[i] / nv;
        du[k] = 1.0 / nv;
    };
    ode::Event ev = [&](double, const Vec& u) {
        Vec x(u.begin(), u.begin() + k);
        return rs.margin(x) - collapse_margin;
    };
    ode::PostStep post = nullptr;
    if (kind == FlowKind::spherical) {
        post = [k](Vec& u) {
            double n = 0.0;
            for (int i = 0; i < k; ++i) n += u[i] * u[i];
            n = std::sqrt(n);
            if (n > 0.0)
                for (int i = 0; i < k; ++i) u[i] /= n;
        };
    }

    ode::Options opt;
    opt.rtol = rtol;
    opt.atol = atol;
    opt.event_locate_tol = 1e-14;
    double s_end = 1e-2;  // arc length; the wall is within ~2x the switch margin
    auto res = ode::integrate(rhs, 0.0, u0, s_end, opt, ev, post);
    if (res.status != ode::Status::event)
        throw std::runtime_error("collapse tail: wall event not reached (" + res.message + ")");

    TailResult tr;
    for (std::size_t j = 1; j < res.grid_t.size(); ++j) {
        Vec x(res.grid_y[j].begin(), res.grid_y[j].begin() + k);
        tr.samples.emplace_back(res.grid_y[j][k], std::move(x));
    }
    tr.t_hit = res.y[k];
    tr.x_hit = Vec(res.y.begin(), res.y.begin() + k);
    return tr;
}

}  // namespace detail

inline FlowTrajectory integrate(const FlowSpec& spec) {
    spec.validate();
    const RootSystemData& rs = spec.rs;
    const double anchor = std::clamp(0.0, spec.t_start, spec.t_end);

    ode::Options opt;
    opt.rtol = spec.rtol;
    opt.atol = spec.atol;
    opt.step_factor = 0.5;  // interpolated trajectory values get full accuracy

    auto rhs = detail::flow_rhs(rs, spec.kind);
    ode::PostStep post =
        spec.kind == FlowKind::spherical ? detail::unit_projection() : ode::PostStep(nullptr);

    FlowTrajectory traj;
    traj.kind = spec.kind;
    traj.rs = rs;
    traj.renormalize_eval = spec.kind == FlowKind::spherical;
    auto interp = std::make_shared<detail::DensePlusTail>();
    traj.termination.reason = Termination::Reason::reached_end;

    std::vector<double> times;
    std::vector<Vec> points;

    // backward phase
    if (spec.t_start < anchor) {
        ode::Event fixed_point_event = nullptr;
        if (spec.kind == FlowKind::spherical &&
            norm(mean_curvature_spherical_raw(rs, spec.x0)) > kFixedPointResidual) {
            fixed_point_event = [&rs](double, const Vec& y) {
                return norm(mean_curvature_spherical_raw(rs, y)) - kFixedPointResidual;
            };
        }
        auto run = [&](double rtol) {
            ode::Options o = opt;
            o.rtol = rtol;
            return ode::integrate(rhs, anchor, spec.x0, spec.t_start, o, fixed_point_event, post);
        };
        auto res = run(opt.rtol);
        if (res.status == ode::Status::step_underflow) res = run(opt.rtol / 2.0);
        if (res.status == ode::Status::step_underflow)
            throw std::runtime_error("backward integration: step size underflow (" + res.message +
                                     ")");
        if (res.status == ode::Status::max_steps_exceeded)
            throw std::runtime_error("backward integration: step limit exceeded");
        if (res.status == ode::Status::event) {
            traj.backward_converged_t = res.t;
            traj.termination.reason = Termination::Reason::converged_to_fixed_point;
            traj.termination.fixed_point = res.y;
        }
        for (std::size_t j = res.grid_t.size(); j-- > 0;) {
            times.push_back(res.grid_t[j]);
            points.push_back(res.grid_y[j]);
        }
        interp->dense.merge(res.dense);
    } else {
        times.push_back(anchor);
        points.push_back(spec.x0);
    }

    // forward phase
    if (spec.t_end > anchor) {
        const double stop_margin = std::max(spec.collapse_margin, kTailSwitchMargin);
        ode::Event margin_event = [&rs, stop_margin](double, const Vec& y) {
            return rs.margin(y) - stop_margin;
        };
        auto res = ode::integrate(rhs, anchor, spec.x0, spec.t_end, opt, margin_event, post);
        for (std::size_t j = 1; j < res.grid_t.size(); ++j) {
            times.push_back(res.grid_t[j]);
            points.push_back(res.grid_y[j]);
        }
        interp->dense.merge(res.dense);

        if (res.status == ode::Status::max_steps_exceeded)
            throw std::runtime_error("forward integration: step limit exceeded");
        if (res.status == ode::Status::step_underflow) {
            traj.termination.reason = Termination::Reason::step_underflow;
            traj.termination.detail = res.message;
        } else if (res.status == ode::Status::event) {
            double t_hit = res.t;
            Vec x_hit = res.y;
            if (stop_margin > spec.collapse_margin) {
                interp->dense_cap = res.t;
                auto tail = detail::run_collapse_tail(rs, spec.kind, res.y, res.t,
                                                      spec.collapse_margin, spec.rtol, spec.atol);
                for (auto& [tt, xx] : tail.samples) {
                    if (tt > times.back() && tt < tail.t_hit) {
                        times.push_back(tt);
                        points.push_back(xx);
                        interp->tail.emplace_back(tt, points.back());
                    }
                }
                t_hit = tail.t_hit;
                x_hit = tail.x_hit;
            }
            if (t_hit > times.back()) {
                times.push_back(t_hit);
                points.push_back(x_hit);
                if (stop_margin > spec.collapse_margin) interp->tail.emplace_back(t_hit, x_hit);
            }
            traj.termination.reason = Termination::Reason::collapsed;
            traj.termination.t_hit = t_hit;
            traj.termination.wall_index = rs.nearest_wall(x_hit);
        }
        // else reached_end: keep the backward outcome (or reached_end)
    }

    interp->dense.finalize();
    traj.times = std::move(times);
    traj.points = std::move(points);
    traj.margins.reserve(traj.points.size());
    for (const auto& p : traj.points) traj.margins.push_back(rs.margin(p));
    traj.interp = std::move(interp);
    return traj;
}

namespace detail {

class TransformedEuclidean final : public FlowInterpolant {
public:
    std::shared_ptr<const FlowInterpolant> base;  // spherical interpolant in s
    int n = 0;
    bool renormalize_base = true;
    double t_lo = 0.0, t_hi = 0.0;

    double t_min() const override { return t_lo; }
    double t_max() const override { return t_hi; }
    void eval(double t, Vec& out) const override {
        double w = 1.0 - 2.0 * n * t;
        if (!(w > 0.0)) throw std::domain_error("euclidean trajectory: t >= 1/(2n)");
        double s = -std::log(w) / (2.0 * n);
        base->eval(s, out);
        if (renormalize_base) {
            double nn = norm(out);
            if (nn > 0.0)
                for (auto& v : out) v /= nn;
        }
        double r = std::sqrt(w);
        for (auto& v : out) v *= r;
    }
};

}  // namespace detail

// Resamples a spherical trajectory as the corresponding Euclidean flow via
// x(t) = sqrt(1 - 2 n t) y(-ln(1 - 2 n t)/(2 n)).
inline FlowTrajectory euclidean_from_spherical(const FlowTrajectory& ytraj) {
    if (ytraj.kind != FlowKind::spherical)
        throw std::invalid_argument("euclidean_from_spherical: spherical trajectory required");
    const int n = ytraj.rs.dimension();

    auto s_to_t = [n](double s) { return -std::expm1(-2.0 * n * s) / (2.0 * n); };

    FlowTrajectory out;
    out.kind = FlowKind::euclidean;
    out.rs = ytraj.rs;
    out.renormalize_eval = false;
    for (std::size_t j = 0; j < ytraj.times.size(); ++j) {
        double s = ytraj.times[j];
        double t = s_to_t(s);
        if (!out.times.empty() && !(t > out.times.back())) continue;
        double r = std::exp(-double(n) * s);
        out.times.push_back(t);
        out.points.push_back(r * ytraj.points[j]);
    }
    out.margins.reserve(out.points.size());
    for (const auto& p : out.points) out.margins.push_back(out.rs.margin(p));

    out.termination = ytraj.termination;
    switch (ytraj.termination.reason) {
        case Termination::Reason::collapsed:
            out.termination.t_hit = s_to_t(ytraj.termination.t_hit);
            break;
        case Termination::Reason::converged_to_fixed_point:
            out.termination.reason = Termination::Reason::reached_end;
            out.termination.detail = "spherical source converged to the minimal point";
            break;
        default:
            break;
    }
    if (ytraj.backward_converged_t) out.backward_converged_t = s_to_t(*ytraj.backward_converged_t);

    auto tr = std::make_shared<detail::TransformedEuclidean>();
    tr->base = ytraj.interp;
    tr->n = n;
    tr->renormalize_base = ytraj.renormalize_eval;
    tr->t_lo = out.times.front();
    tr->t_hi = out.times.back();
    out.interp = std::move(tr);
    return out;
}

// Unique unit chamber point z with H_S(z) = 0. Damped Newton on
// F(x) = H_E(x) + n x, the gradient of the strictly convex potential
// V(x) = - sum_i m_i ln<x, alpha_i> + n |x|^2 / 2, warm-started by a short
// backward spherical integration from an interior direction. Falls back to
// pure backward integration if Newton stalls.
inline ChamberPoint find_minimal_point(const RootSystemData& rs) {
    const int k = rs.rank();
    const int n = rs.dimension();

    // interior seed direction
    Vec x;
    if (rs.rank() == 2 && rs.dihedral_g()) {
        double g = *rs.dihedral_g();
        x = from_polar(1.0, std::numbers::pi / (2.0 * g));
    } else {
        Vec s(k, 0.0);
        for (const auto& a : rs.roots())
            for (int i = 0; i < k; ++i) s[i] += a[i];
        double ns = norm(s);
        x = ns > 0.0 ? (1.0 / ns) * s : Vec(k, 1.0 / std::sqrt(double(k)));
        Vec best = x;
        double best_margin = rs.margin(x);
        for (int it = 1; it <= 2000 && best_margin < 0.05; ++it) {
            int w = rs.nearest_wall(x);
            double step = 0.5 / std::sqrt(double(it));
            for (int i = 0; i < k; ++i) x[i] += step * rs.roots()[w][i];
            x = normalized(x);
            if (rs.margin(x) > best_margin) {
                best_margin = rs.margin(x);
                best = x;
            }
        }
        x = best;
        if (best_margin <= 0.0)
            throw std::runtime_error("find_minimal_point: no interior chamber direction found");
    }

    // warm start toward the attracting fixed point of the backward flow
    {
        auto rhs = detail::flow_rhs(rs, FlowKind::spherical);
        ode::Options o;
        o.rtol = 1e-8;
        o.atol = 1e-10;
        auto res = ode::integrate(rhs, 0.0, x, -2.0 / n, o, nullptr, detail::unit_projection());
        if (res.status == ode::Status::reached_end && rs.in_chamber(res.y).first) x = res.y;
    }

    auto potential = [&](const Vec& p) {
        KahanSum v;
        for (int i = 0; i < rs.root_count(); ++i)
            v.add(-rs.multiplicities()[i] * std::log(dot(p, rs.roots()[i])));
        v.add(0.5 * n * norm_sq(p));
        return v.value();
    };
    auto residual = [&](const Vec& p) {
        Vec u = normalized(p);
        return norm(mean_curvature_spherical_raw(rs, u));
    };

    double best_res = residual(x);
    Vec best_x = x;
    for (int it = 0; it < 100; ++it) {
        Vec F = mean_curvature_euclidean_raw(rs, x);
        for (int i = 0; i < k; ++i) F[i] += n * x[i];
        double r = residual(x);
        if (r < best_res) {
            best_res = r;
            best_x = x;
        }
        if (r <= 1e-13 * n) break;

        SmallMatrix J(k);
        for (int i = 0; i < rs.root_count(); ++i) {
            const Vec& a = rs.roots()[i];
            double d = dot(x, a);
            double c = rs.multiplicities()[i] / (d * d);
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q) J(p, q) += c * a[p] * a[q];
        }
        for (int p = 0; p < k; ++p) J(p, p) += n;

        Vec step = solve(J, Vec((-1.0) * F));
        double v0 = potential(x);
        double slope = dot(F, step);  // F = grad V
        double tau = 1.0;
        Vec cand;
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls, tau *= 0.5) {
            cand = x + tau * step;
            if (rs.margin(cand) <= 0.0) continue;
            if (potential(cand) <= v0 + 1e-4 * tau * slope) {
                moved = true;
                break;
            }
        }
        if (!moved) break;
        x = cand;
    }

    if (best_res > kFixedPointResidual) {
        // fallback: backward integration all the way to the residual threshold
        auto rhs = detail::flow_rhs(rs, FlowKind::spherical);
        ode::Event ev = [&rs](double, const Vec& y) {
            return norm(mean_curvature_spherical_raw(rs, y)) - 1e-12;
        };
        ode::Options o;
        o.rtol = 1e-12;
        o.atol = 1e-14;
        auto res =
            ode::integrate(rhs, 0.0, normalized(best_x), -60.0 / n, o, ev, detail::unit_projection());
        double r = residual(res.y);
        if (r < best_res) {
            best_res = r;
            best_x = res.y;
        }
    }
    if (best_res > kFixedPointResidual) {
        std::ostringstream os;
        os << "find_minimal_point: did not converge (best residual " << best_res << ")";
        throw std::runtime_error(os.str());
    }
    return ChamberPoint(rs, normalized(best_x));
}

struct PairDistanceAudit {
    FlowKind kind = FlowKind::spherical;
    double t_lo = 0.0, t_hi = 0.0;
    int n_grid = 0;
    double max_d = 0.0;
    double min_fd_derivative = std::numeric_limits<double>::infinity();  // euclidean
    double max_envelope_ratio = 0.0;  // spherical: f(a) e^{-2n(a - t_ref)} / f(t_ref)
    bool degenerate = false;          // identical trajectories
    bool holds = false;
};

// Euclidean pairs: D(t) = |x_a - x_b|^2 is nondecreasing; reports the minimum
// finite-difference slope (pass when >= -1e-9 max D). Spherical pairs obey
// f(a) <= f(t_ref) e^{2n(a - t_ref)} for a <= t_ref; reports the maximum of
// the normalized envelope ratio (pass when <= 1 + 1e-6).
inline PairDistanceAudit pair_distance_audit(const FlowTrajectory& a, const FlowTrajectory& b,
                                             int n_grid = 256) {
    if (a.kind != b.kind) throw std::invalid_argument("pair audit: flow kinds differ");
    if (a.rs.rank() != b.rs.rank() || a.rs.dimension() != b.rs.dimension())
        throw std::invalid_argument("pair audit: root systems differ");
    double lo = std::max(a.t_front(), b.t_front());
    double hi = std::min(a.t_back(), b.t_back());
    if (!(lo < hi)) throw std::invalid_argument("pair audit: trajectories do not overlap in time");
    if (n_grid < 2) throw std::invalid_argument("pair audit: need at least two grid points");

    PairDistanceAudit out;
    out.kind = a.kind;
    out.t_lo = lo;
    out.t_hi = hi;
    out.n_grid = n_grid;

    std::vector<double> ts(n_grid), d(n_grid);
    for (int j = 0; j < n_grid; ++j) {
        ts[j] = lo + (hi - lo) * j / (n_grid - 1);
        d[j] = norm_sq(a.eval(ts[j]) - b.eval(ts[j]));
        out.max_d = std::max(out.max_d, d[j]);
    }

    if (a.kind == FlowKind::euclidean) {
        for (int j = 0; j + 1 < n_grid; ++j) {
            double fd = (d[j + 1] - d[j]) / (ts[j + 1] - ts[j]);
            out.min_fd_derivative = std::min(out.min_fd_derivative, fd);
        }
        out.holds = out.min_fd_derivative >= -1e-9 * out.max_d;
    } else {
        const int n = a.rs.dimension();
        double f_ref = d[n_grid - 1];
        if (f_ref < 1e-28) {
            out.degenerate = true;
            out.holds = out.max_d < 1e-20;
            out.max_envelope_ratio = 0.0;
        } else {
            for (int j = 0; j < n_grid; ++j) {
                double ratio = d[j] * std::exp(-2.0 * n * (ts[j] - ts[n_grid - 1])) / f_ref;
                out.max_envelope_ratio = std::max(out.max_envelope_ratio, ratio);
            }
            out.holds = out.max_envelope_ratio <= 1.0 + 1e-6;
        }
    }
    return out;
}

// Forward collapse time. Returns nullopt for stationary spherical data (the
// minimal submanifold never collapses). The span of `spec` is ignored; the
// flow is driven forward until the wall event fires.
inline std::optional<double> collapse_time(const FlowSpec& spec) {
    FlowSpec fs = spec;
    const int n = fs.rs.dimension();
    if (fs.kind == FlowKind::spherical &&
        norm(mean_curvature_spherical_raw(fs.rs, fs.x0)) < kFixedPointResidual)
        return std::nullopt;

    fs.t_start = 0.0;
    fs.t_end = fs.kind == FlowKind::euclidean ? 1.0 / (2.0 * n) + 1.0 : 2.0 / n;
    for (int attempt = 0; attempt < 20; ++attempt) {
        FlowTrajectory traj = integrate(fs);
        if (traj.termination.reason == Termination::Reason::collapsed)
            return traj.termination.t_hit;
        if (traj.termination.reason != Termination::Reason::reached_end)
            throw std::runtime_error(std::string("collapse_time: integration ended with ") +
                                     to_string(traj.termination.reason));
        if (fs.kind == FlowKind::euclidean)
            throw std::runtime_error("collapse_time: euclidean flow did not reach a wall");
        fs.t_end *= 2.0;
        if (fs.t_end > 1e5 / n)
            throw std::runtime_error("collapse_time: no collapse detected (stationary data?)");
    }
    throw std::runtime_error("collapse_time: no collapse detected");
}

// Largest deviation of |x(t)|^2 from |x0|^2 - 2 n t over the stored grid,
// relative to the running scale.
inline double radial_law_max_error(const FlowTrajectory& traj) {
    if (traj.kind != FlowKind::euclidean)
        throw std::invalid_argument("radial_law_max_error: euclidean trajectories only");
    const int n = traj.rs.dimension();
    // |x0|^2 at the anchor time closest to 0
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < traj.times.size(); ++j)
        if (std::abs(traj.times[j]) < std::abs(traj.times[j0])) j0 = j;
    double c = norm_sq(traj.points[j0]) + 2.0 * n * traj.times[j0];
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        double expect = c - 2.0 * n * traj.times[j];
        double got = norm_sq(traj.points[j]);
        double scale = std::max({std::abs(expect), c, 1e-300});
        worst = std::max(worst, std::abs(got - expect) / scale);
    }
    return worst;
}

}  // namespace isoflow
