#pragma once

// Named example configurations with documented ground truths. Every recorded
// fact can be re-derived by the other modules; `rederive` dispatches on the
// quantity id and the recorded provenance (closed_form quantities come from
// the rank-2 formulas, oracle quantities from root sums at the Newton-found
// minimal point, ode quantities from integrated flows).

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/curvature.hpp"
#include "isoflow/flow.hpp"
#include "isoflow/rank2.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow::catalog {

struct DocumentedFact {
    std::string quantity;
    std::optional<double> param;  // e.g. the start angle of a collapse-time fact
    double value = 0.0;
    QuantitySource provenance = QuantitySource::closed_form;
    double tol = 1e-10;
};

struct CatalogEntry {
    std::string name;
    rank2::Rank2Config config;
    std::vector<DocumentedFact> facts;
    std::string note;
};

namespace detail {

inline DocumentedFact fact(std::string q, double value, QuantitySource p, double tol,
                           std::optional<double> param = std::nullopt) {
    return DocumentedFact{std::move(q), param, value, p, tol};
}

inline void add_common_facts(CatalogEntry& e) {
    const auto& c = e.config;
    double tm = rank2::theta_min(c);
    e.facts.push_back(fact("theta_min", tm, QuantitySource::closed_form, 1e-14));
    e.facts.push_back(fact("delta", c.delta, QuantitySource::closed_form, 1e-15));
    e.facts.push_back(fact("n", c.n, QuantitySource::closed_form, 0.0));
    e.facts.push_back(
        fact("min_a2_spherical", double(c.n) * (c.g - 1), QuantitySource::oracle, 1e-8));
    e.facts.push_back(fact("min_a2_euclidean", double(c.n) * c.g, QuantitySource::oracle, 1e-8));
    e.facts.push_back(fact("min_h_e_norm", double(c.n), QuantitySource::oracle, 1e-10));
    if (!c.with_theta0(tm).stationary())
        throw std::logic_error("catalog: theta_min is not stationary");
    auto below = rank2::collapse_times(c.with_theta0(tm / 2.0));
    if (below)
        e.facts.push_back(
            fact("t_plus", below->time, QuantitySource::ode, 1e-6, tm / 2.0));
    double above0 = (tm + std::numbers::pi / c.g) / 2.0;
    auto above = rank2::collapse_times(c.with_theta0(above0));
    if (above)
        e.facts.push_back(fact("t_minus", above->time, QuantitySource::ode, 1e-6, above0));
}

}  // namespace detail

// The torus family S^{m1}(cos theta) x S^{m2}(sin theta): two principal
// curvatures, multiplicities (m1, m2) = (min(k, n-k), max(k, n-k)). The
// factor with multiplicity m_i has radius <z, alpha_i>; the minimal torus has
// factor radii (sqrt(m1/n), sqrt(m2/n)), i.e. cos^2 theta_min = m1/n.
inline CatalogEntry clifford_torus(int n, int k) {
    if (!(n >= 2 && k >= 1 && k < n))
        throw std::invalid_argument("clifford_torus: need n >= 2 and 1 <= k < n");
    int m1 = std::min(k, n - k), m2 = std::max(k, n - k);
    CatalogEntry e;
    std::ostringstream name;
    name << "clifford_torus_n" << n << "_k" << k;
    e.name = name.str();
    e.config = rank2::Rank2Config::make(2, m1, m2, rank2::theta_min(
        rank2::Rank2Config::make_unchecked(2, m1, m2, 0.5)));
    detail::add_common_facts(e);
    e.facts.push_back(detail::fact("cos_sq_theta_min", double(m1) / n,
                                   QuantitySource::closed_form, 1e-12));
    e.facts.push_back(detail::fact("sin_sq_theta_min", double(m2) / n,
                                   QuantitySource::closed_form, 1e-12));
    std::ostringstream note;
    note << "collapses to S^" << m1 << "(1) x 0 at theta -> 0 and to 0 x S^" << m2
         << "(1) at theta -> pi/2; minimal torus S^" << m1 << "(sqrt(" << m1 << "/" << n
         << ")) x S^" << m2 << "(sqrt(" << m2 << "/" << n << "))";
    e.note = note.str();
    return e;
}

// Flag manifolds of R^3 in S^4: principal orbits of SO(3) acting by
// conjugation on trace-free symmetric 3x3 matrices, g = 3, m = (1,1). The
// focal orbits at theta = 0 and pi/3 are Veronese projective planes.
inline CatalogEntry flag_so3() {
    CatalogEntry e;
    e.name = "flag_so3";
    e.config = rank2::Rank2Config::make(3, 1, 1, std::numbers::pi / 6);
    detail::add_common_facts(e);
    e.facts.push_back(detail::fact("t_plus", std::log(2.0) / 18.0, QuantitySource::ode, 1e-6,
                                   std::numbers::pi / 12));
    e.note = "orbit diagonals c(theta) = cos(theta) diag(1,1,-2)/sqrt(6) + "
             "sin(theta) diag(1,-1,0)/sqrt(2); focal orbits are Veronese RP^2 embeddings";
    return e;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

// Diagonal representative of the flag-manifold orbit at chamber angle theta.
// Trace-free with unit Frobenius norm for every theta.
inline Mat3 flag_matrix(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 3))
        throw std::domain_error("flag_matrix: theta outside [0, pi/3]");
    double a = std::cos(theta) / std::sqrt(6.0);
    double b = std::sin(theta) / std::sqrt(2.0);
    Mat3 m{};
    m[0][0] = a + b;
    m[1][1] = a - b;
    m[2][2] = -2.0 * a;
    return m;
}

// Representative configurations covering every admissible g.
inline std::vector<CatalogEntry> standard_suite() {
    std::vector<CatalogEntry> suite;

    CatalogEntry sphere;
    sphere.name = "g1_hypersphere";
    sphere.config = rank2::Rank2Config::make(1, 3, 3, std::numbers::pi / 2);
    detail::add_common_facts(sphere);
    sphere.facts.push_back(
        detail::fact("phi_max_abs", 0.0, QuantitySource::oracle, 1e-10));
    sphere.note = "codimension-one subspheres; the single root spans only a line, so the "
                  "chamber is a half plane and the root system is reported non-full";
    suite.push_back(std::move(sphere));

    suite.push_back(clifford_torus(2, 1));
    suite.push_back(clifford_torus(4, 1));
    suite.push_back(clifford_torus(4, 2));
    suite.push_back(flag_so3());

    for (auto [g, m1, m2] : {std::tuple{4, 1, 1}, {4, 1, 3}, {4, 2, 2}, {6, 1, 1}, {6, 2, 2}}) {
        CatalogEntry e;
        std::ostringstream name;
        name << "g" << g << "_m" << m1 << "_" << m2;
        e.name = name.str();
        auto base = rank2::Rank2Config::make_unchecked(g, m1, m2, 0.1);
        e.config = rank2::Rank2Config::make(g, m1, m2, rank2::theta_min(base));
        detail::add_common_facts(e);
        suite.push_back(std::move(e));
    }
    return suite;
}

// Geometry checks for a catalog entry: the dihedral rules were enforced at
// construction; the root data must be unit and distinct, and full except for
// the documented g = 1 half-plane family.
inline bool entry_valid(const CatalogEntry& e) {
    auto rep = e.config.roots().validate();
    if (!rep.unit_norm_ok || !rep.distinct_ok) return false;
    if (e.config.g >= 2 && !rep.full_ok) return false;
    return true;
}

// Recomputes a documented fact through the module matching its provenance.
inline double rederive(const CatalogEntry& e, const DocumentedFact& f) {
    const auto& cfg = e.config;
    if (f.provenance == QuantitySource::closed_form) {
        if (f.quantity == "theta_min") return rank2::theta_min(cfg);
        if (f.quantity == "delta") return cfg.delta;
        if (f.quantity == "n") return cfg.n;
        if (f.quantity == "cos_sq_theta_min") {
            double c = std::cos(rank2::theta_min(cfg));
            return c * c;
        }
        if (f.quantity == "sin_sq_theta_min") {
            double s = std::sin(rank2::theta_min(cfg));
            return s * s;
        }
    } else if (f.provenance == QuantitySource::oracle) {
        auto rs = cfg.roots();
        if (f.quantity == "min_a2_spherical")
            return shape_norm_sq_spherical(rs, find_minimal_point(rs).coords);
        if (f.quantity == "min_a2_euclidean")
            return shape_norm_sq_euclidean(rs, find_minimal_point(rs).coords);
        if (f.quantity == "min_h_e_norm")
            return norm(mean_curvature_euclidean(rs, find_minimal_point(rs).coords));
        if (f.quantity == "phi_max_abs") {
            double worst = 0.0;
            for (int j = 1; j < 128; ++j) {
                double th = j * std::numbers::pi / (cfg.g * 128.0);
                worst = std::max(worst, std::abs(traceless_norm_sq(rs, from_polar(1.0, th))));
            }
            return worst;
        }
    } else {  // ode
        if (f.quantity == "t_plus" || f.quantity == "t_minus") {
            if (!f.param) throw std::invalid_argument("rederive: collapse fact needs theta0");
            FlowSpec spec;
            spec.kind = FlowKind::spherical;
            spec.rs = cfg.roots();
            spec.x0 = from_polar(1.0, *f.param);
            spec.t_start = 0.0;
            spec.t_end = 1.0;
            auto t = collapse_time(spec);
            if (!t) throw std::runtime_error("rederive: flow did not collapse");
            return *t;
        }
    }
    throw std::invalid_argument("rederive: unknown quantity " + f.quantity);
}

}  // namespace isoflow::catalog
