#pragma once

// Command implementations behind the isoflow executable. Kept in a header so
// tests can drive the commands directly; tools/isoflow.cpp only parses flags.
//
// Exit codes: 0 ok, 1 audit failure, 2 validation error, 3 numerical failure.
// ISOFLOW_SEEDLESS=1 switches the check command from randomized sampling to
// fixed evaluation grids.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isoflow/catalog.hpp"
#include "isoflow/curvature.hpp"
#include "isoflow/flow.hpp"
#include "isoflow/invariants.hpp"
#include "isoflow/io.hpp"
#include "isoflow/rank2.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string command;  // simulate | closed-form | minimal | check | catalog-list

    // dihedral parameters
    std::optional<int> g, m1, m2;
    std::optional<double> theta0;
    bool degrees = false;

    // general-rank alternative
    std::string roots_file;
    bool unchecked_roots = false;

    FlowKind kind = FlowKind::spherical;
    double t_start = -1.0;
    double t_end = 0.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double collapse_margin = 1e-8;

    std::vector<double> t_list;  // closed-form sample times
    int t_count = 101;           // grid size when t_list is empty

    std::string output_path;  // empty: stdout
    std::string format = "csv";

    // check options
    bool negative_control = false;
    bool with_sharpness = false;
    int sharp_g = 2, sharp_m1 = 1, sharp_m2 = 2;
    int samples = 100;
};

namespace detail {

struct Problem {
    RootSystemData rs;
    std::optional<rank2::Rank2Config> cfg;  // dihedral path only
    std::optional<Vec> x0;
};

inline double angle_in(const RunConfig& rc, double value) {
    return rc.degrees ? value * std::numbers::pi / 180.0 : value;
}

inline Problem resolve_problem(const RunConfig& rc, bool need_theta0) {
    if (!rc.roots_file.empty()) {
        if (rc.g || rc.m1 || rc.m2)
            throw std::invalid_argument("give either --roots-file or dihedral parameters, not both");
        auto rf = io::read_roots_file(rc.roots_file, !rc.unchecked_roots);
        return Problem{std::move(rf.rs), std::nullopt, std::move(rf.x0)};
    }
    if (!rc.g) throw std::invalid_argument("missing field: g");
    if (!rc.m1) throw std::invalid_argument("missing field: m1");
    if (!rc.m2) throw std::invalid_argument("missing field: m2");
    double theta0;
    if (rc.theta0) {
        theta0 = angle_in(rc, *rc.theta0);
    } else {
        if (need_theta0) throw std::invalid_argument("missing field: theta0");
        auto probe = rank2::Rank2Config::make_unchecked(*rc.g, *rc.m1, *rc.m2, 0.1);
        theta0 = rank2::theta_min(probe);
    }
    auto cfg = rc.unchecked_roots
                   ? rank2::Rank2Config::make_unchecked(*rc.g, *rc.m1, *rc.m2, theta0)
                   : rank2::Rank2Config::make(*rc.g, *rc.m1, *rc.m2, theta0);
    Problem p{cfg.roots(), cfg, from_polar(1.0, theta0)};
    return p;
}

inline nlohmann::json config_echo(const RunConfig& rc) {
    nlohmann::json j;
    j["command"] = rc.command;
    if (rc.g) j["g"] = *rc.g;
    if (rc.m1) j["m1"] = *rc.m1;
    if (rc.m2) j["m2"] = *rc.m2;
    if (rc.theta0) j["theta0"] = angle_in(rc, *rc.theta0);
    if (!rc.roots_file.empty()) j["roots_file"] = rc.roots_file;
    j["kind"] = to_string(rc.kind);
    j["t_start"] = rc.t_start;
    j["t_end"] = rc.t_end;
    j["rtol"] = rc.rtol;
    j["atol"] = rc.atol;
    j["collapse_margin"] = rc.collapse_margin;
    j["format"] = rc.format;
    return j;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << io::format_g17(row[c]);
        out << "\n";
    }
}

inline int emit_table(const RunConfig& rc, const Table& table, const nlohmann::json& meta,
                      std::ostream& err) {
    if (rc.format == "json") {
        nlohmann::json doc = meta;
        doc["columns"] = table.columns;
        doc["data"] = table.rows;
        if (rc.output_path.empty()) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream out(rc.output_path);
            if (!out) {
                err << "cannot open output file: " << rc.output_path << "\n";
                return 3;
            }
            out << doc.dump(2) << "\n";
        }
        return 0;
    }
    if (rc.format != "csv") throw std::invalid_argument("format must be csv or json");
    if (rc.output_path.empty()) {
        write_csv(std::cout, table);
        std::cout << "# meta " << meta.dump() << "\n";
    } else {
        std::ofstream out(rc.output_path);
        if (!out) {
            err << "cannot open output file: " << rc.output_path << "\n";
            return 3;
        }
        write_csv(out, table);
        std::ofstream side(rc.output_path + ".meta.json");
        if (!side) {
            err << "cannot open sidecar file: " << rc.output_path << ".meta.json\n";
            return 3;
        }
        side << meta.dump(2) << "\n";
    }
    return 0;
}

inline std::vector<std::string> trajectory_columns(const RootSystemData& rs, bool rank2_path) {
    std::vector<std::string> cols{"t"};
    if (rank2_path) {
        cols.push_back("r");
        cols.push_back("theta");
    }
    for (int i = 1; i <= rs.rank(); ++i) cols.push_back("x_" + std::to_string(i));
    for (const char* c : {"H_E_norm2", "H_S_norm2", "A_E_norm2", "A_S_norm2", "phi",
                          "ratio_A2_over_H2"})
        cols.push_back(c);
    return cols;
}

inline void append_curvature_columns(std::vector<double>& row, const RootSystemData& rs,
                                     const Vec& x) {
    auto rep = curvature_report(rs, x);
    double h2s = norm_sq(rep.h_spherical);
    row.push_back(norm_sq(rep.h_euclidean));
    row.push_back(h2s);
    row.push_back(rep.a2_euclidean);
    row.push_back(rep.a2_spherical);
    row.push_back(rep.phi);
    row.push_back(h2s > 0.0 ? rep.a2_spherical / h2s
                            : std::numeric_limits<double>::infinity());
}

}  // namespace detail

inline int run_simulate(const RunConfig& rc, std::ostream& err) {
    auto problem = detail::resolve_problem(rc, true);
    if (!problem.x0)
        throw std::invalid_argument("roots file must provide an x0 line for simulate");
    FlowSpec spec;
    spec.kind = rc.kind;
    spec.rs = problem.rs;
    spec.x0 = *problem.x0;
    spec.t_start = rc.t_start;
    spec.t_end = rc.t_end;
    spec.rtol = rc.rtol;
    spec.atol = rc.atol;
    spec.collapse_margin = rc.collapse_margin;
    auto traj = integrate(spec);

    const bool rank2_path = problem.cfg.has_value();
    detail::Table table;
    table.columns = detail::trajectory_columns(problem.rs, rank2_path);
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        std::vector<double> row{traj.times[j]};
        const Vec& x = traj.points[j];
        if (rank2_path) {
            row.push_back(norm(x));
            row.push_back(std::atan2(x[1], x[0]));
        }
        for (double c : x) row.push_back(c);
        detail::append_curvature_columns(row, problem.rs, x);
        table.rows.push_back(std::move(row));
    }

    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["config"] = detail::config_echo(rc);
    meta["termination"] = io::to_json(traj.termination);
    meta["provenance"] = {{"trajectory", "ode"}, {"curvature_columns", "oracle"}};
    if (traj.backward_converged_t) meta["backward_converged_t"] = *traj.backward_converged_t;

    int code = detail::emit_table(rc, table, meta, err);
    if (code != 0) return code;
    if (traj.termination.reason == Termination::Reason::step_underflow) {
        err << "integration failed: " << traj.termination.detail << "\n";
        return 3;
    }
    return 0;
}

inline int run_closed_form(const RunConfig& rc, std::ostream& err) {
    auto problem = detail::resolve_problem(rc, true);
    if (!problem.cfg)
        throw std::invalid_argument("closed-form evaluation needs dihedral parameters");
    const auto& cfg = *problem.cfg;

    std::vector<double> ts = rc.t_list;
    if (ts.empty()) {
        if (rc.t_count < 2) throw std::invalid_argument("t_count must be at least 2");
        for (int j = 0; j < rc.t_count; ++j)
            ts.push_back(rc.t_start + (rc.t_end - rc.t_start) * j / (rc.t_count - 1));
    }

    detail::Table table;
    table.columns = {"t",         "r",   "theta",     "H_E_norm2", "H_S_norm2",
                     "A_E_norm2", "A_S_norm2", "phi", "ratio_A2_over_H2", "domain_ok"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : ts) {
        std::vector<double> row{t};
        try {
            double r, theta;
            if (rc.kind == FlowKind::euclidean) {
                auto rt = rank2::euclidean_solution(cfg, t);
                r = rt.first;
                theta = rt.second;
            } else {
                r = 1.0;
                theta = rank2::spherical_theta(cfg, t);
            }
            auto [he, hs] = rank2::mean_curvature_closed(cfg, r, theta);
            auto [a2e, a2s] = rank2::shape_norms_closed(cfg, r, theta);
            double h2s = norm_sq(hs);
            double phi = rank2::phi_closed(cfg, theta) / (r * r);
            row.insert(row.end(),
                       {r, theta, norm_sq(he), h2s, a2e, a2s, phi,
                        h2s > 0.0 ? a2s / h2s : std::numeric_limits<double>::infinity(), 1.0});
        } catch (const std::domain_error&) {
            row.insert(row.end(), {nan, nan, nan, nan, nan, nan, nan, nan, 0.0});
        }
        table.rows.push_back(std::move(row));
    }

    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["config"] = detail::config_echo(rc);
    meta["provenance"] = {{"all_columns", "closed_form"}};
    return detail::emit_table(rc, table, meta, err);
}

inline int run_minimal(const RunConfig& rc, std::ostream& err) {
    auto problem = detail::resolve_problem(rc, false);
    auto z = find_minimal_point(problem.rs);
    double residual = norm(mean_curvature_spherical(problem.rs, z.coords));
    double a2s = shape_norm_sq_spherical(problem.rs, z.coords);
    double a2e = shape_norm_sq_euclidean(problem.rs, z.coords);

    nlohmann::json j;
    j["version"] = kVersion;
    j["rank"] = problem.rs.rank();
    j["z"] = z.coords;
    j["H_S_residual"] = residual;
    j["A_S_norm2"] = a2s;
    j["A_E_norm2"] = a2e;
    j["provenance"] = "oracle";
    std::optional<double> theta_min;
    if (problem.rs.rank() == 2) {
        theta_min = std::atan2(z.coords[1], z.coords[0]);
        j["theta_min"] = *theta_min;
    }

    auto emit = [&](std::ostream& out) {
        if (rc.format == "json") {
            out << j.dump(2) << "\n";
            return;
        }
        out << "rank " << problem.rs.rank() << "\n";
        out << "z";
        for (double c : z.coords) out << " " << io::format_g17(c);
        out << "\n";
        if (theta_min) out << "theta_min " << io::format_g17(*theta_min) << "\n";
        out << "H_S_residual " << io::format_g17(residual) << "\n";
        out << "A_S_norm2 " << io::format_g17(a2s) << "\n";
        out << "A_E_norm2 " << io::format_g17(a2e) << "\n";
    };
    if (rc.output_path.empty()) {
        emit(std::cout);
    } else {
        std::ofstream out(rc.output_path);
        if (!out) {
            err << "cannot open output file: " << rc.output_path << "\n";
            return 3;
        }
        emit(out);
    }
    return 0;
}

namespace detail {

inline bool seedless() {
    const char* v = std::getenv("ISOFLOW_SEEDLESS");
    return v && std::string(v) == "1";
}

struct CheckRecorder {
    nlohmann::json checks = nlohmann::json::array();
    int failures = 0;
    int total = 0;

    void add(const std::string& id, double value, double tol, const char* provenance) {
        bool pass = value <= tol;
        nlohmann::json c;
        c["id"] = id;
        c["value"] = value;
        c["tol"] = tol;
        c["pass"] = pass;
        c["provenance"] = provenance;
        checks.push_back(std::move(c));
        ++total;
        if (!pass) ++failures;
    }
};

// (r, theta) sample points: randomized by default, fixed grid with
// ISOFLOW_SEEDLESS=1.
inline std::vector<std::pair<double, double>> sample_points(int g, int count, unsigned seed) {
    std::vector<std::pair<double, double>> pts;
    double width = std::numbers::pi / g;
    if (seedless()) {
        for (int j = 0; j < count; ++j) {
            double theta = width * (0.02 + 0.96 * (j + 0.5) / count);
            double r = 0.5 + 1.5 * ((j * 7) % count) / double(count);
            pts.emplace_back(r, theta);
        }
    } else {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> ang(0.02 * width, 0.98 * width), rad(0.5, 2.0);
        for (int j = 0; j < count; ++j) pts.emplace_back(rad(rng), ang(rng));
    }
    return pts;
}

inline nlohmann::json audit_json(const invariants::EstimateAudit& a) {
    nlohmann::json j;
    j["id"] = invariants::to_string(a.id);
    j["holds"] = a.holds;
    j["applicable"] = a.applicable;
    j["witness"] = a.witness;
    if (!a.note.empty()) j["note"] = a.note;
    j["provenance"] = to_string(a.source);
    return j;
}

// Identity and oracle-agreement checks for one dihedral configuration. The
// root system is passed separately so a corrupted copy can be audited against
// the clean closed forms (negative control).
inline nlohmann::json check_entry(const rank2::Rank2Config& cfg, const RootSystemData& rs,
                                  const std::string& name, int samples, unsigned seed,
                                  int* failures) {
    CheckRecorder rec;
    auto pts = sample_points(cfg.g, samples, seed);

    double worst_h = 0.0, worst_a = 0.0, worst_phi = 0.0;
    double worst_pyth_h = 0.0, worst_pyth_a = 0.0;
    double worst_identity = 0.0, worst_torus = 0.0;
    const int n = rs.dimension();
    for (auto [r, theta] : pts) {
        Vec x = from_polar(r, theta);
        Vec he = mean_curvature_euclidean(rs, x);
        Vec hs = mean_curvature_spherical(rs, x);
        double a2e = shape_norm_sq_euclidean(rs, x);
        double a2s = shape_norm_sq_spherical(rs, x);
        double phi = traceless_norm_sq(rs, x);

        auto [he_c, hs_c] = rank2::mean_curvature_closed(cfg, r, theta);
        auto [a2e_c, a2s_c] = rank2::shape_norms_closed(cfg, r, theta);
        double phi_c = rank2::phi_closed(cfg, theta) / (r * r);
        worst_h = std::max(worst_h, dist(he, he_c) / (1.0 + norm(he_c)));
        worst_h = std::max(worst_h, dist(hs, hs_c) / (1.0 + norm(he_c)));
        worst_a = std::max(worst_a, std::abs(a2e - a2e_c) / a2e_c);
        worst_a = std::max(worst_a, std::abs(a2s - a2s_c) / std::max(1.0, a2e_c));
        worst_phi = std::max(worst_phi, std::abs(phi - phi_c) / std::max(1.0, phi_c));

        double x2 = norm_sq(x);
        worst_pyth_h = std::max(worst_pyth_h, std::abs(norm_sq(he) - norm_sq(hs) -
                                                       double(n) * n / x2) /
                                                  std::max(norm_sq(he), 1.0));
        worst_pyth_a =
            std::max(worst_pyth_a, std::abs(a2e - a2s - n / x2) / std::max(a2e, 1.0));

        // |A_S|^2 - (g/2n)|H_S|^2 = (n / 2r^2) (g (1 - delta^2) csc^2 + g - 2)
        double gt = cfg.g * theta;
        double csc2 = 1.0 / (std::sin(gt) * std::sin(gt));
        double h2s_c = rank2::h_s_norm_sq_closed(cfg, r, theta);
        double lhs = a2s_c - cfg.g / (2.0 * n) * h2s_c;
        double rhs = n / (2.0 * r * r) *
                     (cfg.g * (1.0 - cfg.delta * cfg.delta) * csc2 + (cfg.g - 2.0));
        double scale = std::max({std::abs(a2s_c), h2s_c, std::abs(rhs), 1.0});
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / scale);
        if (cfg.delta == 0.0) {
            double lhs0 = a2s_c - double(cfg.g) / n * h2s_c - n * (cfg.g - 1.0) / (r * r);
            worst_identity = std::max(worst_identity, std::abs(lhs0) / scale);
        }
        if (cfg.g == 2 && cfg.m1 == 1 && n >= 3) {
            double q = a2s_c - h2s_c / (n - 1.0) - 2.0 / (r * r) -
                       (n - 2.0) / (n - 1.0) * std::tan(theta) * std::tan(theta) / (r * r);
            worst_torus = std::max(worst_torus, std::abs(q) / scale);
        }
    }
    rec.add("closed_vs_oracle_mean_curvature", worst_h, 1e-12, "oracle");
    rec.add("closed_vs_oracle_shape_norms", worst_a, 1e-12, "oracle");
    rec.add("closed_vs_oracle_phi", worst_phi, 1e-12, "oracle");
    rec.add("pythagoras_mean_curvature", worst_pyth_h, 1e-10, "oracle");
    rec.add("pythagoras_shape_norms", worst_pyth_a, 1e-10, "oracle");
    rec.add("identity_a2_h2", worst_identity, 1e-12, "closed_form");
    if (cfg.g == 2 && cfg.m1 == 1 && n >= 3)
        rec.add("torus_traceless_identity", worst_torus, 1e-12, "closed_form");

    // exact exponential law along the flow
    {
        auto flow_cfg = cfg.with_theta0(rank2::theta_min(cfg) / 2.0);
        double worst = 0.0;
        for (int j = 0; j <= 50; ++j) {
            double t = -3.0 / (cfg.g * cfg.n) * j / 50.0;
            double theta = rank2::spherical_theta(flow_cfg, t);
            double lhs = std::cos(cfg.g * theta) + cfg.delta;
            worst = std::max(worst, std::abs(lhs - rank2::flow_v(flow_cfg, t)));
        }
        rec.add("exponential_law", worst, 1e-13, "closed_form");
    }
    rec.add("theta_min_definition",
            std::abs(std::cos(cfg.g * rank2::theta_min(cfg)) + cfg.delta), 1e-14, "closed_form");

    // minimal point through the Newton search on the (possibly corrupted) roots
    try {
        auto z = find_minimal_point(rs);
        rec.add("minimal_point_residual", norm(mean_curvature_spherical(rs, z.coords)), 1e-11,
                "ode");
        rec.add("minimal_point_a2",
                std::abs(shape_norm_sq_spherical(rs, z.coords) - double(cfg.n) * (cfg.g - 1)),
                1e-8, "oracle");
        rec.add("minimal_point_h_e",
                std::abs(norm(mean_curvature_euclidean(rs, z.coords)) - cfg.n), 1e-10, "oracle");
    } catch (const std::exception&) {
        rec.add("minimal_point_residual", std::numeric_limits<double>::infinity(), 1e-11, "ode");
    }

    nlohmann::json entry;
    entry["name"] = name;
    entry["g"] = cfg.g;
    entry["m1"] = cfg.m1;
    entry["m2"] = cfg.m2;
    entry["n"] = cfg.n;
    entry["delta"] = cfg.delta;
    entry["checks"] = rec.checks;

    // informational audits on the closed-form flow
    auto flow_cfg = cfg.with_theta0(rank2::theta_min(cfg) / 2.0);
    auto flow = invariants::sample_closed_form(flow_cfg, -6.0 / (cfg.g * cfg.n), 0.0, 512);
    nlohmann::json audits = nlohmann::json::array();
    for (const auto& a : invariants::audit_hs_conditions(flow)) audits.push_back(audit_json(a));
    audits.push_back(audit_json(invariants::ratio_envelope(flow)));
    auto [c0, band_audit] = invariants::phi_band(cfg, 0.5);
    audits.push_back(audit_json(band_audit));
    entry["audits"] = audits;

    *failures += rec.failures;
    return entry;
}

}  // namespace detail

namespace detail {

inline int emit_json(const RunConfig& rc, const nlohmann::json& doc, std::ostream& err) {
    if (rc.output_path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::ofstream out(rc.output_path);
    if (!out) {
        err << "cannot open output file: " << rc.output_path << "\n";
        return 3;
    }
    out << doc.dump(2) << "\n";
    return 0;
}

}  // namespace detail

inline int run_check(const RunConfig& rc, std::ostream& err) {
    nlohmann::json doc;
    doc["version"] = kVersion;
    doc["seedless"] = detail::seedless();
    doc["config"] = detail::config_echo(rc);
    int failures = 0;
    int total_checks = 0;

    if (!rc.roots_file.empty()) {
        // general-rank data: structural validation plus the oracle identities
        auto rf = io::read_roots_file(rc.roots_file, !rc.unchecked_roots);
        auto rep = rf.rs.validate();
        nlohmann::json entry;
        entry["name"] = rc.roots_file;
        entry["validation"] = {{"unit_norm_ok", rep.unit_norm_ok},
                               {"distinct_ok", rep.distinct_ok},
                               {"full_ok", rep.full_ok},
                               {"messages", rep.messages}};
        if (!rep.passed()) ++failures;
        doc["entries"] = nlohmann::json::array({entry});
        doc["summary"] = {{"checks", 1}, {"failures", failures}, {"pass", failures == 0}};
        if (int code = detail::emit_json(rc, doc, err); code != 0) return code;
        return failures == 0 ? 0 : 1;
    }

    nlohmann::json entries = nlohmann::json::array();
    if (rc.negative_control) {
        // corrupt the root norms of a known-good entry; the oracle identities
        // must catch it (sensitivity self-test, expected exit 1)
        auto cfg = rank2::Rank2Config::make(3, 1, 1, 0.3);
        auto clean = cfg.roots();
        auto roots = clean.roots();
        for (double& c : roots[0]) c *= 1.01;
        auto corrupted = RootSystemData::make_unchecked(roots, clean.multiplicities());
        auto rep = corrupted.validate();
        int entry_failures = 0;
        auto entry = detail::check_entry(cfg, corrupted, "negative_control_g3_m1_1", rc.samples,
                                         1234, &entry_failures);
        entry["validation"] = {{"unit_norm_ok", rep.unit_norm_ok},
                               {"distinct_ok", rep.distinct_ok},
                               {"full_ok", rep.full_ok}};
        if (!rep.unit_norm_ok) ++entry_failures;
        failures += entry_failures;
        total_checks += 1;
        entries.push_back(std::move(entry));
        doc["negative_control"] = true;
    } else {
        unsigned seed = 20240815;
        int idx = 0;
        for (const auto& e : catalog::standard_suite()) {
            int entry_failures = 0;
            auto entry = detail::check_entry(e.config, e.config.roots(), e.name, rc.samples,
                                             seed + idx++, &entry_failures);
            // documented catalog facts re-derive within tolerance
            double worst_fact = 0.0;
            for (const auto& f : e.facts) {
                double got = catalog::rederive(e, f);
                worst_fact = std::max(worst_fact,
                                      std::abs(got - f.value) / std::max(f.tol, 1e-15));
            }
            bool facts_pass = worst_fact <= 1.0;
            entry["checks"].push_back({{"id", "documented_facts"},
                                       {"value", worst_fact},
                                       {"tol", 1.0},
                                       {"pass", facts_pass},
                                       {"provenance", "oracle"}});
            if (!facts_pass) ++entry_failures;
            failures += entry_failures;
            entries.push_back(std::move(entry));
        }

        // trig identity sweep
        {
            double worst = 0.0;
            using std::numbers::pi;
            for (int g = 1; g <= 12; ++g) {
                int tested = 0;
                for (int j = 0; tested < 1000 && j < 4000; ++j) {
                    double beta = -pi / 2 + (j + 0.5) * pi / 1000.0 + 3.7e-4;
                    bool near_pole = std::abs(std::sin(g * beta)) < 0.15;
                    for (int k = 1; k <= g && !near_pole; ++k)
                        near_pole = std::abs(std::sin(k * pi / g + beta)) < 0.02;
                    if (near_pole) continue;
                    ++tested;
                    worst = std::max(worst, std::abs(rank2::sum_cot(g, beta) -
                                                     rank2::sum_cot_rhs(g, beta)));
                    worst = std::max(worst, std::abs(rank2::sum_cot_sq(g, beta) -
                                                     rank2::sum_cot_sq_rhs(g, beta)));
                }
            }
            bool pass = worst <= 1e-9;
            doc["trig_identities"] = {{"value", worst}, {"tol", 1e-9}, {"pass", pass},
                                      {"provenance", "oracle"}};
            if (!pass) ++failures;
        }

        // small ODE cross-checks
        {
            nlohmann::json xchecks = nlohmann::json::array();
            for (auto [g, m1, m2] : {std::tuple{2, 1, 1}, {3, 1, 1}}) {
                auto base = rank2::Rank2Config::make(g, m1, m2, 0.1);
                auto cfg = base.with_theta0(rank2::theta_min(base) / 2.0);
                FlowSpec spec;
                spec.kind = FlowKind::spherical;
                spec.rs = cfg.roots();
                spec.x0 = from_polar(1.0, cfg.theta0);
                auto T = rank2::collapse_times(cfg)->time;
                spec.t_start = -5.0 / (cfg.g * cfg.n);
                spec.t_end = 0.5 * T;
                auto traj = integrate(spec);
                double worst = 0.0;
                for (int j = 0; j <= 200; ++j) {
                    double t = spec.t_start + (spec.t_end - spec.t_start) * j / 200.0;
                    double theta = traj.theta_at(t);
                    worst = std::max(worst, std::abs(std::cos(cfg.g * theta) + cfg.delta -
                                                     rank2::flow_v(cfg, t)));
                }
                bool pass_sup = worst <= 1e-7;
                auto t_ode = collapse_time(spec);
                double t_err = std::abs(*t_ode - T);
                bool pass_t = t_err <= 1e-6;
                xchecks.push_back({{"g", g},
                                   {"m1", m1},
                                   {"m2", m2},
                                   {"ode_vs_closed_sup", worst},
                                   {"sup_pass", pass_sup},
                                   {"collapse_time_err", t_err},
                                   {"collapse_pass", pass_t},
                                   {"provenance", "ode"}});
                if (!pass_sup) ++failures;
                if (!pass_t) ++failures;
            }
            doc["ode_cross_checks"] = xchecks;
        }
    }
    doc["entries"] = entries;

    if (rc.with_sharpness) {
        auto [theta0, audit] = invariants::sharpness_witness(rc.sharp_g, rc.sharp_m1, rc.sharp_m2);
        nlohmann::json s = detail::audit_json(audit);
        s["theta0"] = theta0;
        doc["sharpness"] = s;
        if (!audit.holds) ++failures;
    }

    for (const auto& entry : entries)
        if (entry.contains("checks")) total_checks += int(entry["checks"].size());
    doc["summary"] = {{"checks", total_checks}, {"failures", failures}, {"pass", failures == 0}};

    if (int code = detail::emit_json(rc, doc, err); code != 0) return code;
    return failures == 0 ? 0 : 1;
}

inline int run_catalog_list(const RunConfig&, std::ostream&) {
    std::cout << "name g m1 m2 n delta theta_min\n";
    for (const auto& e : catalog::standard_suite()) {
        const auto& c = e.config;
        std::cout << e.name << " " << c.g << " " << c.m1 << " " << c.m2 << " " << c.n << " "
                  << io::format_g17(c.delta) << " " << io::format_g17(rank2::theta_min(c))
                  << "\n";
    }
    return 0;
}

// Maps exceptions onto the documented exit codes.
inline int dispatch(const RunConfig& rc, std::ostream& err) {
    try {
        if (rc.command == "simulate") return run_simulate(rc, err);
        if (rc.command == "closed-form") return run_closed_form(rc, err);
        if (rc.command == "minimal") return run_minimal(rc, err);
        if (rc.command == "check") return run_check(rc, err);
        if (rc.command == "catalog-list") return run_catalog_list(rc, err);
        err << "unknown command: " << rc.command << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace isoflow::cli
