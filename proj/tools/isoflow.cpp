// isoflow: mean curvature flow of isoparametric submanifolds as a chamber ODE.
//
// Subcommands:
//   simulate      integrate a flow and export the time series
//   closed-form   evaluate the dihedral closed-form solution on a time grid
//   minimal       locate the minimal isoparametric submanifold
//   check         run the identity/audit bundle (exit 1 on any failure)
//   catalog       list the built-in example configurations

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isoflow/cli.hpp"

namespace {

void add_geometry_flags(CLI::App* cmd, isoflow::cli::RunConfig& rc, int& g, int& m1, int& m2,
                        double& theta0) {
    cmd->add_option("--g", g, "number of distinct principal curvatures (1,2,3,4,6)");
    cmd->add_option("--m1", m1, "first multiplicity");
    cmd->add_option("--m2", m2, "second multiplicity");
    cmd->add_option("--theta0", theta0, "start angle in (0, pi/g), radians");
    cmd->add_flag("--degrees", rc.degrees, "interpret --theta0 in degrees");
    cmd->add_option("--roots-file", rc.roots_file, "general-rank root system file");
    cmd->add_flag("--unchecked", rc.unchecked_roots,
                  "skip the multiplicity/validation rules on input data");
}

void add_flow_flags(CLI::App* cmd, isoflow::cli::RunConfig& rc, std::string& kind) {
    cmd->add_option("--kind", kind, "flow kind: euclidean | spherical")
        ->check(CLI::IsMember({"euclidean", "spherical"}));
    cmd->add_option("--t-start", rc.t_start, "start of the time span");
    cmd->add_option("--t-end", rc.t_end, "end of the time span");
    cmd->add_option("--rtol", rc.rtol, "relative tolerance");
    cmd->add_option("--atol", rc.atol, "absolute tolerance");
    cmd->add_option("--collapse-margin", rc.collapse_margin,
                    "chamber margin declaring collapse");
}

void add_output_flags(CLI::App* cmd, isoflow::cli::RunConfig& rc) {
    cmd->add_option("--out", rc.output_path, "output path (default: stdout)");
    cmd->add_option("--format", rc.format, "output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean curvature flow of isoparametric submanifolds"};
    app.set_version_flag("--version", isoflow::cli::kVersion);
    app.require_subcommand(1);

    isoflow::cli::RunConfig rc;
    int g = -1, m1 = -1, m2 = -1;
    double theta0 = std::numeric_limits<double>::quiet_NaN();
    std::string kind = "spherical";

    auto* simulate = app.add_subcommand("simulate", "integrate a flow");
    add_geometry_flags(simulate, rc, g, m1, m2, theta0);
    add_flow_flags(simulate, rc, kind);
    add_output_flags(simulate, rc);

    auto* closed = app.add_subcommand("closed-form", "evaluate dihedral closed forms");
    add_geometry_flags(closed, rc, g, m1, m2, theta0);
    add_flow_flags(closed, rc, kind);
    add_output_flags(closed, rc);
    std::vector<double> t_list;
    closed->add_option("--t", t_list, "explicit sample times (overrides the grid)");
    closed->add_option("--t-count", rc.t_count, "grid size over [t-start, t-end]");

    auto* minimal = app.add_subcommand("minimal", "locate the minimal submanifold");
    add_geometry_flags(minimal, rc, g, m1, m2, theta0);
    add_output_flags(minimal, rc);

    auto* check = app.add_subcommand("check", "run the identity/audit bundle");
    add_geometry_flags(check, rc, g, m1, m2, theta0);
    add_output_flags(check, rc);
    check->add_option("--samples", rc.samples, "sample points per entry");
    check->add_flag("--negative-control", rc.negative_control,
                    "corrupt a known-good entry and expect failures (exit 1)");
    bool sharp = false;
    check->add_flag("--sharpness", sharp, "include the sharpness witness");
    check->add_option("--sharp-g", rc.sharp_g, "sharpness witness g");
    check->add_option("--sharp-m1", rc.sharp_m1, "sharpness witness m1");
    check->add_option("--sharp-m2", rc.sharp_m2, "sharpness witness m2");

    auto* catalog = app.add_subcommand("catalog", "built-in example configurations");
    catalog->add_subcommand("list", "list names and parameters");

    CLI11_PARSE(app, argc, argv);

    if (g >= 0) rc.g = g;
    if (m1 >= 0) rc.m1 = m1;
    if (m2 >= 0) rc.m2 = m2;
    if (!std::isnan(theta0)) rc.theta0 = theta0;
    if (!t_list.empty()) rc.t_list = t_list;
    rc.kind = kind == "euclidean" ? isoflow::FlowKind::euclidean : isoflow::FlowKind::spherical;
    rc.with_sharpness = sharp;

    if (simulate->parsed()) rc.command = "simulate";
    if (closed->parsed()) rc.command = "closed-form";
    if (minimal->parsed()) rc.command = "minimal";
    if (check->parsed()) rc.command = "check";
    if (catalog->parsed()) rc.command = "catalog-list";

    return isoflow::cli::dispatch(rc, std::cerr);
}
