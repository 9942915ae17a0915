// requ-forge: compile smooth functions into explicit ReQU feedforward
// networks, verify the uniform error empirically, and inspect the exact
// building-block gadgets.

#include <CLI11.hpp>

#include "requforge/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"requ-forge: explicit ReQU network construction and verification"};
    app.require_subcommand(1);

    namespace cli = requforge::cli;

    cli::BuildArgs build;
    double build_R = -1.0;
    int build_m_override = -1;
    double build_c_override = -1.0;
    CLI::App* cmd_build = app.add_subcommand("build", "construct a network for a registry function");
    cmd_build->add_option("--fn", build.fn, "registry function name")->required();
    cmd_build->add_option("--d", build.d, "input dimension")->required();
    cmd_build->add_option("--r", build.r, "smoothness order (>= 1)")->required();
    cmd_build->add_option("--R", build_R, "smoothness-ball radius (default: registry value)");
    cmd_build->add_option("--eps", build.eps, "uniform error target in (0,1)")->required();
    cmd_build->add_option("--domain", build.domain, "domain half-width a for [-a,a)^d");
    cmd_build->add_option("--M-override", build_m_override, "force a grid parameter (must meet the hypothesis)");
    cmd_build->add_option("--c-override", build_c_override, "override the remainder constant");
    cmd_build->add_option("--out", build.out, "network JSON path");
    cmd_build->add_option("--report", build.report, "report JSON path (default: <out>.report.json)");

    cli::SweepArgs sweep;
    int sweep_d = -1;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "verify a network file against a registry function");
    cmd_sweep->add_option("--net", sweep.net_path, "network JSON path")->required();
    cmd_sweep->add_option("--report", sweep.report_path, "report JSON path")->required();
    cmd_sweep->add_option("--fn", sweep.fn, "registry function name")->required();
    cmd_sweep->add_option("--d", sweep_d, "function dimension (must match the network)");
    cmd_sweep->add_option("--points", sweep.points, "number of sample points");
    cmd_sweep->add_option("--seed", sweep.seed, "PRNG seed");
    cmd_sweep->add_option("--out", sweep.out, "CSV output path");

    cli::GadgetArgs gadget;
    CLI::App* cmd_gadget = app.add_subcommand("gadget", "evaluate a building-block gadget");
    cmd_gadget->add_option("name", gadget.name, "product2|product_d|identity|indicator|polynomial|bump")
        ->required();
    cmd_gadget->add_option("--d", gadget.d, "dimension");
    cmd_gadget->add_option("--M", gadget.M, "partition grid parameter (bump)");
    cmd_gadget->add_option("--kappa", gadget.kappa, "partition shift index (bump)");
    cmd_gadget->add_option("--N", gadget.N, "total degree (polynomial)");
    cmd_gadget->add_option("--s", gadget.s, "domain half-width parameter");
    cmd_gadget->add_option("--a", gadget.a, "box lower corner (indicator)");
    cmd_gadget->add_option("--b", gadget.b, "box upper corner (indicator)");
    cmd_gadget->add_option("--weights", gadget.weights, "polynomial weights, graded-lex monomial order");
    cmd_gadget->add_option("--probe", gadget.probe, "probe input values (or 'at-center' for bump)");
    cmd_gadget->add_option("--save", gadget.save, "optionally save the gadget network JSON");

    cli::SqrtArgs sq;
    CLI::App* cmd_sqrt = app.add_subcommand("sqrt", "build and verify the square-root net");
    cmd_sqrt->add_option("--t", sq.t, "domain upper end (>= 1)")->required();
    cmd_sqrt->add_option("--eps", sq.eps, "error target in (0,1)")->required();
    cmd_sqrt->add_option("--points", sq.points, "grid points on [0,t]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitInvalid;
    }

    if (cmd_build->parsed()) {
        if (build_R > 0.0) build.R = build_R;
        if (build_m_override > 0) build.m_override = build_m_override;
        if (build_c_override > 0.0) build.c_override = build_c_override;
        return cli::cmd_build(build);
    }
    if (cmd_sweep->parsed()) {
        if (sweep_d > 0) sweep.d = sweep_d;
        return cli::cmd_sweep(sweep);
    }
    if (cmd_gadget->parsed()) return cli::cmd_gadget(gadget);
    if (cmd_sqrt->parsed()) return cli::cmd_sqrt(sq);
    return cli::kExitInvalid;
}
