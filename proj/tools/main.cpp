#include <string>

#include <CLI11.hpp>

#include "psas/scenario.hpp"
#include "psas/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"psas: two-level dressed-state and interferometry simulator"};
    app.set_version_flag("--version", psas::kVersion);
    app.require_subcommand(1);

    std::string scenario_path;
    psas::Overrides overrides;
    std::string out_dir;
    std::string format;
    double tol = 0.0;

    const char* subcommands[] = {"propagate",    "dressed", "adiabaticity", "phase",
                                 "berry",        "interferogram", "sweep"};
    const char* descriptions[] = {
        "integrate the amplitude equations and emit the trajectory",
        "evaluate the dressed-state bundle and state components on a grid",
        "evaluate the generalized adiabaticity margins",
        "total/dynamical phase of a propagated scenario",
        "geometric phase of a parameter loop",
        "two-pulse interferogram (analytic or full propagation)",
        "run a 1- or 2-axis parameter sweep"};

    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        CLI::App* sub = app.add_subcommand(subcommands[i], descriptions[i]);
        sub->add_option("scenario", scenario_path, "scenario file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides the scenario)");
        sub->add_option("--format", format, "csv|json|both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--jobs", overrides.jobs, "sweep concurrency")->check(CLI::PositiveNumber);
        sub->add_option("--tol", tol, "override the integrator tolerance");
        sub->add_flag("--require-adiabatic", overrides.require_adiabatic,
                      "fail dressed runs whose grid violates the adiabaticity threshold");
    }

    CLI11_PARSE(app, argc, argv);

    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (!format.empty()) overrides.format = format;
    if (tol > 0.0) overrides.tol = tol;

    return psas::run_scenario(scenario_path, app.get_subcommands().front()->get_name(),
                              overrides);
}
