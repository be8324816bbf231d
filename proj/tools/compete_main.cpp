#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "compete/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coexistence states of diffusive competition systems with Dirichlet boundaries"};
    app.require_subcommand(1);

    std::string config_path;
    bool force = false;
    double tol = 0.0;
    std::string out_dir;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration file")->required();
        sub->add_option("--tol", tol, "Override the outer tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "Directory for output files");
    };
    add_common(app.add_subcommand("eigen", "Principal Dirichlet eigenpair of -Laplacian + q"));
    add_common(app.add_subcommand("check", "Evaluate existence / nonexistence / uniqueness criteria"));
    auto* solve = app.add_subcommand("solve", "Compute the coexistence state by monotone iteration");
    add_common(solve);
    solve->add_flag("--force", force, "Iterate even when the existence criterion fails");
    add_common(app.add_subcommand("sweep", "Sweep one growth-law parameter"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : compete::kExitInvalid;
    }

    compete::CommandOptions opts;
    opts.force = force;
    if (tol > 0.0) opts.tol = tol;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    const std::string command = app.get_subcommands().front()->get_name();
    return compete::run_command(command, config_path, opts, std::cout, std::cerr);
}
