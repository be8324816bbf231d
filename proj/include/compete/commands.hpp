#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "compete/config.hpp"
#include "compete/criteria.hpp"

namespace compete {

enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,        // config / validation / parse errors
    kExitCriterionNegative = 2,  // nonexistence certified or solve refused
    kExitNumerical = 3,      // solver failure
};

struct CommandOptions {
    bool force = false;
    std::optional<double> tol;
    std::optional<std::string> out_dir;
};

/// Output path for `configured`, placed under --out when given.
std::string resolve_output(const std::string& configured, const CommandOptions& opts);

/// Parses the species expressions (N = species count, config parameters as
/// constants, `overrides` replacing parameter values) and builds the model.
GrowthModel build_model(const RunConfig& config,
                        const Expr::Parameters& overrides = {});

CoexistOptions coexist_options(const RunConfig& config, const CommandOptions& opts);

/// Writes one row per node: coordinates, then `columns` (header names given).
void write_fields_csv(const std::string& path, const Grid& grid,
                      const std::vector<std::string>& names,
                      const std::vector<const ScalarField*>& columns);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, std::size_t col) const;
};
CsvTable read_csv(const std::string& path);

// Each command returns an exit code; all diagnostics go to `err`.
int cmd_eigen(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Loads the config at `path` and dispatches `command`, mapping every
/// exception onto the exit-code contract.
int run_command(const std::string& command, const std::string& path, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace compete
