#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compete/grid.hpp"

namespace compete {

/// Run configuration read from a line-based file:
///
///   [domain]      dim, lengths, interior_counts, potential
///   [parameters]  name = value  (named constants usable in growth laws)
///   [species.<n>] growth = "<expression>"
///   [solver]      tol_outer, tol_inner, max_iter
///   [outputs]     fields_path, report_path, table_path
///   [sweep]       parameter, from, to, step
///
/// '#' starts a comment; strings may be double-quoted; lists are comma
/// separated.
struct RunConfig {
    struct Domain {
        int dim = 1;
        std::vector<double> lengths{1.0};
        std::vector<int> interior_counts{200};
        double potential = 0.0;
    };
    struct Species {
        std::string name;
        std::string growth;
    };
    struct Solver {
        double tol_outer = 1e-8;
        double tol_inner = 0.0;  // 0 selects 1e-2 tol_outer
        std::size_t max_iter = 100000;
    };
    struct Outputs {
        std::string fields_path = "fields.csv";
        std::string report_path = "report.json";
        std::string table_path = "sweep.csv";
    };
    struct Sweep {
        std::string parameter;
        double from = 0.0;
        double to = 0.0;
        double step = 1.0;
    };

    Domain domain;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<Species> species;
    Solver solver;
    Outputs outputs;
    std::optional<Sweep> sweep;

    Grid grid() const;
};

/// Throws ValidationError (with the offending line number) on malformed
/// input or violated invariants.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Counts >= 3, positive tolerances and lengths, nonempty distinct species
/// names, a well-formed sweep.
void validate_config(const RunConfig& config);

/// Parameter values of the sweep, from..to inclusive (empty when from > to).
std::vector<double> sweep_values(const RunConfig::Sweep& sweep);

}  // namespace compete
