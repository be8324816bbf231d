#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "compete/coexist.hpp"
#include "compete/eigen.hpp"
#include "compete/growth.hpp"

namespace compete {

struct SpeciesMargin {
    int species = 0;
    double value = 0.0;   // growth rate at the probe point
    double margin = 0.0;  // signed so that margin > 0 (existence) / >= 0 (nonexistence) passes
    bool holds = false;
};

/// g_i(c_1, .., c_{i-1}, 0, c_{i+1}, .., c_N) > lambda1 for every i.
struct ExistenceCheck {
    std::vector<SpeciesMargin> species;
    bool verdict = false;
};

/// g_i(0, .., 0) <= lambda1 for some i.
struct NonexistenceCheck {
    std::vector<SpeciesMargin> species;
    bool verdict = false;
};

/// Two-species uniqueness inequality
///   4 inf(-g_u) inf(-h_v) >= R1 (sup g_v)^2 + R2 (sup h_u)^2 + 2 (sup g_v)(sup h_u)
/// with R1 = sup theta_{g(.,0)} / theta_{h(c0,.)}, R2 = sup theta_{h(0,.)} / theta_{g(.,c1)}.
struct Uniqueness2 {
    double lhs = 0.0;
    double rhs = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double inf_neg_gu = 0.0;
    double inf_neg_hv = 0.0;
    double sup_gv = 0.0;
    double sup_hu = 0.0;
    bool verdict = false;
};

struct UniquenessSpecies {
    int species = 0;
    double lhs = 0.0;  // 2 inf(-d g_i / d u_i)
    double rhs = 0.0;  // sum_{j != i} sup(-d g_i/d u_j) + K sup(-d g_j/d u_i)
    bool holds = false;
};

/// N-species uniqueness inequality with K = sup_{i != j} theta-upper_j / theta-lower_i.
struct UniquenessN {
    double k = 0.0;
    std::vector<UniquenessSpecies> species;
    bool verdict = false;
};

struct EmpiricalUniqueness {
    double maximal_minimal_gap = 0.0;
    double multistart_spread = 0.0;  // sup distance of perturbed-start solutions to the midpoint
    double gap = 0.0;                // max of the two
    int starts = 0;
    bool witnessed = false;          // gap <= 10 tol
};

struct CriterionReport {
    double lambda1 = 0.0;
    ExistenceCheck existence;
    NonexistenceCheck nonexistence;
    std::optional<Uniqueness2> uniqueness_2sp;
    std::optional<UniquenessN> uniqueness_nsp;
    Grid grid = Grid::line(1.0, 3);
    Sampling sampling;
    std::vector<double> capacities;
    std::vector<std::string> names;
};

ExistenceCheck check_existence(const GrowthModel& model, double lambda1);
NonexistenceCheck check_nonexistence(const GrowthModel& model, double lambda1);

/// sup over interior nodes of num / den. Throws RatioDegeneracyError when
/// den < 1e-14 at some node.
double theta_ratio_sup(const ScalarField& num, const ScalarField& den);

Uniqueness2 check_uniqueness_2sp(const GrowthModel& model, const CoexistencePair& pair);
UniquenessN check_uniqueness_nsp(const GrowthModel& model, const CoexistencePair& pair);

EmpiricalUniqueness verify_uniqueness_empirically(const Grid& grid, const GrowthModel& model,
                                                  const CoexistencePair& pair,
                                                  const CoexistOptions& options = {});

struct Evaluation {
    CriterionReport report;
    EigenResult eigen;
    std::optional<CoexistencePair> pair;
};

/// Computes lambda1 (q = 0) on the grid and runs every applicable check. The
/// pair is built (and the uniqueness checks evaluated) only when existence
/// holds.
Evaluation evaluate_criteria(const Grid& grid, const GrowthModel& model,
                             const CoexistOptions& options = {},
                             std::vector<std::string> names = {});
Evaluation evaluate_criteria(const Grid& grid, const GrowthModel& model, const EigenResult& eigen,
                             const CoexistOptions& options = {},
                             std::vector<std::string> names = {});

/// Frozen top-level keys: lambda1, existence, nonexistence, uniqueness_2sp,
/// uniqueness_Nsp, grid, sampling.
nlohmann::json to_json(const CriterionReport& report);
nlohmann::json grid_json(const Grid& grid);

}  // namespace compete
