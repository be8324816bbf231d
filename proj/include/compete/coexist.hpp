#pragma once

#include <vector>

#include "compete/eigen.hpp"
#include "compete/growth.hpp"
#include "compete/logistic.hpp"

namespace compete {

using Tuple = std::vector<ScalarField>;

struct CoexistOptions {
    double tol = 1e-8;        // sup-norm residual / gap target
    double inner_tol = 0.0;   // relative CG tolerance, 0 selects 1e-2 tol
    double monotone_slack = 1e-12;
    std::size_t max_iterations = 100000;
    LogisticOptions logistic;
    EigenOptions eigen;
};

/// Upper and lower tuple for the competitive system: the upper field of
/// species i solves the logistic problem with every competitor absent, the
/// lower one with every competitor held at its carrying capacity.
struct CoexistencePair {
    Tuple uppers;
    Tuple lowers;
    MonotoneStats stats;  // merged over the 2N logistic solves
};

struct PairCheck {
    int species = 0;
    bool upper = true;  // which inequality
    double worst_margin = 0.0;  // >= 0 means the inequality holds with slack
    std::size_t worst_node = 0;
    bool holds = false;
};

struct PairReport {
    std::vector<PairCheck> checks;  // two per species: upper then lower
    bool holds() const;
};

struct SandwichCheck {
    bool lower_ok = false;
    bool upper_ok = false;
    bool strict_lower = false;  // strict away from the boundary
    bool strict_upper = false;
    double worst_lower_margin = 0.0;  // min (u - lower)
    double worst_upper_margin = 0.0;  // min (upper - u)
};

struct SandwichCertificate {
    std::vector<SandwichCheck> species;
    bool holds() const;
    bool strict() const;
};

struct CoexistenceResult {
    Tuple fields;    // midpoint of the maximal and minimal limits
    Tuple maximal;   // limit of the decreasing sequence
    Tuple minimal;   // limit of the increasing sequence
    std::vector<double> residuals;  // sup |Delta_h u_i + u_i g_i(u)| at `fields`
    std::size_t iterations = 0;
    double maximal_minimal_gap = 0.0;
    bool unique_in_sector = false;
    SandwichCertificate certificate;
    MonotoneStats stats;
    std::vector<double> shifts;
};

/// Residual Delta_h u_i + u_i g_i(u) of species i for the tuple u.
ScalarField species_residual(const GrowthModel& model, const Tuple& u, int i);

CoexistencePair build_pair(const Grid& grid, const GrowthModel& model, const EigenResult& eigen,
                           const CoexistOptions& options = {});

/// Checks, nodewise,
///   Delta_h U_i + U_i g_i(U_i, L_{j != i}) <= slack,
///   Delta_h L_i + L_i g_i(L_i, U_{j != i}) >= -slack,
/// with slack = 10 tol (1 + sup_box |g_i|).
PairReport verify_pair(const GrowthModel& model, const CoexistencePair& pair, double tol);

/// Interleaved shifted monotone iteration: the decreasing tuple starts at the
/// uppers and sees its competitors at the increasing tuple's values, and vice
/// versa. Both tuples are updated from the previous snapshot.
CoexistenceResult solve_coexistence(const Grid& grid, const GrowthModel& model,
                                    const CoexistencePair& pair, const CoexistOptions& options = {});

/// lowers - 10 tol <= u_i <= uppers + 10 tol everywhere; strictness is judged
/// on nodes at least two steps from the boundary.
SandwichCertificate verify_sandwich(const Tuple& u, const CoexistencePair& pair, double tol);

struct IterateResult {
    Tuple fields;
    std::vector<double> residuals;
    std::size_t iterations = 0;
};

/// Plain (single-sequence, Jacobi) shifted iteration of the full system from
/// an arbitrary start; no monotonicity is asserted.
IterateResult iterate_from(const Grid& grid, const GrowthModel& model, Tuple start,
                           const CoexistOptions& options = {});

struct DecayResult {
    int species = 0;
    double final_sup = 0.0;
    std::size_t iterations = 0;
    bool decayed = false;
};

/// Iterates species i alone (competitors fixed at zero) from the constant
/// start c_i and reports whether its sup norm falls below `threshold`.
DecayResult decay_check(const Grid& grid, const GrowthModel& model, int species,
                        double threshold = 1e-6, const CoexistOptions& options = {});

}  // namespace compete
