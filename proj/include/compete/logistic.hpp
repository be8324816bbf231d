#pragma once

#include <optional>

#include "compete/eigen.hpp"
#include "compete/expr.hpp"
#include "compete/grid.hpp"

namespace compete {

/// Worst departures from monotonicity seen while iterating. Positive values
/// are violations; anything above the round-off slack aborts the solve.
struct MonotoneStats {
    std::size_t steps = 0;
    double worst_upper_increase = 0.0;  // max over steps of max(u^{k+1} - u^k)
    double worst_lower_decrease = 0.0;  // max over steps of max(l^k - l^{k+1})
    double worst_crossing = 0.0;        // max over steps of max(l^k - u^k)
    std::size_t newton_jumps = 0;

    void merge(const MonotoneStats& other);
};

struct LogisticOptions {
    double tol = 1e-8;            // sup-norm gap and residual target
    double inner_tol = 0.0;       // relative CG tolerance, 0 selects 1e-2 tol
    double monotone_slack = 1e-12;
    std::size_t max_iterations = 200000;
    // When the estimated number of remaining steps exceeds this, attempt a
    // Newton jump; it is accepted only if it stays inside the current bracket
    // and keeps the super/sub-solution sign.
    std::size_t newton_trigger = 500;
    bool allow_newton = true;
    EigenOptions eigen;
};

struct LogisticResult {
    bool exists = false;
    std::optional<ScalarField> theta;
    double f0 = 0.0;
    double lambda1 = 0.0;
    double margin = 0.0;  // f(0) - lambda1
    double capacity = 0.0;
    double shift = 0.0;   // M of the monotone iteration
    double epsilon = 0.0; // lower start is epsilon * phi1
    double residual = 0.0;  // sup norm of Delta_h theta + theta f(theta)
    double gap = 0.0;       // sup distance between the two monotone limits
    std::size_t iterations = 0;
    MonotoneStats stats;
};

/// Largest epsilon in {1, 1/2, 1/4, ...} (floor 1e-12) with
/// f(epsilon phi1) > lambda1 at every node; f has one variable. Throws
/// CriterionMarginError when the floor is reached.
double pick_epsilon(const Expr& f, const ScalarField& phi1, double lambda1);

/// Delta_h u + u f(u) evaluated nodewise.
ScalarField logistic_residual(const ScalarField& u, const Expr& f);

/// Positive solution of Delta_h u + u f(u) = 0 with zero boundary values, or
/// a nonexistence verdict when f(0) <= lambda1 of the grid.
LogisticResult solve_logistic(const Grid& grid, const Expr& f, const LogisticOptions& options = {});
LogisticResult solve_logistic(const Grid& grid, const Expr& f, const EigenResult& eigen,
                              const LogisticOptions& options = {});

}  // namespace compete
