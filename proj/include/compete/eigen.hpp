#pragma once

#include "compete/grid.hpp"

namespace compete {

struct EigenOptions {
    double tol = 1e-8;
    int max_iterations = 1000;
};

/// Smallest eigenpair of -Delta_h + q with zero Dirichlet data.
struct EigenResult {
    double lambda1 = 0.0;
    ScalarField phi1;  // strictly positive, max value 1
    double residual = 0.0;  // ||(-Delta_h + q) phi - lambda phi||_2 / ||phi||_2
    int iterations = 0;
};

/// Inverse power iteration with the shift sigma = min(q) - 1, which keeps
/// -Delta_h + q - sigma positive definite so every inner solve is a CG solve.
/// Converged when the eigenvalue stagnates to tol (1 + |lambda|) and the
/// relative residual is at most tol.
EigenResult principal_eigenpair(const Grid& grid, const ScalarField& q,
                                const EigenOptions& options = {});
EigenResult principal_eigenpair(const Grid& grid, const EigenOptions& options = {});

/// <(-Delta_h + q) phi, phi> / <phi, phi>. Throws std::invalid_argument for
/// phi == 0.
double rayleigh_quotient(const Grid& grid, const ScalarField& q, const ScalarField& phi);

}  // namespace compete
