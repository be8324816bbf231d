#include "compete/eigen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "compete/errors.hpp"

namespace compete {

namespace {

ScalarField dirichlet_mode(const Grid& grid) {
    const double lx = grid.length(0);
    const double ly = grid.dim() == 2 ? grid.length(1) : 1.0;
    const int dim = grid.dim();
    return ScalarField::sample(grid, [&](double x, double y) {
        double v = std::sin(std::numbers::pi * x / lx);
        if (dim == 2) v *= std::sin(std::numbers::pi * y / ly);
        return v;
    });
}

}  // namespace

double rayleigh_quotient(const Grid& grid, const ScalarField& q, const ScalarField& phi) {
    const double mass = dot(phi, phi);
    if (mass == 0.0) throw std::invalid_argument("Rayleigh quotient of the zero field");
    const LinearOperator op(grid, 0.0, q);
    return dot(op.apply(phi), phi) / mass;
}

EigenResult principal_eigenpair(const Grid& grid, const ScalarField& q,
                                const EigenOptions& options) {
    if (!(q.grid() == grid)) throw std::invalid_argument("potential lives on a different grid");
    if (!q.all_finite()) throw ValidationError("potential has non-finite values");
    if (!(options.tol > 0.0)) throw ValidationError("eigen tolerance must be positive");

    const double sigma = q.min() - 1.0;
    ScalarField shifted = q;
    for (double& v : shifted.values()) v -= sigma;
    const LinearOperator inverse_op(grid, 0.0, shifted);
    const LinearOperator op(grid, 0.0, q);

    SolveOptions inner;
    inner.rel_tol = std::min(1e-11, 1e-3 * options.tol);

    ScalarField x = dirichlet_mode(grid);
    x *= 1.0 / std::sqrt(dot(x, x));
    double lambda = dot(op.apply(x), x);

    EigenResult result{lambda, x, 0.0, 0};
    for (int it = 1; it <= options.max_iterations; ++it) {
        // Warm start at the current eigenvector estimate scaled by 1/(lambda - sigma).
        ScalarField guess = (1.0 / (lambda - sigma)) * x;
        ScalarField y = solve_spd_or_throw(inverse_op, x, inner, &guess);
        y *= 1.0 / std::sqrt(dot(y, y));
        const ScalarField ay = op.apply(y);
        const double next = dot(ay, y);
        ScalarField r = ay;
        r -= next * y;
        const double residual = std::sqrt(dot(r, r));
        const double change = std::fabs(next - lambda);
        lambda = next;
        x = std::move(y);
        result.iterations = it;
        result.residual = residual;
        if (change <= options.tol * (1.0 + std::fabs(lambda)) && residual <= options.tol) break;
        if (it == options.max_iterations) {
            std::ostringstream msg;
            msg << "inverse power iteration did not converge in " << it
                << " iterations (residual " << residual << ")";
            throw NumericalError(msg.str());
        }
    }

    double sum = 0.0;
    for (double v : x.values()) sum += v;
    if (sum < 0.0) x *= -1.0;
    x *= 1.0 / x.max();
    if (!(x.min() > 0.0)) {
        throw NumericalError("principal eigenfunction is not strictly positive");
    }
    result.lambda1 = rayleigh_quotient(grid, q, x);
    result.phi1 = std::move(x);
    return result;
}

EigenResult principal_eigenpair(const Grid& grid, const EigenOptions& options) {
    return principal_eigenpair(grid, ScalarField(grid), options);
}

}  // namespace compete
