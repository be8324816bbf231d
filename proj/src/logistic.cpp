#include "compete/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compete/errors.hpp"
#include "compete/growth.hpp"

namespace compete {

namespace {

double max_of(const ScalarField& f) { return f.max(); }

// Damped Newton on Delta_h u + u f(u) = 0 starting at `start`. Once the
// residual is below `target` it keeps polishing while that still pays off
// (near the bifurcation a small residual alone pins u down poorly). Returns
// nothing when the target is never reached.
std::optional<ScalarField> newton_polish(const ScalarField& start, const Expr& f, const Expr& df,
                                         double target, const SolveOptions& inner) {
    const Grid& grid = start.grid();
    ScalarField u = start;
    ScalarField r = logistic_residual(u, f);
    double r_sup = norms(r).sup;
    int extra = 0;
    for (int it = 0; it < 60; ++it) {
        if (r_sup <= target && ++extra > 4) return u;
        ScalarField potential(grid);
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double s = u[k];
            potential[k] = -(f.eval({s}) + s * df.eval({s}));
        }
        const LinearOperator jacobian(grid, 0.0, std::move(potential));
        std::optional<SolveResult> step;
        try {
            step = solve_spd(jacobian, r, inner);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
        // An inexact step is fine as long as the damped update still lowers
        // the residual; the Jacobian is close to singular near the bifurcation.
        if (!step->converged && !(step->relative_residual < 0.1)) break;
        double t = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            ScalarField trial = u;
            for (std::size_t k = 0; k < u.size(); ++k) trial[k] += t * step->solution[k];
            ScalarField trial_r(grid);
            try {
                trial_r = logistic_residual(trial, f);
            } catch (const DomainError&) {
                continue;
            }
            const double trial_sup = norms(trial_r).sup;
            if (trial_sup < r_sup) {
                u = std::move(trial);
                r = std::move(trial_r);
                r_sup = trial_sup;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return r_sup <= target ? std::optional<ScalarField>(u) : std::nullopt;
}

bool within(const ScalarField& lo, const ScalarField& w, const ScalarField& hi, double slack) {
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] < lo[k] - slack || w[k] > hi[k] + slack) return false;
    }
    return true;
}

}  // namespace

void MonotoneStats::merge(const MonotoneStats& o) {
    steps += o.steps;
    worst_upper_increase = std::max(worst_upper_increase, o.worst_upper_increase);
    worst_lower_decrease = std::max(worst_lower_decrease, o.worst_lower_decrease);
    worst_crossing = std::max(worst_crossing, o.worst_crossing);
    newton_jumps += o.newton_jumps;
}

double pick_epsilon(const Expr& f, const ScalarField& phi1, double lambda1) {
    if (f.num_vars() != 1) throw std::invalid_argument("pick_epsilon expects a one-variable section");
    for (double eps = 1.0; eps >= 1e-12; eps *= 0.5) {
        bool ok = true;
        for (double p : phi1.values()) {
            if (!(f.eval({eps * p}) > lambda1)) {
                ok = false;
                break;
            }
        }
        if (ok) return eps;
    }
    std::ostringstream msg;
    msg.precision(12);
    msg << "no epsilon >= 1e-12 gives f(epsilon phi1) > lambda1 = " << lambda1
        << " (f(0) = " << f.eval({0.0}) << "); margin too small to certify";
    throw CriterionMarginError(msg.str());
}

ScalarField logistic_residual(const ScalarField& u, const Expr& f) {
    ScalarField r = apply_laplacian(u);
    for (std::size_t k = 0; k < u.size(); ++k) r[k] += u[k] * f.eval({u[k]});
    return r;
}

LogisticResult solve_logistic(const Grid& grid, const Expr& f, const LogisticOptions& options) {
    return solve_logistic(grid, f, principal_eigenpair(grid, options.eigen), options);
}

LogisticResult solve_logistic(const Grid& grid, const Expr& f, const EigenResult& eigen,
                              const LogisticOptions& options) {
    if (f.num_vars() != 1) throw std::invalid_argument("logistic nonlinearity must have one variable");
    if (!(options.tol > 0.0)) throw ValidationError("logistic tolerance must be positive");

    LogisticResult out;
    out.f0 = f.eval({0.0});
    out.lambda1 = eigen.lambda1;
    out.margin = out.f0 - eigen.lambda1;
    if (out.f0 <= eigen.lambda1) {
        out.exists = false;
        return out;
    }

    GrowthOptions gopt;
    gopt.points_per_axis = 1001;
    const GrowthModel section = GrowthModel::build({f}, gopt);
    out.capacity = section.capacity(0);
    out.shift = section.self_slope_bound(0) + 1.0;
    out.epsilon = pick_epsilon(f, eigen.phi1, eigen.lambda1);

    const double slack = options.monotone_slack;
    SolveOptions inner;
    inner.rel_tol = options.inner_tol > 0.0 ? options.inner_tol : 1e-2 * options.tol;
    const LinearOperator op(grid, out.shift);
    const Expr df = f.derivative(0);

    ScalarField upper(grid, out.capacity);
    ScalarField lower = out.epsilon * eigen.phi1;

    double previous_gap = std::numeric_limits<double>::infinity();
    std::size_t last_newton = 0;
    ScalarField du_prev(grid), dl_prev(grid);
    double du_prev_norm = 0.0, dl_prev_norm = 0.0, du_ratio = 0.0, dl_ratio = 0.0;
    for (std::size_t k = 1; k <= options.max_iterations; ++k) {
        // u^{k+1} = (-Delta_h + M)^{-1} (M u^k + u^k f(u^k)), written as an
        // increment so that CG error is relative to the (shrinking) update.
        // Successive increments line up with a slowly decaying mode, so the
        // previous one scaled by its last contraction is a good CG start.
        const ScalarField du_guess = du_ratio * du_prev;
        const ScalarField dl_guess = dl_ratio * dl_prev;
        const ScalarField du = solve_spd_or_throw(op, logistic_residual(upper, f), inner, &du_guess);
        const ScalarField dl = solve_spd_or_throw(op, logistic_residual(lower, f), inner, &dl_guess);
        const double du_norm = norms(du).sup, dl_norm = norms(dl).sup;
        du_ratio = du_prev_norm > 0.0 ? std::min(1.0, du_norm / du_prev_norm) : 0.0;
        dl_ratio = dl_prev_norm > 0.0 ? std::min(1.0, dl_norm / dl_prev_norm) : 0.0;
        du_prev = du;
        dl_prev = dl;
        du_prev_norm = du_norm;
        dl_prev_norm = dl_norm;
        const double up_increase = std::max(0.0, max_of(du));
        const double low_decrease = std::max(0.0, -dl.min());
        out.stats.worst_upper_increase = std::max(out.stats.worst_upper_increase, up_increase);
        out.stats.worst_lower_decrease = std::max(out.stats.worst_lower_decrease, low_decrease);
        if (up_increase > slack || low_decrease > slack) {
            std::ostringstream msg;
            msg << "monotone iteration lost monotonicity at step " << k << " (upper +"
                << up_increase << ", lower -" << low_decrease << "); shift M = " << out.shift;
            throw NumericalError(msg.str());
        }
        upper += du;
        lower += dl;
        ++out.stats.steps;
        out.iterations = k;

        double crossing = 0.0;
        for (std::size_t n = 0; n < upper.size(); ++n) crossing = std::max(crossing, lower[n] - upper[n]);
        out.stats.worst_crossing = std::max(out.stats.worst_crossing, crossing);
        if (crossing > slack) throw NumericalError("lower iterate rose above upper iterate");

        const double gap = sup_distance(upper, lower);
        out.gap = gap;
        if (gap <= options.tol) {
            ScalarField theta = 0.5 * (upper + lower);
            const double res = norms(logistic_residual(theta, f)).sup;
            if (res <= options.tol) {
                out.residual = res;
                out.theta = std::move(theta);
                out.exists = true;
                return out;
            }
        }
        const double change = std::max(norms(du).sup, norms(dl).sup);
        if (change == 0.0) {
            throw NumericalError("monotone iteration stagnated with a nonzero gap");
        }

        // Slow contraction (near the bifurcation): try a guarded Newton jump.
        const double rate = gap / previous_gap;
        previous_gap = gap;
        const bool slow = rate >= 1.0 ||
                          std::log(options.tol / gap) / std::log(rate) > double(options.newton_trigger);
        if (options.allow_newton && slow && k >= 10 && k - last_newton >= 50) {
            last_newton = k;
            // The Jacobian is nearly singular here, so ask for a loose inexact
            // Newton step and give CG room; the residual check below decides.
            SolveOptions newton_inner;
            newton_inner.rel_tol = 1e-8;
            newton_inner.max_iter = 20 * grid.size();
            // Accept only a candidate whose residual is so small that a further
            // monotone step from it moves no node by more than half the slack
            // (|step| <= |residual| / M by the maximum principle). It then
            // serves as both the upper and the lower iterate.
            const double jump_tol = std::min(0.1 * options.tol, 0.5 * slack * out.shift);
            auto candidate = newton_polish(upper, f, df, jump_tol, newton_inner);
            if (candidate && within(lower, *candidate, upper, slack) &&
                norms(logistic_residual(*candidate, f)).sup <= jump_tol) {
                upper = *candidate;
                lower = std::move(*candidate);
                ++out.stats.newton_jumps;
                du_ratio = dl_ratio = 0.0;
            }
        }
    }
    std::ostringstream msg;
    msg << "logistic monotone iteration did not converge in " << options.max_iterations
        << " steps (gap " << out.gap << ")";
    throw NumericalError(msg.str());
}

}  // namespace compete
