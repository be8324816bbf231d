#include "compete/coexist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

namespace {

// Delta_h self + self * g_i(self, others_j) where `others` supplies every
// competitor (its i-th entry is ignored).
ScalarField mixed_residual(const GrowthModel& model, int i, const ScalarField& self,
                           const Tuple& others) {
    const int n = model.species();
    ScalarField r = apply_laplacian(self);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < self.size(); ++k) {
        for (int j = 0; j < n; ++j) x[j] = j == i ? self[k] : others[j][k];
        r[k] += self[k] * model.eval(i, x);
    }
    return r;
}

std::vector<double> shifts_for(const GrowthModel& model) {
    std::vector<double> m;
    for (int i = 0; i < model.species(); ++i) m.push_back(model.self_slope_bound(i) + 1.0);
    return m;
}

void require_species(const GrowthModel& model, const Tuple& t, const char* what) {
    if (t.size() != static_cast<std::size_t>(model.species())) {
        throw std::invalid_argument(std::string(what) + " has the wrong number of species");
    }
}

}  // namespace

bool PairReport::holds() const {
    return std::all_of(checks.begin(), checks.end(), [](const PairCheck& c) { return c.holds; });
}

bool SandwichCertificate::holds() const {
    return std::all_of(species.begin(), species.end(),
                       [](const SandwichCheck& c) { return c.lower_ok && c.upper_ok; });
}

bool SandwichCertificate::strict() const {
    return std::all_of(species.begin(), species.end(),
                       [](const SandwichCheck& c) { return c.strict_lower && c.strict_upper; });
}

ScalarField species_residual(const GrowthModel& model, const Tuple& u, int i) {
    return mixed_residual(model, i, u.at(i), u);
}

CoexistencePair build_pair(const Grid& grid, const GrowthModel& model, const EigenResult& eigen,
                           const CoexistOptions& options) {
    const int n = model.species();
    const std::vector<double> zeros(n, 0.0);
    const std::vector<double>& caps = model.capacities();
    LogisticOptions lopt = options.logistic;
    lopt.tol = options.tol;

    CoexistencePair pair;
    for (int i = 0; i < n; ++i) {
        const Expr upper_section = model.section(i, zeros);
        const Expr lower_section = model.section(i, caps);
        LogisticResult up = solve_logistic(grid, upper_section, eigen, lopt);
        if (!up.exists) {
            std::ostringstream msg;
            msg << "species " << i + 1 << " has no positive state even without competitors: g(0) = "
                << up.f0 << " <= lambda1 = " << up.lambda1;
            throw NonexistenceError(msg.str());
        }
        LogisticResult low = solve_logistic(grid, lower_section, eigen, lopt);
        if (!low.exists) {
            std::ostringstream msg;
            msg << "lower section of species " << i + 1
                << " (competitors at capacity) has no positive state: value at 0 = " << low.f0
                << " <= lambda1 = " << low.lambda1;
            throw NonexistenceError(msg.str());
        }
        pair.stats.merge(up.stats);
        pair.stats.merge(low.stats);
        pair.uppers.push_back(std::move(*up.theta));
        pair.lowers.push_back(std::move(*low.theta));
    }
    return pair;
}

PairReport verify_pair(const GrowthModel& model, const CoexistencePair& pair, double tol) {
    require_species(model, pair.uppers, "uppers");
    require_species(model, pair.lowers, "lowers");
    PairReport report;
    for (int i = 0; i < model.species(); ++i) {
        const double slack = 10.0 * tol * (1.0 + model.rate_sup_abs(i));
        const ScalarField up = mixed_residual(model, i, pair.uppers[i], pair.lowers);
        const ScalarField low = mixed_residual(model, i, pair.lowers[i], pair.uppers);

        PairCheck cu{i, true, std::numeric_limits<double>::infinity(), 0, false};
        for (std::size_t k = 0; k < up.size(); ++k) {
            const double margin = slack - up[k];
            if (margin < cu.worst_margin) {
                cu.worst_margin = margin;
                cu.worst_node = k;
            }
        }
        cu.holds = cu.worst_margin >= 0.0;

        PairCheck cl{i, false, std::numeric_limits<double>::infinity(), 0, false};
        for (std::size_t k = 0; k < low.size(); ++k) {
            const double margin = low[k] + slack;
            if (margin < cl.worst_margin) {
                cl.worst_margin = margin;
                cl.worst_node = k;
            }
        }
        cl.holds = cl.worst_margin >= 0.0;
        report.checks.push_back(cu);
        report.checks.push_back(cl);
    }
    return report;
}

SandwichCertificate verify_sandwich(const Tuple& u, const CoexistencePair& pair, double tol) {
    if (u.size() != pair.uppers.size() || u.size() != pair.lowers.size()) {
        throw std::invalid_argument("tuple and pair have different species counts");
    }
    const double slack = 10.0 * tol;
    SandwichCertificate cert;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Grid& grid = u[i].grid();
        SandwichCheck c;
        c.worst_lower_margin = std::numeric_limits<double>::infinity();
        c.worst_upper_margin = std::numeric_limits<double>::infinity();
        double interior_lower = std::numeric_limits<double>::infinity();
        double interior_upper = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < u[i].size(); ++k) {
            const double dl = u[i][k] - pair.lowers[i][k];
            const double du = pair.uppers[i][k] - u[i][k];
            c.worst_lower_margin = std::min(c.worst_lower_margin, dl);
            c.worst_upper_margin = std::min(c.worst_upper_margin, du);
            if (grid.steps_to_boundary(k) >= 2) {
                interior_lower = std::min(interior_lower, dl);
                interior_upper = std::min(interior_upper, du);
            }
        }
        c.lower_ok = c.worst_lower_margin >= -slack;
        c.upper_ok = c.worst_upper_margin >= -slack;
        c.strict_lower = interior_lower > slack;
        c.strict_upper = interior_upper > slack;
        cert.species.push_back(c);
    }
    return cert;
}

CoexistenceResult solve_coexistence(const Grid& grid, const GrowthModel& model,
                                    const CoexistencePair& pair, const CoexistOptions& options) {
    require_species(model, pair.uppers, "uppers");
    require_species(model, pair.lowers, "lowers");
    const int n = model.species();
    const double slack = options.monotone_slack;

    CoexistenceResult out;
    out.shifts = shifts_for(model);
    std::vector<LinearOperator> ops;
    for (int i = 0; i < n; ++i) ops.emplace_back(grid, out.shifts[i]);
    SolveOptions inner;
    inner.rel_tol = options.inner_tol > 0.0 ? options.inner_tol : 1e-2 * options.tol;

    Tuple over = pair.uppers;
    Tuple under = pair.lowers;
    double previous_change = std::numeric_limits<double>::infinity();

    for (std::size_t k = 1; k <= options.max_iterations; ++k) {
        Tuple d_over, d_under;
        for (int i = 0; i < n; ++i) {
            d_over.push_back(solve_spd_or_throw(ops[i], mixed_residual(model, i, over[i], under), inner));
            d_under.push_back(solve_spd_or_throw(ops[i], mixed_residual(model, i, under[i], over), inner));
        }
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            const double inc = std::max(0.0, d_over[i].max());
            const double dec = std::max(0.0, -d_under[i].min());
            out.stats.worst_upper_increase = std::max(out.stats.worst_upper_increase, inc);
            out.stats.worst_lower_decrease = std::max(out.stats.worst_lower_decrease, dec);
            if (inc > slack || dec > slack) {
                std::ostringstream msg;
                msg << "coupled monotone iteration lost monotonicity at step " << k << ", species "
                    << i + 1 << " (upper +" << inc << ", lower -" << dec << ")";
                throw NumericalError(msg.str());
            }
            change = std::max({change, norms(d_over[i]).sup, norms(d_under[i]).sup});
            over[i] += d_over[i];
            under[i] += d_under[i];
        }
        ++out.stats.steps;
        out.iterations = k;

        double gap = 0.0;
        for (int i = 0; i < n; ++i) {
            double crossing = 0.0;
            for (std::size_t m = 0; m < over[i].size(); ++m) {
                crossing = std::max(crossing, under[i][m] - over[i][m]);
            }
            out.stats.worst_crossing = std::max(out.stats.worst_crossing, crossing);
            if (crossing > slack) throw NumericalError("increasing tuple crossed the decreasing tuple");
            gap = std::max(gap, sup_distance(over[i], under[i]));
        }
        out.maximal_minimal_gap = gap;

        const auto finish = [&](bool unique) {
            out.maximal = over;
            out.minimal = under;
            out.fields.clear();
            for (int i = 0; i < n; ++i) out.fields.push_back(0.5 * (over[i] + under[i]));
            out.residuals.clear();
            for (int i = 0; i < n; ++i) {
                out.residuals.push_back(norms(species_residual(model, out.fields, i)).sup);
            }
            out.unique_in_sector = unique;
            out.certificate = verify_sandwich(out.fields, pair, options.tol);
        };

        if (gap <= options.tol) {
            finish(true);
            const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
            if (worst <= options.tol) return out;
        }

        // Both sequences have settled yet stay apart: distinct maximal and
        // minimal states in the sector.
        const double rate = change / previous_change;
        previous_change = change;
        const double remaining = rate < 1.0 ? change * rate / (1.0 - rate) : INFINITY;
        if (change == 0.0 || (gap > options.tol && remaining < 1e-3 * options.tol &&
                              change < 1e-3 * options.tol)) {
            finish(false);
            return out;
        }
    }
    std::ostringstream msg;
    msg << "coupled monotone iteration did not converge in " << options.max_iterations
        << " steps (gap " << out.maximal_minimal_gap << ")";
    throw NumericalError(msg.str());
}

IterateResult iterate_from(const Grid& grid, const GrowthModel& model, Tuple start,
                           const CoexistOptions& options) {
    require_species(model, start, "start");
    const int n = model.species();
    const auto shifts = shifts_for(model);
    std::vector<LinearOperator> ops;
    for (int i = 0; i < n; ++i) ops.emplace_back(grid, shifts[i]);
    SolveOptions inner;
    inner.rel_tol = options.inner_tol > 0.0 ? options.inner_tol : 1e-2 * options.tol;

    IterateResult out{std::move(start), {}, 0};
    for (std::size_t k = 1; k <= options.max_iterations; ++k) {
        Tuple residuals;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            residuals.push_back(species_residual(model, out.fields, i));
            worst = std::max(worst, norms(residuals.back()).sup);
        }
        if (worst <= options.tol) {
            out.residuals.clear();
            for (const auto& r : residuals) out.residuals.push_back(norms(r).sup);
            return out;
        }
        for (int i = 0; i < n; ++i) out.fields[i] += solve_spd_or_throw(ops[i], residuals[i], inner);
        out.iterations = k;
    }
    throw NumericalError("plain shifted iteration did not converge");
}

DecayResult decay_check(const Grid& grid, const GrowthModel& model, int species, double threshold,
                        const CoexistOptions& options) {
    const int n = model.species();
    std::vector<double> zeros(n, 0.0);
    const Expr f = model.section(species, zeros);
    const LinearOperator op(grid, model.self_slope_bound(species) + 1.0);
    SolveOptions inner;
    inner.rel_tol = options.inner_tol > 0.0 ? options.inner_tol : 1e-2 * options.tol;

    DecayResult out;
    out.species = species;
    ScalarField u(grid, model.capacity(species));
    out.final_sup = norms(u).sup;
    for (std::size_t k = 1; k <= options.max_iterations && out.final_sup >= threshold; ++k) {
        u += solve_spd_or_throw(op, logistic_residual(u, f), inner);
        out.final_sup = norms(u).sup;
        out.iterations = k;
    }
    out.decayed = out.final_sup < threshold;
    return out;
}

}  // namespace compete
