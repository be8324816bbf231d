#include "compete/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "compete/errors.hpp"

namespace compete {

ExistenceCheck check_existence(const GrowthModel& model, double lambda1) {
    ExistenceCheck out;
    out.verdict = true;
    for (int i = 0; i < model.species(); ++i) {
        std::vector<double> x = model.capacities();
        x[i] = 0.0;
        SpeciesMargin m;
        m.species = i;
        m.value = model.eval(i, x);
        m.margin = m.value - lambda1;
        m.holds = m.margin > 0.0;
        out.verdict = out.verdict && m.holds;
        out.species.push_back(m);
    }
    return out;
}

NonexistenceCheck check_nonexistence(const GrowthModel& model, double lambda1) {
    NonexistenceCheck out;
    const std::vector<double> zeros(model.species(), 0.0);
    for (int i = 0; i < model.species(); ++i) {
        SpeciesMargin m;
        m.species = i;
        m.value = model.eval(i, zeros);
        m.margin = lambda1 - m.value;
        m.holds = m.margin >= 0.0;
        out.verdict = out.verdict || m.holds;
        out.species.push_back(m);
    }
    return out;
}

double theta_ratio_sup(const ScalarField& num, const ScalarField& den) {
    double sup = 0.0;
    for (std::size_t k = 0; k < num.size(); ++k) {
        if (den[k] < 1e-14) {
            const auto x = den.grid().coords(k);
            std::ostringstream msg;
            msg << "theta ratio denominator " << den[k] << " below 1e-14 at interior node (" << x[0];
            if (den.grid().dim() == 2) msg << ", " << x[1];
            msg << "); refine the grid";
            throw RatioDegeneracyError(msg.str());
        }
        sup = std::max(sup, num[k] / den[k]);
    }
    return sup;
}

Uniqueness2 check_uniqueness_2sp(const GrowthModel& model, const CoexistencePair& pair) {
    if (model.species() != 2) throw std::invalid_argument("two-species criterion needs N = 2");
    Uniqueness2 u;
    u.inf_neg_gu = -model.partial_bounds(0, 0).sup;
    u.inf_neg_hv = -model.partial_bounds(1, 1).sup;
    u.sup_gv = model.partial_bounds(0, 1).sup;
    u.sup_hu = model.partial_bounds(1, 0).sup;
    u.r1 = theta_ratio_sup(pair.uppers[0], pair.lowers[1]);
    u.r2 = theta_ratio_sup(pair.uppers[1], pair.lowers[0]);
    u.lhs = 4.0 * u.inf_neg_gu * u.inf_neg_hv;
    u.rhs = u.r1 * u.sup_gv * u.sup_gv + u.r2 * u.sup_hu * u.sup_hu + 2.0 * u.sup_gv * u.sup_hu;
    u.verdict = u.lhs >= u.rhs;
    return u;
}

UniquenessN check_uniqueness_nsp(const GrowthModel& model, const CoexistencePair& pair) {
    const int n = model.species();
    UniquenessN u;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) u.k = std::max(u.k, theta_ratio_sup(pair.uppers[j], pair.lowers[i]));
        }
    }
    u.verdict = true;
    for (int i = 0; i < n; ++i) {
        UniquenessSpecies s;
        s.species = i;
        s.lhs = 2.0 * -model.partial_bounds(i, i).sup;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            s.rhs += -model.partial_bounds(i, j).inf + u.k * -model.partial_bounds(j, i).inf;
        }
        s.holds = s.lhs > s.rhs;
        u.verdict = u.verdict && s.holds;
        u.species.push_back(s);
    }
    return u;
}

EmpiricalUniqueness verify_uniqueness_empirically(const Grid& grid, const GrowthModel& model,
                                                  const CoexistencePair& pair,
                                                  const CoexistOptions& options) {
    const CoexistenceResult base = solve_coexistence(grid, model, pair, options);
    EmpiricalUniqueness out;
    out.maximal_minimal_gap = base.maximal_minimal_gap;

    // Perturbed interior starts: species-dependent blends of the pair, so the
    // starts are asymmetric even for symmetric models.
    const int n = model.species();
    constexpr double blends[3][3] = {{0.2, 0.8, 0.5}, {0.7, 0.3, 0.9}, {0.45, 0.95, 0.1}};
    for (int s = 0; s < 3; ++s) {
        Tuple start;
        for (int i = 0; i < n; ++i) {
            const double t = blends[s][i % 3];
            start.push_back(pair.lowers[i] + t * (pair.uppers[i] - pair.lowers[i]));
        }
        const IterateResult r = iterate_from(grid, model, std::move(start), options);
        for (int i = 0; i < n; ++i) {
            out.multistart_spread = std::max(out.multistart_spread, sup_distance(r.fields[i], base.fields[i]));
        }
        ++out.starts;
    }
    out.gap = std::max(out.maximal_minimal_gap, out.multistart_spread);
    out.witnessed = out.gap <= 10.0 * options.tol;
    return out;
}

Evaluation evaluate_criteria(const Grid& grid, const GrowthModel& model,
                             const CoexistOptions& options, std::vector<std::string> names) {
    return evaluate_criteria(grid, model, principal_eigenpair(grid, options.eigen), options,
                             std::move(names));
}

Evaluation evaluate_criteria(const Grid& grid, const GrowthModel& model, const EigenResult& eigen,
                             const CoexistOptions& options, std::vector<std::string> names) {
    Evaluation ev{CriterionReport{}, eigen, std::nullopt};
    CriterionReport& r = ev.report;
    r.lambda1 = ev.eigen.lambda1;
    r.grid = grid;
    r.sampling = model.sampling();
    r.capacities = model.capacities();
    r.names = std::move(names);
    r.existence = check_existence(model, r.lambda1);
    r.nonexistence = check_nonexistence(model, r.lambda1);
    if (r.existence.verdict) {
        ev.pair = build_pair(grid, model, ev.eigen, options);
        if (model.species() == 2) r.uniqueness_2sp = check_uniqueness_2sp(model, *ev.pair);
        r.uniqueness_nsp = check_uniqueness_nsp(model, *ev.pair);
    }
    return ev;
}

nlohmann::json grid_json(const Grid& grid) {
    nlohmann::json lengths = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    nlohmann::json spacings = nlohmann::json::array();
    for (int a = 0; a < grid.dim(); ++a) {
        lengths.push_back(grid.length(a));
        counts.push_back(grid.count(a));
        spacings.push_back(grid.spacing(a));
    }
    return {{"dim", grid.dim()}, {"lengths", lengths}, {"interior_counts", counts}, {"spacings", spacings}};
}

namespace {

nlohmann::json margins_json(const std::vector<SpeciesMargin>& ms, const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : ms) {
        nlohmann::json e = {{"species", m.species + 1}, {"value", m.value}, {"margin", m.margin},
                            {"holds", m.holds}};
        if (static_cast<std::size_t>(m.species) < names.size()) e["name"] = names[m.species];
        arr.push_back(std::move(e));
    }
    return arr;
}

}  // namespace

nlohmann::json to_json(const CriterionReport& r) {
    nlohmann::json j;
    j["lambda1"] = r.lambda1;
    j["existence"] = margins_json(r.existence.species, r.names);
    j["nonexistence"] = margins_json(r.nonexistence.species, r.names);
    if (r.uniqueness_2sp) {
        const auto& u = *r.uniqueness_2sp;
        j["uniqueness_2sp"] = {{"lhs", u.lhs},
                               {"rhs", u.rhs},
                               {"margin", u.lhs - u.rhs},
                               {"R1", u.r1},
                               {"R2", u.r2},
                               {"inf_neg_dg1_du1", u.inf_neg_gu},
                               {"inf_neg_dg2_du2", u.inf_neg_hv},
                               {"sup_dg1_du2", u.sup_gv},
                               {"sup_dg2_du1", u.sup_hu},
                               {"verdict", u.verdict}};
    } else {
        j["uniqueness_2sp"] = nullptr;
    }
    if (r.uniqueness_nsp) {
        const auto& u = *r.uniqueness_nsp;
        nlohmann::json per = nlohmann::json::array();
        for (const auto& s : u.species) {
            per.push_back({{"species", s.species + 1}, {"lhs", s.lhs}, {"rhs", s.rhs},
                           {"margin", s.lhs - s.rhs}, {"holds", s.holds}});
        }
        j["uniqueness_Nsp"] = {{"K", u.k}, {"species", per}, {"verdict", u.verdict}};
    } else {
        j["uniqueness_Nsp"] = nullptr;
    }
    j["grid"] = grid_json(r.grid);
    j["sampling"] = {{"method", r.sampling.method},
                     {"points_per_axis", r.sampling.points_per_axis},
                     {"samples", r.sampling.samples},
                     {"seed", r.sampling.seed},
                     {"box", r.capacities},
                     {"monotonicity_scope", "capacity box"},
                     {"ratio_evaluation", "sup over interior nodes"}};
    return j;
}

}  // namespace compete
