#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "compete/criteria.hpp"
#include "compete/errors.hpp"

using namespace compete;

namespace {

GrowthModel lv(double a, double b, GrowthOptions o = {}) {
    const Expr::Parameters p{{"a", a}, {"b", b}};
    return GrowthModel::build({Expr::parse("a - u - b*v", 2, p), Expr::parse("a - b*u - v", 2, p)}, o);
}

GrowthModel symmetric3() {
    return GrowthModel::build({Expr::parse("12 - u1 - 0.05*u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - 0.05*u2 - u3", 3)});
}

double brute_ratio(const ScalarField& num, const ScalarField& den) {
    double r = 0.0;
    for (std::size_t k = 0; k < num.size(); ++k) r = std::max(r, num[k] / den[k]);
    return r;
}

}  // namespace

TEST_CASE("existence and nonexistence margins") {
    const Grid g = Grid::line(1.0, 200);
    const double l1 = principal_eigenpair(g).lambda1;

    const auto sym = lv(15.0, 0.1);
    const auto e = check_existence(sym, l1);
    CHECK(e.verdict);
    for (const auto& m : e.species) CHECK(m.margin == doctest::Approx(13.5 - l1));
    CHECK(e.species[0].margin == doctest::Approx(3.63).epsilon(1e-3));
    CHECK_FALSE(check_nonexistence(sym, l1).verdict);

    const auto weak = lv(10.0, 0.2);
    CHECK_FALSE(check_existence(weak, l1).verdict);
    CHECK(check_existence(weak, l1).species[0].value == doctest::Approx(8.0));

    const auto dead = lv(5.0, 0.1);
    const auto ne = check_nonexistence(dead, l1);
    CHECK(ne.verdict);
    CHECK(ne.species[0].margin == doctest::Approx(l1 - 5.0));

    // Boundary cases: existence is strict, nonexistence is not.
    const double at = e.species[0].value;
    CHECK_FALSE(check_existence(sym, at).verdict);
    CHECK(check_nonexistence(sym, 15.0).verdict);
}

TEST_CASE("theta ratios") {
    const Grid g = Grid::line(1.0, 5);
    ScalarField a(g, 2.0), b(g, 1.0);
    b[2] = 0.5;
    CHECK(theta_ratio_sup(a, b) == 4.0);
    b[4] = 1e-15;
    CHECK_THROWS_AS(theta_ratio_sup(a, b), RatioDegeneracyError);
}

TEST_CASE("two-species uniqueness on the symmetric model") {
    const Grid g = Grid::line(1.0, 200);
    const auto model = lv(15.0, 0.1);
    const auto ev = evaluate_criteria(g, model);
    REQUIRE(ev.pair);
    REQUIRE(ev.report.uniqueness_2sp);
    const auto& u = *ev.report.uniqueness_2sp;
    CHECK(u.lhs == doctest::Approx(4.0));
    CHECK(u.r1 == doctest::Approx(brute_ratio(ev.pair->uppers[0], ev.pair->lowers[1])));
    CHECK(u.r2 == doctest::Approx(brute_ratio(ev.pair->uppers[1], ev.pair->lowers[0])));
    CHECK(u.r1 == doctest::Approx(u.r2).epsilon(1e-8));
    CHECK(u.r1 >= 1.0);
    CHECK(u.r1 <= 199.0);
    CHECK(u.rhs == doctest::Approx((u.r1 + u.r2) * 0.01 + 0.02));
    CHECK(u.verdict);

    // The N-species evaluator runs on the same model and is reported too.
    REQUIRE(ev.report.uniqueness_nsp);
    const auto& n = *ev.report.uniqueness_nsp;
    CHECK(n.k == doctest::Approx(std::max(u.r1, u.r2)));
    for (const auto& s : n.species) {
        CHECK(s.lhs == doctest::Approx(2.0));
        CHECK(s.rhs == doctest::Approx(0.1 + n.k * 0.1));
    }
    CHECK(n.verdict == (2.0 > 0.1 * (1 + n.k)));

    const auto emp = verify_uniqueness_empirically(g, model, *ev.pair);
    CHECK(emp.starts == 3);
    CHECK(emp.witnessed);
    CHECK(emp.gap <= 1e-7);
}

TEST_CASE("stronger coupling is evaluated and recorded") {
    const Grid g = Grid::line(1.0, 100);
    const auto ev = evaluate_criteria(g, lv(15.0, 0.3));
    REQUIRE(ev.report.uniqueness_2sp);
    const auto& u = *ev.report.uniqueness_2sp;
    CHECK(u.rhs == doctest::Approx(u.r1 * 0.09 + u.r2 * 0.09 + 0.18));
    CHECK(u.verdict == (u.lhs >= u.rhs));
}

TEST_CASE("decoupled systems pass both uniqueness checks") {
    GrowthOptions o;
    o.allow_zero_cross_partials = true;
    const Grid g = Grid::line(1.0, 80);
    const auto model = GrowthModel::build({Expr::parse("15 - u + 0*v", 2), Expr::parse("12 - v + 0*u", 2)}, o);
    const auto ev = evaluate_criteria(g, model);
    REQUIRE(ev.report.uniqueness_2sp);
    CHECK(ev.report.uniqueness_2sp->rhs == 0.0);
    CHECK(ev.report.uniqueness_2sp->verdict);
    for (const auto& s : ev.report.uniqueness_nsp->species) CHECK(s.rhs == 0.0);
    CHECK(ev.report.uniqueness_nsp->verdict);
}

TEST_CASE("three-species uniqueness") {
    const Grid g = Grid::line(1.0, 100);
    const auto model = symmetric3();
    const auto ev = evaluate_criteria(g, model);
    CHECK(ev.report.existence.verdict);
    CHECK_FALSE(ev.report.uniqueness_2sp.has_value());
    REQUIRE(ev.report.uniqueness_nsp);
    const auto& n = *ev.report.uniqueness_nsp;
    CHECK(std::isfinite(n.k));
    for (const auto& s : n.species) {
        CHECK(s.lhs == doctest::Approx(2.0));
        CHECK(s.rhs == doctest::Approx(2 * 0.05 * (1 + n.k)));
    }
    CHECK(n.verdict == (n.k < 19.0));
    CHECK(n.verdict);
    const auto emp = verify_uniqueness_empirically(g, model, *ev.pair);
    CHECK(emp.witnessed);
}

TEST_CASE("no pair and no uniqueness without existence") {
    const Grid g = Grid::line(1.0, 50);
    const auto ev = evaluate_criteria(g, lv(5.0, 0.1));
    CHECK_FALSE(ev.pair.has_value());
    CHECK(ev.report.nonexistence.verdict);
    CHECK_FALSE(ev.report.uniqueness_2sp.has_value());
    CHECK_FALSE(ev.report.uniqueness_nsp.has_value());
    const auto j = to_json(ev.report);
    CHECK(j["uniqueness_2sp"].is_null());
    CHECK(j["uniqueness_Nsp"].is_null());
}

TEST_CASE("report keys and determinism") {
    const Grid g = Grid::line(1.0, 60);
    const auto model = lv(15.0, 0.1);
    const auto a = to_json(evaluate_criteria(g, model, {}, {"u", "v"}).report);
    const auto b = to_json(evaluate_criteria(g, model, {}, {"u", "v"}).report);
    CHECK(a.dump() == b.dump());
    std::set<std::string> keys;
    for (auto it = a.begin(); it != a.end(); ++it) keys.insert(it.key());
    CHECK(keys == std::set<std::string>{"lambda1", "existence", "nonexistence", "uniqueness_2sp",
                                        "uniqueness_Nsp", "grid", "sampling"});
    CHECK(a["existence"][0]["name"] == "u");
    CHECK(a["existence"][1]["species"] == 2);
    CHECK(a["grid"]["interior_counts"][0] == 60);
    CHECK(a["sampling"]["points_per_axis"] == 101);
    // Verdicts are re-derivable from the stored margins.
    const bool exist = a["existence"][0]["margin"].get<double>() > 0 && a["existence"][1]["margin"].get<double>() > 0;
    CHECK(exist);
    CHECK(a["uniqueness_2sp"]["verdict"].get<bool>() ==
          (a["uniqueness_2sp"]["lhs"].get<double>() >= a["uniqueness_2sp"]["rhs"].get<double>()));
}
