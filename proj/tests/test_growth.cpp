#include "doctest.h"

#include <cmath>
#include <random>

#include "compete/errors.hpp"
#include "compete/growth.hpp"

using namespace compete;

namespace {

GrowthModel two(const char* g, const char* h, GrowthOptions o = {}) {
    return GrowthModel::build({Expr::parse(g, 2), Expr::parse(h, 2)}, o);
}

GrowthModel symmetric3() {
    return GrowthModel::build({Expr::parse("12 - u1 - 0.05*u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - u2 - 0.05*u3", 3),
                               Expr::parse("12 - 0.05*u1 - 0.05*u2 - u3", 3)});
}

}  // namespace

TEST_CASE("carrying capacity") {
    CHECK(carrying_capacity(Expr::parse("15 - u", 1), 0) == doctest::Approx(15.0).epsilon(1e-10));
    CHECK(std::fabs(carrying_capacity(Expr::parse("10 - u^2", 1), 0) - std::sqrt(10.0)) < 1e-8);
    CHECK_THROWS_AS(carrying_capacity(Expr::parse("1 + u", 1), 0), ValidationError);
    CHECK(carrying_capacity(Expr::parse("-1 - u", 1), 0) == 0.0);
    // Capacity of species 2 ignores the other density.
    CHECK(carrying_capacity(Expr::parse("7 - 0.5*u - 2*v", 2), 1) == doctest::Approx(3.5).epsilon(1e-10));
    // Affine laws: closed-form root a / b.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> a(0.5, 50.0), b(0.1, 5.0);
    for (int k = 0; k < 50; ++k) {
        const double av = a(rng), bv = b(rng);
        const Expr e = Expr::parse("a - b*u", 1, {{"a", av}, {"b", bv}});
        CHECK(std::fabs(carrying_capacity(e, 0) - av / bv) <= 1e-10 * (av / bv));
    }
}

TEST_CASE("symmetric two-species Lotka-Volterra model") {
    const auto m = two("15 - u - 0.1*v", "15 - 0.1*u - v");
    CHECK(m.species() == 2);
    CHECK(m.capacity(0) == doctest::Approx(15.0));
    CHECK(m.capacity(1) == doctest::Approx(15.0));
    CHECK(m.valid());
    CHECK(m.violations().empty());
    CHECK(m.partial_bounds(0, 0).inf == doctest::Approx(-1.0));
    CHECK(m.partial_bounds(0, 0).sup == doctest::Approx(-1.0));
    CHECK(m.partial_bounds(0, 1).sup == doctest::Approx(-0.1));
    CHECK(m.partial_bounds(1, 0).sup == doctest::Approx(-0.1));
    CHECK(m.sampling().method == "tensor-grid");
    CHECK(m.sampling().points_per_axis == 101);
    CHECK(m.sampling().samples == 101u * 101u);
    // sup |g + u g_u| = sup |15 - 2u - 0.1 v| on [0,15]^2, reached at (15, 15).
    CHECK(m.self_slope_bound(0) == doctest::Approx(16.5));
    CHECK(m.rate_sup_abs(0) == doctest::Approx(15.0));
}

TEST_CASE("monotonicity violation reports a witness") {
    CHECK_THROWS_AS(two("15 - u + 0.1*v", "15 - 0.1*u - v"), ValidationError);
    GrowthOptions o;
    o.throw_on_violation = false;
    const auto m = two("15 - u + 0.1*v", "15 - 0.1*u - v", o);
    CHECK_FALSE(m.monotone());
    CHECK_FALSE(m.valid());
    REQUIRE(m.violations().size() == 1);
    const auto& v = m.violations().front();
    CHECK(v.condition == "monotonicity");
    CHECK(v.species == 0);
    CHECK(v.other == 1);
    CHECK(v.value == doctest::Approx(0.1));
    REQUIRE(v.witness.size() == 2);
    CHECK(m.partial(0, 1).eval(v.witness) > 0.0);
    CHECK(v.describe().find("monotonicity") != std::string::npos);
}

TEST_CASE("zero cross partials need the explicit opt-in") {
    CHECK_THROWS_AS(two("10 - u + 0*v", "10 - v + 0*u"), ValidationError);
    GrowthOptions o;
    o.allow_zero_cross_partials = true;
    const auto m = two("10 - u + 0*v", "10 - v + 0*u", o);
    CHECK(m.valid());
    // Self-limitation must stay strict.
    CHECK_THROWS_AS(two("10 + 0*u - v", "10 - v - u", o), ValidationError);
}

TEST_CASE("capacity condition beyond c_i") {
    GrowthOptions o;
    o.throw_on_violation = false;
    o.allow_zero_cross_partials = true;
    // (2 - u)(3 - u) has c = 2 but turns positive again past 3 < 2c.
    const auto m = GrowthModel::build({Expr::parse("(2 - u)*(3 - u) - v", 2), Expr::parse("1 - v - u", 2)}, o);
    CHECK_FALSE(m.capacity_condition());
    bool found = false;
    for (const auto& v : m.violations()) found = found || v.condition == "capacity";
    CHECK(found);
}

TEST_CASE("partial bounds on a bilinear law") {
    GrowthOptions o;
    o.allow_zero_cross_partials = true;
    const auto m = two("15 - u - 0.1*u*v", "15 - 0.1*u - v", o);
    CHECK(m.capacity(0) == doctest::Approx(15.0));
    CHECK(-m.partial_bounds(0, 0).sup == doctest::Approx(1.0));  // inf(-g_u), at v = 0
    CHECK(-m.partial_bounds(0, 0).inf == doctest::Approx(2.5));  // sup(-g_u), at v = 15

    // Brackets every sampled value.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> s(0.0, 15.0);
    for (int k = 0; k < 500; ++k) {
        const double x[] = {s(rng), s(rng)};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double d = m.partial(i, j).eval(x);
                CHECK(d >= m.partial_bounds(i, j).inf - 1e-12);
                CHECK(d <= m.partial_bounds(i, j).sup + 1e-12);
            }
        }
    }
}

TEST_CASE("three-species symmetric model") {
    const auto m = symmetric3();
    for (int i = 0; i < 3; ++i) {
        CHECK(m.capacity(i) == doctest::Approx(12.0));
        CHECK(-m.partial_bounds(i, i).sup == doctest::Approx(1.0));
        for (int j = 0; j < 3; ++j) {
            if (j != i) CHECK(-m.partial_bounds(i, j).inf == doctest::Approx(0.05));
        }
    }
    CHECK(m.valid());
    CHECK(m.sampling().samples == 101u * 101u * 101u);
}

TEST_CASE("latin hypercube sampling for four species") {
    std::vector<Expr> rates;
    for (int i = 0; i < 4; ++i) {
        std::string s = "10";
        for (int j = 0; j < 4; ++j) s += (i == j ? " - u" : " - 0.1*u") + std::to_string(j + 1);
        rates.push_back(Expr::parse(s, 4));
    }
    GrowthOptions o;
    o.lhs_samples = 5000;
    const auto a = GrowthModel::build(rates, o);
    CHECK(a.sampling().method == "latin-hypercube");
    CHECK(a.sampling().samples == 5000u + 16u);
    CHECK(a.valid());
    // |10 - 2 u1 - 0.1 (u2 + u3 + u4)| peaks at the far corner: 13.
    CHECK(a.self_slope_bound(0) == doctest::Approx(13.0));
    const auto b = GrowthModel::build(rates, o);
    CHECK(a.self_slope_bound(2) == b.self_slope_bound(2));
    CHECK(a.rate_sup_abs(3) == b.rate_sup_abs(3));
}

TEST_CASE("build rejects mismatched variable counts") {
    CHECK_THROWS_AS(GrowthModel::build({Expr::parse("1 - u", 1), Expr::parse("1 - v", 2)}), ValidationError);
    CHECK_THROWS_AS(GrowthModel::build({}), ValidationError);
}
