#include <doctest.h>

#include "mspec/levels.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace mspec;

namespace {

Monomial M(const char* s) { return parse_monomial(s); }

Model model(const Matrix& A, std::set<int> zeros = {}) {
    PointPattern p;
    p.zero_blocks = std::move(zeros);
    return Model::make(Deformation::make(A), p);
}

const Matrix kNormal{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}};
const Matrix kFourRows{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}};
const Matrix kFiveRows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
const Matrix kNonStrict{{1, 0, 0}, {0, 1, 0}, {1, 1, 1}, {1, 1, 0}, {0, 1, 1}};

using Oracle = std::function<double(double, double, double)>;

// hand-written closed forms, evaluated independently of the expression engine
std::vector<Oracle> four_rows_oracle() {
    auto mx = [](double a, double b, double) { return std::max(a, b); };
    return {
        [=](double a, double b, double c) { return a / mx(a, b, c); },
        [=](double a, double b, double c) { return b / mx(a, b, c); },
        [=](double a, double b, double c) { return c * mx(a, b, c) / (a * b); },
        mx,
    };
}

std::vector<Oracle> five_rows_oracle() {
    auto r5 = [](double, double b, double c) { return std::max(b, c); };
    auto r4 = [=](double a, double b, double c) { return std::max(a, c / r5(a, b, c)); };
    return {
        [=](double a, double b, double c) { return a / r4(a, b, c); },
        [=](double a, double b, double c) { return b / r5(a, b, c); },
        [=](double a, double b, double c) { return c / std::max(a * r5(a, b, c), c); },
        r4,
        r5,
    };
}

std::vector<Oracle> non_strict_oracle() {
    return {
        [](double a, double b, double c) { return 1 / std::max(1.0, b / (a * c)); },
        [](double a, double b, double c) { return 1 / std::max(1.0, a * c / b); },
        [](double, double, double) { return 1.0; },
        [](double a, double b, double c) { return std::max(a, b / c); },
        [](double, double, double c) { return c; },
    };
}

void check_against(const LevelFamily& fam, const std::vector<Oracle>& oracle) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    REQUIRE(int(oracle.size()) == fam.ell);
    for (int s = 0; s < 50; ++s) {
        std::vector<double> t{std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
        for (int j = 1; j <= fam.ell; ++j) {
            double want = oracle[size_t(j - 1)](t[0], t[1], t[2]);
            CHECK(evaluate_level(fam.rho(j), t) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

}  // namespace

TEST_CASE("sol eliminates one lambda") {
    CHECK(sol_lambda(M("t1/l4"), 4) == LevelExpr(M("t1")));
    CHECK(sol_lambda(M("t3/(l4*l5)"), 4) == LevelExpr(M("t3/l5")));
    CHECK(sol_lambda(M("l2^-1"), 2).is_one());
    CHECK(sol_lambda(M("t1/l4^2"), 4) == LevelExpr(M("t1^(1/2)")));
    CHECK_THROWS_AS(sol_lambda(M("t1*l4"), 4), InputError);
    CHECK_THROWS_AS(sol_lambda(M("t1"), 4), InputError);
}

TEST_CASE("expression normal form") {
    LevelExpr a(M("t1")), b(M("t2"));
    CHECK(LevelExpr::max_of({a}) == a);
    CHECK(LevelExpr::max_of({a, b, a}).children().size() == 2);
    CHECK(LevelExpr::max_of({LevelExpr::max_of({a, b}), a}) == LevelExpr::max_of({b, a}));
    auto p = LevelExpr::prod({a, LevelExpr::prod({b, LevelExpr(M("t3"))})});
    CHECK(p == LevelExpr(M("t1*t2*t3")));
    auto mx = LevelExpr::max_of({a, b});
    CHECK(LevelExpr::prod({mx, LevelExpr::pow(mx, -1)}).is_one());
    CHECK(LevelExpr::pow(mx, 2) == LevelExpr::max_of({LevelExpr(M("t1^2")), LevelExpr(M("t2^2"))}));
    CHECK(LevelExpr::pow(LevelExpr::pow(mx, -1), -1) == mx);
    CHECK(LevelExpr::prod({a, LevelExpr::pow(mx, -1)}).str() == "t1 / max(t1, t2)");
    CHECK(LevelExpr::prod({LevelExpr(M("t3/(t1*t2)")), mx}).str() == "t3 * max(t1, t2) / (t1*t2)");
    CHECK_THROWS(LevelExpr::min_of({}));
    // json round trip
    auto e = LevelExpr::prod({LevelExpr(M("t3")), LevelExpr::pow(LevelExpr::min_of({a, b}), -1)});
    CHECK(level_from_json(to_json(e)) == e);
}

TEST_CASE("normal type: level functions are the inverse map") {
    auto fam = build_levels(model(kNormal));
    CHECK(fam.rho(1) == LevelExpr(M("t1")));
    CHECK(fam.rho(2) == LevelExpr(M("t2")));
    CHECK(fam.rho(3) == LevelExpr(M("t3/(t1*t2)")));
    CHECK(fam.rho_stages.empty());
    CHECK(evaluate_level(fam.rho(3), {2, 3, 12}) == doctest::Approx(2));
}

TEST_CASE("one extra action") {
    auto md = model(kFourRows);
    auto fam = build_levels(md);
    CHECK(fam.lower_sets.at(4) == GenSet{{M("t1/l4"), Value::zero()}, {M("t2/l4"), Value::zero()}});
    CHECK(fam.rho_stages.at(4).str() == "max(t1, t2)");
    CHECK(fam.rho(1).str() == "t1 / max(t1, t2)");
    CHECK(fam.rho(2).str() == "t2 / max(t1, t2)");
    CHECK(fam.rho(4).str() == "max(t1, t2)");
    CHECK(evaluate_level(fam.rho(4), {2, 5, 1}) == doctest::Approx(5));
    check_against(fam, four_rows_oracle());
    for (int j = 1; j <= 4; ++j) CHECK(fam.strict[size_t(j - 1)]);
}

TEST_CASE("two extra actions") {
    auto fam = build_levels(model(kFiveRows));
    CHECK(fam.lower_sets.at(4) == GenSet{{M("t1/l4"), Value::zero()}, {M("t3/(l4*l5)"), Value::zero()}});
    CHECK(fam.lower_sets.at(5) == GenSet{{M("t2/l5"), Value::zero()}, {M("t3/l5"), Value::zero()}});
    CHECK(fam.rho_stages.at(4) == LevelExpr::max_of({LevelExpr(M("t1")), LevelExpr(M("t3/l5"))}));
    CHECK(fam.rho_stages.at(5).str() == "max(t2, t3)");
    check_against(fam, five_rows_oracle());
    for (int j = 1; j <= 5; ++j) CHECK(fam.strict[size_t(j - 1)]);
}

TEST_CASE("a non-strict action") {
    auto md = model(kNonStrict);
    auto fam = build_levels(md);
    CHECK(fam.lower_sets.at(5) == GenSet{{M("t3/l5"), Value::zero()}});
    CHECK(fam.rho_stages.at(4) == LevelExpr::max_of({LevelExpr(M("t2/t3")), LevelExpr(M("t1*l5/t3"))}));
    CHECK(fam.rho(3).is_one());
    CHECK(fam.rho(5) == LevelExpr(M("t3")));
    check_against(fam, non_strict_oracle());
    CHECK_FALSE(is_strict(fam, md.d, 3));
    CHECK(is_strict(fam, md.d, 5));
    CHECK(fam.strict == std::vector<bool>{true, true, false, true, true});
}

TEST_CASE("effective exponents") {
    LevelExpr t1(M("t1")), t2(M("t2"));
    CHECK(effective_exponent(LevelExpr::max_of({t1, t2}), {{1, 1}}) == 0);
    CHECK(effective_exponent(LevelExpr::one(), {{1, 3}, {2, 5}}) == 0);
    auto m = LevelExpr::min_of({LevelExpr::one(), LevelExpr(M("t1*t3/t2"))});
    CHECK(effective_exponent(m, {{1, 1}}) == 1);
    // secant slope between t = 1e-2 and 1e-4 at tau = (2, 3, 5)
    auto at = [&](double t) { return evaluate_level(m, {2 * t, 3, 5}); };
    CHECK(std::log(at(1e-4) / at(1e-2)) / std::log(1e-2) == doctest::Approx(1).epsilon(0.05));
    CHECK(effective_exponent(LevelExpr::pow(LevelExpr::max_of({t1, t2}), -1), {{1, 1}, {2, 2}}) == -1);
}

TEST_CASE("evaluation needs positive input") {
    CHECK(evaluate_level(LevelExpr::one(), {1, 1}) == 1);
    CHECK_THROWS_AS(evaluate_level(LevelExpr(M("t1")), {0, 1}), InputError);
    CHECK_THROWS_AS(evaluate_level(LevelExpr(M("t1")), {-1, 1}), InputError);
    CHECK_THROWS_AS(evaluate_level(LevelExpr(M("t4")), {1, 1}), InputError);
}

TEST_CASE("fixed-point input is rejected") {
    CHECK_THROWS_AS(build_levels(model(kFourRows, {1})), InputError);
}

TEST_CASE("generalized level functions") {
    auto fam = build_levels(model(kNormal));
    auto hat = build_generalized_levels(Deformation::make(kNormal), PointPattern{});
    for (int j = 1; j <= 3; ++j) CHECK(hat.rho(j) == fam.rho(j));
    CHECK(hat.permutations.size() == 1);

    auto ns = build_generalized_levels(Deformation::make(kNonStrict), PointPattern{});
    CHECK(is_strict(ns, Deformation::make(kNonStrict), 3));
    CHECK(ns.strict == std::vector<bool>(5, true));
    CHECK(ns.permutations.size() > 1);
    // the min never exceeds the identity-order family
    auto plain = build_levels(model(kNonStrict));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int s = 0; s < 30; ++s) {
        std::vector<double> t{std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
        for (int j = 1; j <= 5; ++j) CHECK(evaluate_level(ns.rho(j), t) <= evaluate_level(plain.rho(j), t) * (1 + 1e-12));
    }

    auto single = build_generalized_levels(Deformation::make(Matrix{{1, 1}}), PointPattern{});
    CHECK(single.permutations == std::vector<std::vector<int>>{{1}});
    CHECK(single.rho(1) == build_levels(model(Matrix{{1, 1}})).rho(1));

    CHECK_THROWS_AS(build_generalized_levels(Deformation::make(kNonStrict), PointPattern{}, 1), InputError);
}

TEST_CASE("level function invariants across fixtures") {
    std::vector<Matrix> fixtures{
        kNormal,
        kFourRows,
        kFiveRows,
        kNonStrict,
        Matrix{{1, 1, 0}, {0, 1, 1}},
        Matrix{{1, 1}, {1, 0}, {0, 1}},
        Matrix{{3, 2}, {1, 1}},
        Matrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}, {1, 0, 0}},
    };
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& A : fixtures) {
        auto md = model(A);
        auto pr = run_pipeline(md);
        auto fam = build_levels(md, pr);
        const int m = md.d.m, ell = md.d.ell;
        CAPTURE(matrix_str(A));
        // the last action is strict
        CHECK(is_strict(fam, md.d, ell));
        for (int s = 0; s < 100; ++s) {
            std::vector<double> t;
            for (int k = 0; k < m; ++k) t.push_back(std::exp(u(rng)));
            // phi_k(rho) recovers tau_k on the basis columns
            std::vector<double> rho;
            for (int j = 1; j <= ell; ++j) rho.push_back(evaluate_level(fam.rho(j), t));
            for (int k : md.r.basis_cols) {
                double phi = md.dm.phi.at(k).evaluate([&](const VarId& v) { return rho[size_t(v.index - 1)]; });
                CHECK(phi == doctest::Approx(t[size_t(k - 1)]).epsilon(1e-10));
            }
            // two-sided power bound under scaling one basis coordinate
            for (int k : md.r.basis_cols)
                for (int j = 1; j <= ell; ++j) {
                    double n = to_double(exponent_bound(fam.rho(j), k));
                    for (double f : {2.0, 10.0, 100.0}) {
                        auto ts = t;
                        ts[size_t(k - 1)] *= f;
                        double r0 = rho[size_t(j - 1)], r1 = evaluate_level(fam.rho(j), ts);
                        CHECK(r1 <= std::pow(f, n) * r0 * (1 + 1e-9));
                        CHECK(r1 >= std::pow(f, -n) * r0 * (1 - 1e-9));
                    }
                }
            // symbolic exponent agrees with the numeric slope near t = 1e-6 (secant down to 1e-8)
            if (s < 10)
                for (int j = 1; j <= ell; ++j) {
                    std::map<int, Q> scaling;
                    auto at = [&](double tt) {
                        auto ts = t;
                        for (int k = 1; k <= m; ++k) ts[size_t(k - 1)] *= std::pow(tt, to_double(md.d.a(j, k)));
                        return evaluate_level(fam.rho(j), ts);
                    };
                    for (int k = 1; k <= m; ++k) scaling[k] = md.d.a(j, k);
                    double slope = std::log(at(1e-8) / at(1e-6)) / std::log(1e-2);
                    CHECK(slope == doctest::Approx(to_double(effective_exponent(fam.rho(j), scaling))).epsilon(0.05));
                }
        }
        // boundedness on the region where every F^q monomial is at most 2
        int accepted = 0;
        double worst = 0, lowest = 1e300;
        for (int s = 0; s < 20000 && accepted < 1000; ++s) {
            std::vector<double> t;
            for (int k = 0; k < m; ++k) t.push_back(std::exp(6 * (u(rng) - 2)));
            bool inside = true;
            for (const auto& p : pr.Fq)
                if (p.f.evaluate([&](const VarId& v) { return t[size_t(v.index - 1)]; }) > 2) inside = false;
            if (!inside) continue;
            ++accepted;
            for (const auto& p : pr.G) {
                double x = evaluate_level(restrict_to_levels(p.f, fam), t);
                worst = std::max(worst, x);
                if (!p.v.is_zero() && !p.f.has_kind(VarKind::Lambda)) lowest = std::min(lowest, x);
            }
        }
        CHECK(accepted > 0);
        // the bound of the region carries over: f|_Lambda <= 2 and unit-valued psi >= 1/2
        CHECK(worst <= 2 * (1 + 1e-9));
        if (lowest < 1e300) CHECK(lowest >= 0.5 * (1 - 1e-9));
    }
}

TEST_CASE("parsing level expressions") {
    auto fam = build_levels(model(kFiveRows));
    for (int j = 1; j <= 5; ++j) CHECK(parse_level(fam.rho(j).str()) == fam.rho(j));
    CHECK(parse_level("max(t2, t1)") == LevelExpr::max_of({LevelExpr(M("t1")), LevelExpr(M("t2"))}));
    CHECK(parse_level("t3^(1/2)") == LevelExpr(M("t3^(1/2)")));
    CHECK(parse_level("1").is_one());
    CHECK_THROWS_AS(parse_level("max(t1"), InputError);
    CHECK_THROWS_AS(parse_level("2*t1"), InputError);
}

TEST_CASE("absorbing monomial factors") {
    // c * max(a, b) = max(c a, c b) and a / max(a, b) = 1 / max(1, b/a)
    CHECK(absorb_factors(parse_level("t3 * max(t1, t2) / (t1*t2)")) ==
          absorb_factors(parse_level("max(t3/t2, t3/t1)")));
    CHECK(absorb_factors(parse_level("t1 / max(t1, t2/t3)")) == absorb_factors(parse_level("1/max(1, t2/(t1*t3))")));
    CHECK_FALSE(absorb_factors(parse_level("t1 / max(t1, t2)")) == absorb_factors(parse_level("t2 / max(t1, t2)")));
    // numerically unchanged
    auto e = parse_level("t3 / max(t1 * max(t2, t3), t3)");
    auto a = absorb_factors(e);
    for (std::vector<double> t : {std::vector<double>{0.2, 3, 0.7}, {5, 0.1, 2}})
        CHECK(evaluate_level(a, t) == doctest::Approx(evaluate_level(e, t)));
}
