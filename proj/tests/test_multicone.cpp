#include <doctest.h>

#include "mspec/multicone.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace mspec;

namespace {

Model model(const Matrix& A, std::set<int> zeros = {}, bool normalized = false) {
    PointPattern p;
    p.zero_blocks = std::move(zeros);
    p.normalized = normalized;
    return Model::make(Deformation::make(A), p);
}

MulticoneSystem system_of(const Model& md) { return build_multicone(md, run_pipeline(md)); }

std::vector<std::string> texts(const MulticoneSystem& s) {
    std::vector<std::string> out;
    for (const auto& q : s.inequalities) out.push_back(inequality_str(q));
    std::sort(out.begin(), out.end());
    return out;
}

bool has_text(const MulticoneSystem& s, const std::string& t) {
    auto all = texts(s);
    return std::find(all.begin(), all.end(), t) != all.end();
}

BlockPoint pt(std::vector<double> norms) {
    BlockPoint z;
    z.norms = std::move(norms);
    return z;
}

EpsValues eps_of(double e) {
    EpsValues v;
    v.eps = e;
    v.eps0 = e;
    return v;
}

const Matrix kTransversal{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
const Matrix kFlag{{1, 1}, {0, 1}};
const Matrix kCusp{{3, 2}, {1, 1}};
const Matrix kThreeSix{{0, 1, 1}, {1, 0, 1}, {0, 0, 1}};
const Matrix kThreeSeven{{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}, {1, 1, 1, 1}};
const Matrix kClean{{1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
const Matrix kTwoLines{{1, 0, 1}, {0, 1, 1}};
const Matrix kChain{{1, 1, 0}, {0, 1, 1}};

struct Fixture {
    Matrix A;
    std::set<int> zeros;
};

const std::vector<Fixture> kFixtures{
    {kTransversal, {}},    {kFlag, {}},    {kCusp, {}},     {kThreeSix, {}}, {kThreeSeven, {}},
    {kClean, {}},     {kTwoLines, {1, 2}}, {kTwoLines, {}}, {kChain, {1}},   {kChain, {3}},
};

}  // namespace

TEST_CASE("multicone inequalities of the worked examples") {
    auto s36 = system_of(model(kThreeSix));
    CHECK(texts(s36) == std::vector<std::string>{"|z1| < eps", "|z2| < eps", "|z3| < eps*|z1|*|z2|"});
    CHECK(s36.has_x0);

    auto s37 = system_of(model(kThreeSeven));
    CHECK(texts(s37) == std::vector<std::string>{
                            "|z1|*|z2|*|z3| < eps^2*|z4|",
                            "|z1|*|z4| < eps^2*|z2|*|z3|",
                            "|z2|*|z4| < eps^2*|z1|*|z3|",
                            "|z3|*|z4| < eps^2*|z1|*|z2|",
                        });

    CHECK(has_text(system_of(model(kTwoLines, {1, 2})), "|z1|*|z2| < eps*|z3|"));

    auto tk = system_of(model(kFlag));
    CHECK(texts(tk) == std::vector<std::string>{"|z1| < eps", "|z2| < eps*|z1|"});

    auto cusp = system_of(model(kCusp));
    CHECK(texts(cusp) == std::vector<std::string>{"|z1| < eps*|z2|", "|z2|^3 < eps*|z1|^2"});
}

TEST_CASE("two-sided rows for nonzero values and the one-sided form") {
    auto s = system_of(model(kTwoLines, {}, true));
    CHECK(q_closed(s.H));
    CHECK(has_text(s, "(|xi3| - eps)*|z1|*|z2| < |z3| < (|xi3| + eps)*|z1|*|z2|"));
    auto one = to_one_sided(s);
    CHECK(has_text(one, "|z3| < (|xi3| + eps)*|z1|*|z2|"));
    CHECK(has_text(one, "|z1|*|z2| < (1/|xi3| + eps)*|z3|"));

    GenSet lopsided{{Monomial::tau(3) / (Monomial::tau(1) * Monomial::tau(2)), Value::unit()}};
    CHECK_FALSE(q_closed(lopsided));
    MulticoneSystem bad = s;
    bad.H = lopsided;
    CHECK_THROWS_AS(to_one_sided(bad), InputError);
}

TEST_CASE("per-pair eps slots") {
    auto md = model(kFlag);
    auto s = build_multicone(md, run_pipeline(md), EpsMode::PerPair);
    auto t = texts(s);
    CHECK(t.size() == 2);
    CHECK(std::count_if(t.begin(), t.end(), [](const std::string& x) { return x.find("eps1") != std::string::npos; }) == 1);
    CHECK(std::count_if(t.begin(), t.end(), [](const std::string& x) { return x.find("eps2") != std::string::npos; }) == 1);

    // loosening one slot admits a point the shared eps rejects
    EpsValues e = eps_of(0.1);
    BlockPoint z = pt({0.05, 0.02});  // |z2|/|z1| = 0.4
    CHECK_FALSE(member(s, z, e));
    int slot_ratio = 0;
    for (const auto& q : s.inequalities)
        if (q.f.exponent(tau_var(2)) != 0) slot_ratio = q.bound.front().slot;
    e.per_slot[slot_ratio] = {0.1, 0.5};
    CHECK(member(s, z, e));
}

TEST_CASE("membership arithmetic") {
    auto cusp = system_of(model(kCusp));
    auto e = eps_of(0.1);
    // |z2|^3 = 1e-6 against eps |z1|^2 = 2.5e-8: the second row fails
    CHECK_FALSE(member(cusp, pt({5e-4, 1e-2}), e));
    CHECK(member(cusp, pt({5e-6, 1e-4}), e));
    CHECK_FALSE(member(cusp, pt({1e-3, 1e-2}), e));  // equality in the first row

    auto s36 = system_of(model(kThreeSix));
    CHECK_FALSE(member(s36, pt({0.05, 0.05, 0.1}), e));
    CHECK(member(s36, pt({0.05, 0.05, 1e-4}), e));

    auto vanishing = system_of(model(kTwoLines, {1, 2}));
    CHECK(member(vanishing, pt({0.0, 0.0, 0.05}), e));
    CHECK_FALSE(member(vanishing, pt({0.0, 0.0, 0.0}), e));

    BlockPoint off_cone = pt({5e-6, 1e-4});
    off_cone.in_cone = {true, false};
    CHECK_FALSE(member(cusp, off_cone, e));
    BlockPoint far = pt({5e-6, 1e-4});
    far.x0 = 0.2;
    CHECK_FALSE(member(cusp, far, e));
}

TEST_CASE("equivalence precondition") {
    auto md = model(kFlag);
    auto pr = run_pipeline(md);
    pr.Fq = {{Monomial::tau(1), Value::zero()}};
    CHECK_THROWS_AS(build_multicone(md, pr), InputError);
    CHECK_NOTHROW(build_multicone(md, pr, EpsMode::Single, false));
}

TEST_CASE("star closure") {
    auto maj = closure(model(kTransversal), run_pipeline(model(kTransversal)));
    CHECK(maj.K.size() == 3);
    std::vector<std::string> t;
    for (const auto& q : maj.inequalities) t.push_back(closed_inequality_str(q));
    std::sort(t.begin(), t.end());
    CHECK(t == std::vector<std::string>{"|z1| <= eps", "|z2| <= eps", "|z3| <= eps"});

    auto md = model(kClean);
    auto pr = run_pipeline(md);
    CHECK(pr.Fq == GenSet{{Monomial::tau(3) / Monomial::tau(1), Value::zero()},
                          {Monomial::tau(3) / Monomial::tau(2), Value::zero()},
                          {Monomial::tau(1) * Monomial::tau(2) / Monomial::tau(3), Value::zero()}});
    auto c = closure(md, pr);
    std::set<Monomial> K;
    for (const auto& e : c.K) K.insert(e.pair.f);
    CHECK(K.count(Monomial::tau(1)));
    CHECK(K.count(Monomial::tau(2)));
    CHECK(K.count(Monomial::tau(3)));

    // the naive closed system contains the whole z2 axis; the closure does not
    auto e = eps_of(0.1);
    BlockPoint axis = pt({0.0, 0.5, 0.0});
    bool naive = 0.0 <= 0.1 * 0.5 && 0.0 <= 0.1 * 0.0 && 0.0 <= 0.1 * 0.0;
    CHECK(naive);
    CHECK_FALSE(member_closed(c, axis, e));
    CHECK(member_closed(c, pt({0.0, 0.0, 0.0}), e));

    auto two = closure(model(kTwoLines, {1, 2}), run_pipeline(model(kTwoLines, {1, 2})));
    bool has_tau3 = false;
    for (const auto& x : two.K) has_tau3 |= x.pair == GenPair(Monomial::tau(3), Value::zero());
    CHECK(has_tau3);
    CHECK_FALSE(member_closed(two, pt({0.0, 0.0, 0.5}), e));

    CHECK_THROWS(closure(md, pr, 3));
}

TEST_CASE("projection") {
    auto tk = to_one_sided(system_of(model(kFlag)));
    auto drop2 = project(tk, 2, false);
    CHECK(texts(drop2) == std::vector<std::string>{"|z1| < eps"});
    CHECK(drop2.removed == std::set<int>{2});
    auto drop1 = project(tk, 1, false);
    CHECK(texts(drop1) == std::vector<std::string>{"|z2| < eps^2"});

    auto maj = to_one_sided(system_of(model(kTransversal)));
    auto p = project(maj, 3, false);
    auto again = project(p, 2, false);
    CHECK(texts(again) == std::vector<std::string>{"|z1| < eps"});
    CHECK_THROWS_AS(project(p, 3, false), InputError);
    CHECK_THROWS_AS(project(system_of(model(kTwoLines, {}, true)), 1, false), InputError);

    auto vanishing = to_one_sided(system_of(model(kTwoLines, {1, 2})));
    auto dz = project(vanishing, 1, true);
    for (const auto& q : dz.inequalities) CHECK(q.f.exponent(tau_var(1)) == 0);
}

TEST_CASE("projection agrees with fiber sampling") {
    struct Case {
        Fixture fx;
        int k;
    };
    const std::vector<Case> cases{
        {{kFlag, {}}, 1}, {{kFlag, {}}, 2}, {{kCusp, {}}, 1},  {{kCusp, {}}, 2},
        {{kThreeSix, {}}, 3}, {{kThreeSix, {}}, 1}, {{kClean, {}}, 1}, {{kThreeSeven, {}}, 4},
        {{kTwoLines, {1, 2}}, 3}, {{kTwoLines, {1, 2}}, 1},
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& c : cases) {
        auto md = model(c.fx.A, c.fx.zeros);
        auto s = to_one_sided(system_of(md));
        auto proj = project(s, c.k, md.zero(c.k));
        const double eps = 0.1;
        int decisive = 0;
        for (int probe = 0; probe < 200; ++probe) {
            BlockPoint z;
            if (probe % 2 == 0) {
                auto m = sample_member(s, eps_of(eps), rng);
                REQUIRE(m);
                z = *m;
            } else {
                z = pt(std::vector<double>(static_cast<size_t>(s.m), 1.0));
                for (auto& x : z.norms) x = std::pow(10.0, -10.0 * U(rng));
            }
            bool inner = member(proj, z, eps_of(eps * 0.9));
            bool outer = member(proj, z, eps_of(eps * 1.1));
            bool fiber = false;
            for (double t = -40.0; t <= 5.0 && !fiber; t += 0.002) {
                BlockPoint w = z;
                w.norms[static_cast<size_t>(c.k - 1)] = std::pow(10.0, t);
                fiber = member(s, w, eps_of(eps));
            }
            if (md.zero(c.k) && !fiber) {
                BlockPoint w = z;
                w.norms[static_cast<size_t>(c.k - 1)] = 0.0;
                fiber = member(s, w, eps_of(eps));
            }
            if (inner) {
                CHECK(fiber);
                ++decisive;
            }
            if (!outer) {
                CHECK_FALSE(fiber);
                ++decisive;
            }
        }
        CHECK(decisive >= 150);
    }
}

TEST_CASE("contraction stability") {
    for (const auto& A : {kTransversal, kCusp, kThreeSeven}) {
        auto rep = contraction_stable_check(system_of(model(A)), eps_of(0.1), 1000, 11);
        CHECK(rep.samples == 1000);
        CHECK(rep.passed == 1000);
        CHECK(rep.failed == 0);
    }
    for (const auto& fx : kFixtures) {
        auto s = system_of(model(fx.A, fx.zeros));
        auto rep = contraction_stable_check(s, eps_of(0.1), 300, 3);
        CHECK(rep.samples == 300);
        CHECK(rep.failed == 0);
    }
}

TEST_CASE("projected systems stay contraction stable") {
    for (const auto& fx : kFixtures) {
        auto md = model(fx.A, fx.zeros);
        auto s = system_of(md);
        if (!q_closed(s.H)) continue;
        auto one = to_one_sided(s);
        for (int k = 1; k <= md.d.m; ++k) {
            auto p = project(one, k, md.zero(k));
            auto rep = contraction_stable_check(p, eps_of(0.1), 200, 5);
            CHECK(rep.samples == 200);
            CHECK(rep.failed == 0);
        }
    }
}

TEST_CASE("closure contains the open system") {
    std::mt19937_64 rng(19);
    for (const auto& fx : kFixtures) {
        auto md = model(fx.A, fx.zeros);
        auto pr = run_pipeline(md);
        auto s = build_multicone(md, pr);
        auto c = closure(md, pr);
        for (int i = 0; i < 300; ++i) {
            auto z = sample_member(s, eps_of(0.1), rng);
            REQUIRE(z);
            CHECK(member_closed(c, *z, eps_of(0.1)));
        }
    }
}

TEST_CASE("point sets") {
    auto Z = PointSet::parse("x3 = x1*x2", 3);
    CHECK(Z.solved == std::vector<int>{3});
    CHECK(Z.contains({0.5, 0.25, 0.125}));
    CHECK_FALSE(Z.contains({0.5, 0.25, 0.1}));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto x = Z.sample(rng, 0.1);
        REQUIRE(x);
        CHECK(Z.contains(*x));
    }
    auto W = PointSet::parse("x2 - (x1 + 1)^2 = 0; x1 > 0", 2);
    CHECK(W.contains({1.0, 4.0}));
    CHECK_FALSE(W.contains({-1.0, 0.0}));
    CHECK(PointSet::parse(" empty ", 2).empty);
    CHECK_THROWS_AS(PointSet::parse("x1^2 = x2^2", 2), InputError);
    CHECK_THROWS_AS(PointSet::parse("x4 = 0", 3), InputError);
    CHECK_THROWS_AS(PointSet::parse("x1 x2", 3), InputError);
}

TEST_CASE("normal cone probe") {
    const std::vector<double> eps{0.5, 0.1, 0.01};
    const std::vector<double> balls{0.5, 0.1};
    auto generic = model(kTwoLines, {}, true);
    auto graph = PointSet::parse("x3 = x1*x2", 3);
    auto r = normal_cone_probe(generic, graph, {1, 1, 1}, eps, balls, 4000, 2);
    CHECK(r.verdict == ProbeVerdict::InCone);
    CHECK(r.hits > 0);

    // the vertical direction: points of the graph have |x3| = |x1||x2|, never comparable to eps^-1 |x1||x2|
    auto vertical = model(kTwoLines, {1, 2}, true);
    auto zero3 = PointSet::parse("x3 = 0", 3);
    auto r2 = normal_cone_probe(vertical, zero3, {0, 0, 1}, eps, balls, 4000, 2);
    CHECK(r2.verdict == ProbeVerdict::NotInCone);
    auto r3 = normal_cone_probe(vertical, graph, {0, 0, 1}, eps, balls, 4000, 2);
    CHECK(r3.verdict == ProbeVerdict::NotInCone);

    auto r4 = normal_cone_probe(generic, PointSet::parse("empty", 3), {1, 1, 1}, eps, balls);
    CHECK(r4.verdict == ProbeVerdict::NotInCone);

    // the sampler never lands in a thin inequality region: no verdict
    auto r5 = normal_cone_probe(generic, PointSet::parse("x1 > 1", 3), {1, 1, 1}, eps, balls, 200, 2);
    CHECK(r5.verdict == ProbeVerdict::Inconclusive);

    auto again = normal_cone_probe(generic, graph, {1, 1, 1}, eps, balls, 4000, 2);
    CHECK(again.hits == r.hits);
}
