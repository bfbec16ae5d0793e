#include <doctest.h>

#include "mspec/deformation.hpp"
#include "mspec/linalg.hpp"

using namespace mspec;

namespace {
Monomial M(const char* s) { return parse_monomial(s); }
PointPattern zeros(std::set<int> z) {
    PointPattern p;
    p.zero_blocks = std::move(z);
    return p;
}
}  // namespace

TEST_CASE("build_from_index_family") {
    auto f = build_from_index_family({{1, 2}, {2, 3}}, 3);
    CHECK(f.d.A == Matrix{{1, 1, 0}, {0, 1, 1}});
    CHECK(f.blocks == std::vector<std::vector<int>>{{1}, {2}, {3}});
    auto g = build_from_index_family({{1}, {2}, {3}});
    CHECK(g.d.A == identity(3));
    auto h = build_from_index_family({{1}, {1}});
    CHECK(h.d.A == Matrix{{1}, {1}});
    CHECK_FALSE(h.d.warnings.empty());
    auto w = build_from_index_family({{1, 2}, {3}}, 4);
    CHECK(w.blocks == std::vector<std::vector<int>>{{1, 2}, {3}});
    CHECK(w.d.block_dims == std::vector<int>{2, 1});
    CHECK(w.complement == std::vector<int>{4});
    CHECK_THROWS_AS(build_from_index_family({{}, {}}), InputError);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(Deformation::make(Matrix{{1, 0}, {0, 0}}), InputError);
    CHECK_THROWS_AS(Deformation::make(Matrix{{1, -1}}), InputError);
    CHECK_THROWS_AS(Deformation::make(Matrix{{1, 0}}, {}, std::vector<std::set<int>>{{1, 2}}), InputError);
    auto d = Deformation::make(Matrix{{1, 0, 0}});
    CHECK_THROWS_AS(validate_point(d, zeros({})), InputError);
    CHECK_NOTHROW(validate_point(d, zeros({2, 3})));
}

TEST_CASE("rank_and_normalize and sigma") {
    auto d = Deformation::make(Matrix{{3, 2}, {1, 1}});
    auto r = rank_and_normalize(d, zeros({}));
    CHECK(r.L == 2);
    CHECK(r.sigma == 1);
    CHECK(r.col_perm == std::vector<int>{1, 2});
    CHECK(sigma_of(Matrix{{Q(1, 2), 1}, {0, 1}}) == 2);
    CHECK(sigma_of(Matrix{{2, 2}}) == Q(1, 2));
    auto id = Deformation::make(identity(3));
    auto ri = rank_and_normalize(id, zeros({3}), true);
    CHECK(ri.L == 3);
    CHECK(ri.col_perm == std::vector<int>{1, 2, 3});
}

TEST_CASE("reordering away from vanishing blocks") {
    auto d = Deformation::make(Matrix{{1, 1, 0}, {0, 1, 1}});
    auto r = rank_and_normalize(d, zeros({1}), true);
    CHECK(r.basis_cols == std::vector<int>{2, 3});
    auto plain = rank_and_normalize(d, zeros({1}));
    CHECK(plain.basis_cols == std::vector<int>{1, 2});
}

TEST_CASE("classify_action") {
    CHECK(classify_action(Deformation::make(Matrix{{1, 1, 0}, {0, 1, 1}})) == ActionType::NonDegenerate);
    CHECK(classify_action(Deformation::make(Matrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}})) ==
          ActionType::Transitive);
    CHECK(classify_action(Deformation::make(identity(2))) == ActionType::Normal);
    CHECK(classify_action(Deformation::make(Matrix{{1, 1}, {2, 2}, {1, 1}})) == ActionType::Degenerate);
    // positive row scaling keeps the type
    CHECK(classify_action(Deformation::make(Matrix{{Q(1, 2), Q(1, 2), 0}, {0, 3, 3}})) ==
          ActionType::NonDegenerate);
}

TEST_CASE("is_fixed_point") {
    auto d = Deformation::make(Matrix{{1, 1, 0}, {0, 1, 1}});
    CHECK(is_fixed_point(d, zeros({1, 3})));
    CHECK_FALSE(is_fixed_point(d, zeros({3})));
    CHECK_FALSE(is_fixed_point(d, zeros({})));
    CHECK(is_fixed_point(d, zeros({1, 2})));
    auto id = Deformation::make(identity(3));
    CHECK(is_fixed_point(id, zeros({2})));
}

TEST_CASE("derive_monomials") {
    auto d = Deformation::make(Matrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}});
    auto dm = derive_monomials(d, rank_and_normalize(d, zeros({})));
    CHECK(dm.phi_inv.at(1) == M("t1"));
    CHECK(dm.phi_inv.at(2) == M("t2"));
    CHECK(dm.phi_inv.at(3) == M("t3/(t1*t2)"));
    auto c = Deformation::make(Matrix{{1, 1, 0}, {0, 1, 1}});
    auto dc = derive_monomials(c, rank_and_normalize(c, zeros({})));
    CHECK(dc.psi.at(3) == M("t1*t3/t2"));
    auto cusp = Deformation::make(Matrix{{3, 2}, {1, 1}});
    auto du = derive_monomials(cusp, rank_and_normalize(cusp, zeros({})));
    CHECK(du.phi_inv.at(1) == M("t1/t2"));
    CHECK(du.phi_inv.at(2) == M("t2^3/t1^2"));
    auto tr = Deformation::make(Matrix{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}});
    auto dt = derive_monomials(tr, rank_and_normalize(tr, zeros({})));
    CHECK(dt.phi_inv.at(1) == M("t1/l4"));
    CHECK(dt.phi_inv.at(2) == M("t2/l4"));
    CHECK(dt.phi_inv.at(3) == M("t3*l4/(t1*t2)"));
}

TEST_CASE("derived monomials round trip and lambda-freeness") {
    std::vector<Matrix> cases{
        {{3, 2}, {1, 1}},
        {{1, 1, 0}, {0, 1, 1}},
        {{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}},
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}},
        {{1, Q(1, 2), Q(2, 3)}, {Q(1, 3), 1, 2}},
    };
    for (const auto& A : cases) {
        auto d = Deformation::make(A);
        auto r = rank_and_normalize(d, zeros({}));
        auto dm = derive_monomials(d, r);
        // substitute phi_inv into phi_k: tau_k back for basis columns
        for (int k : r.basis_cols) {
            Monomial back;
            for (const auto& [v, e] : dm.phi.at(k).exponents()) {
                if (r.is_basis_row(v.index))
                    back *= dm.phi_inv.at(v.index).pow(e);
                else
                    back *= Monomial::lambda(v.index, e);
            }
            CHECK(back == Monomial::tau(k));
        }
        for (const auto& [k, psi] : dm.psi) CHECK_FALSE(psi.has_kind(VarKind::Lambda));
    }
}

TEST_CASE("bundle_decomposition") {
    auto f11 = build_from_index_family({{1, 3}, {2, 3}, {1, 2, 3}}, 4);
    auto s11 = bundle_decomposition(f11.d);
    REQUIRE(s11.size() == 3);
    CHECK(s11[0].text == "T_M M2");
    CHECK(s11[1].text == "T_M M1");
    CHECK(s11[2].text == "TXxM/(TM1xM + TM2xM)");
    auto f12 = build_from_index_family({{1, 2}, {2, 3}, {1, 3}}, 4);
    auto s12 = bundle_decomposition(f12.d);
    CHECK(s12[0].text == "T_M M2");
    CHECK(s12[1].text == "T_M M3");
    CHECK(s12[2].text == "T_M M1");
    auto one = build_from_index_family({{1, 2, 3}}, 3);
    auto s1 = bundle_decomposition(one.d);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].B == std::set<int>{1});
    CHECK_THROWS_AS(bundle_decomposition(Deformation::make(Matrix{{1, 1, 0}, {0, 1, 1}})), InputError);
}
