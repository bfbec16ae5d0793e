#include <doctest.h>

#include "mspec/cone.hpp"
#include "mspec/linalg.hpp"
#include "mspec/lp.hpp"

using namespace mspec;

TEST_CASE("linear algebra over Q") {
    Matrix a{{3, 2}, {1, 1}};
    CHECK(rank(a) == 2);
    CHECK(det(a) == 1);
    auto inv = inverse(a);
    REQUIRE(inv);
    CHECK((*inv)[0][0] == 1);
    CHECK((*inv)[0][1] == -2);
    CHECK((*inv)[1][0] == -1);
    CHECK((*inv)[1][1] == 3);
    CHECK_FALSE(inverse(Matrix{{1, 2}, {2, 4}}));
    CHECK(lex_basis_rows(Matrix{{1, 1}, {2, 2}, {0, 1}}) == std::vector<int>{0, 2});
}

TEST_CASE("simplex optimum and infeasibility") {
    lp::Problem p(2);
    p.add({1, 1}, lp::Sense::LE, 4);
    p.add({1, 3}, lp::Sense::LE, 6);
    p.objective = {3, 5};
    auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.value == 14);  // vertex (3, 1)
    lp::Problem q(1);
    q.add({1}, lp::Sense::GE, 2);
    q.add({1}, lp::Sense::LE, 1);
    CHECK_FALSE(lp::feasible(q));
    lp::Problem u(1);
    u.objective = {1};
    CHECK(lp::solve(u).status == lp::Status::Unbounded);
}

TEST_CASE("strict homogeneous systems") {
    // 0 in conv{(1,0),(-1,0)} so no strict solution
    CHECK_FALSE(lp::strictly_feasible(Matrix{{1, 0}, {-1, 0}}));
    CHECK(lp::strictly_feasible(Matrix{{1, 0}, {1, 1}}));
}

TEST_CASE("cone membership and generators") {
    Matrix gens{{1, 0}, {1, 1}};
    CHECK(lp::in_cone(gens, Vec{2, 1}));
    CHECK_FALSE(lp::in_cone(gens, Vec{0, 1}));
    // {x >= 0, y >= 0} in Q^2
    auto g = cone_generators(2, Matrix{{1, 0}, {0, 1}});
    CHECK(g.lines.empty());
    CHECK(g.rays.size() == 2);
    // half plane y >= 0 has one line and one ray
    auto h = cone_generators(2, Matrix{{0, 1}});
    CHECK(h.lines.size() == 1);
    CHECK(h.rays.size() == 1);
    // x >= y >= 0 has rays (1,0) and (1,1)
    auto c = cone_generators(2, Matrix{{1, -1}, {0, 1}});
    CHECK(c.rays.size() == 2);
    CHECK(lp::in_cone(c.rays, Vec{1, 1}));
    CHECK(lp::in_cone(c.rays, Vec{1, 0}));
}
