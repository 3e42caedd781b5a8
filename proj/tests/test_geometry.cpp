#include "support.hpp"

#include "cbar/caps.hpp"

#include <doctest.h>

using namespace cbar;
using namespace cbar::geometry;
using support::brute_max;
using support::brute_vertices;
using support::sorted;

TEST_SUITE("geometry")
{
    TEST_CASE("rational parsing and printing")
    {
        CHECK(parse_rational("3/6") == frac(1, 2));
        CHECK(parse_rational("-0.25") == frac(-1, 4));
        CHECK(parse_rational("7") == 7);
        CHECK(parse_rational(" -4/8 ") == frac(-1, 2));
        CHECK_THROWS_AS(parse_rational("4/-8"), ParseError);
        CHECK(to_string(frac(1, 2)) == "1/2");
        CHECK(to_string(frac(-6, 3)) == "-2");
        CHECK(to_string(Vec{1, frac(-1, 3)}) == "(1, -1/3)");
        CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
        CHECK_THROWS_AS(parse_rational("abc"), ParseError);
        CHECK_THROWS_AS(parse_rational(""), ParseError);
        CHECK(floor_of(frac(-3, 2)) == -2);
        CHECK(ceil_of(frac(-3, 2)) == -1);
        CHECK(ceil_of(Rational(4)) == 4);
    }

    TEST_CASE("row reduction and primitive vectors")
    {
        Mat m{{2, 4, 2}, {1, 2, 3}, {3, 6, 5}};
        auto pivots = row_reduce(m);
        CHECK(pivots == std::vector<std::size_t>{0, 2});
        CHECK(m[0] == Vec{1, 2, 0});
        CHECK(m[1] == Vec{0, 0, 1});
        CHECK(m[2] == Vec{0, 0, 0});

        Vec v{frac(1, 2), frac(3, 4)};
        make_primitive(v);
        CHECK(v == Vec{2, 3});
        Vec w{-2, -4};
        make_primitive(w);
        CHECK(w == Vec{-1, -2});
    }

    TEST_CASE("lp: small cases")
    {
        auto box = HPolytope::box(Vec{0, 0}, Vec{1, 1});
        auto r = lp_optimize(box, Vec{1, 1}, Sense::Maximize);
        REQUIRE(r.optimal());
        CHECK(r.value == 2);
        CHECK(r.point == Vec{1, 1});
        CHECK(lp_optimize(box, Vec{1, -1}, Sense::Minimize).value == -1);

        HPolytope empty(1);
        empty.add_inequality(Vec{1}, 0);
        empty.add_inequality(Vec{-1}, -1);
        CHECK(lp_optimize(empty, Vec{1}, Sense::Maximize).status == LpStatus::Infeasible);
        CHECK(is_empty(empty));

        HPolytope ray(1);
        ray.add_inequality(Vec{-1}, 0);
        CHECK(lp_optimize(ray, Vec{1}, Sense::Maximize).status == LpStatus::Unbounded);
        CHECK(lp_optimize(ray, Vec{1}, Sense::Minimize).value == 0);
    }

    TEST_CASE("lp: degenerate cycling example terminates")
    {
        // classic instance on which the largest-coefficient rule cycles
        HPolytope p(4);
        p.add_inequality(Vec{frac(1, 4), -8, -1, 9}, 0);
        p.add_inequality(Vec{frac(1, 2), -12, frac(-1, 2), 3}, 0);
        p.add_inequality(Vec{0, 0, 1, 0}, 1);
        for (std::size_t i = 0; i < 4; ++i) {
            Vec e = zeros(4);
            e[i] = -1;
            p.add_inequality(e, 0);
        }
        p.add_inequality(Vec{1, 1, 1, 1}, 10);
        Vec c{frac(-3, 4), 20, frac(-1, 2), 6};
        auto r = lp_optimize(p, c, Sense::Minimize);
        REQUIRE(r.optimal());
        Vec neg = c;
        for (auto& v : neg)
            v = -v;
        CHECK(r.value == -*brute_max(p, neg));
        CHECK(r.value == frac(-5, 4));
    }

    TEST_CASE("lp: equalities in a constraint system")
    {
        ConstraintSystem s;
        s.add_block("x", 2);
        s.add_block("y", 1);
        s.add_polytope(HPolytope::box(Vec{0, 0}, Vec{1, 1}), {0}, "box");
        s.add_eq(Vec{1, 1, -1}, 0, "sum");
        auto r = lp_optimize(s, 1, Vec{1}, Sense::Maximize);
        REQUIRE(r.optimal());
        CHECK(r.value == 2);
        CHECK(r.point.size() == 3);
        CHECK(s.embed(1, Vec{5}) == Vec{0, 0, 5});
        CHECK_THROWS_AS(s.add_block("x", 1), std::invalid_argument);
    }

    TEST_CASE("lp: optimum equals the best basic solution on random polytopes")
    {
        std::mt19937 rng(11);
        for (int trial = 0; trial < 80; ++trial) {
            const std::size_t dim = support::pick(rng, 1, 3);
            auto p = support::random_polytope(rng, dim, support::pick(rng, 0, 4));
            Vec c = support::random_vec(rng, dim, -3, 3);
            auto r = lp_optimize(p, c, Sense::Maximize);
            REQUIRE(r.optimal());
            CHECK(r.value == *brute_max(p, c));
            CHECK(support::satisfies(p, r.point));
            CHECK(dot(c, r.point) == r.value);
        }
    }

    TEST_CASE("vertices agree with basis enumeration")
    {
        std::mt19937 rng(12);
        for (int trial = 0; trial < 60; ++trial) {
            const std::size_t dim = support::pick(rng, 1, 4);
            auto p = support::random_polytope(rng, dim, support::pick(rng, 0, 5));
            CHECK(sorted(vertices(p).points) == brute_vertices(p));
        }
    }

    TEST_CASE("vertices: errors and caps")
    {
        HPolytope ray(1);
        ray.add_inequality(Vec{-1}, 0);
        CHECK_THROWS_AS(vertices(ray), UnboundedPolytope);
        HPolytope empty(1);
        empty.add_inequality(Vec{1}, -1);
        empty.add_inequality(Vec{-1}, -1);
        CHECK_THROWS_AS(vertices(empty), EmptyPolytope);
        ScopedCaps small({2, 14});
        CHECK_THROWS_AS(vertices(support::unit_box(3)), CapExceeded);
        // a 3-D set of affine dimension 2 stays under the cap
        auto square = support::unit_box(3);
        square.add_equality(Vec{0, 0, 1}, 0);
        CHECK(vertices(square).points.size() == 4);
    }

    TEST_CASE("hull: round trip and extreme points")
    {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t dim = support::pick(rng, 1, 3);
            auto p = support::random_polytope(rng, dim, support::pick(rng, 0, 4));
            auto h = hull(vertices(p));
            CHECK(same_set(h, p));
            CHECK(brute_vertices(h) == brute_vertices(p));

            std::vector<Vec> pts;
            const std::size_t n = support::pick(rng, 1, 9);
            for (std::size_t k = 0; k < n; ++k)
                pts.push_back(support::random_vec(rng, dim, -3, 3));
            auto hp = hull(VPolytope(dim, pts));
            for (const auto& x : pts)
                CHECK(contains(hp, x));
            for (const auto& v : brute_vertices(hp))
                CHECK(std::find(pts.begin(), pts.end(), v) != pts.end());
            CHECK(sorted(extreme_points(VPolytope(dim, pts)).points) == brute_vertices(hp));
        }
    }

    TEST_CASE("hull: lower-dimensional point sets")
    {
        VPolytope seg(3, {Vec{0, 0, 0}, Vec{2, 2, 2}, Vec{1, 1, 1}});
        auto h = hull(seg);
        CHECK(contains(h, Vec{frac(1, 2), frac(1, 2), frac(1, 2)}));
        CHECK_FALSE(contains(h, Vec{1, 1, 0}));
        CHECK_FALSE(contains(h, Vec{3, 3, 3}));
        auto single = hull(VPolytope(2, {Vec{1, 2}}));
        CHECK(vertices(single).points == std::vector<Vec>{Vec{1, 2}});
        auto ah = affine_hull({Vec{0, 0, 0}, Vec{1, 1, 0}, Vec{1, 0, 0}});
        CHECK(ah.free_coords.size() == 2);
        CHECK(ah.normals.size() == 1);
    }

    TEST_CASE("extreme rays of a pointed cone")
    {
        auto rays = extreme_rays(Mat{{1, 0}, {0, 1}});
        CHECK(sorted(rays) == sorted({Vec{1, 0}, Vec{0, 1}}));
        auto three = extreme_rays(Mat{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, -1}});
        CHECK(three.size() == 4);
    }

    TEST_CASE("projection matches the support function of the lifted polytope")
    {
        std::mt19937 rng(14);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t kept = support::pick(rng, 1, 2);
            const std::size_t dropped = support::pick(rng, 1, 2);
            auto p = support::random_polytope(rng, kept + dropped, support::pick(rng, 1, 5));
            ConstraintSystem s;
            s.add_block("x", kept);
            s.add_block("y", dropped);
            s.add_polytope(p, {0, 1}, "p");
            auto q = project_polytope(s, {0});
            REQUIRE(q.dim == kept);
            const auto lifted = brute_vertices(p);
            for (int dir = 0; dir < 6; ++dir) {
                Vec c = support::random_vec(rng, kept, -3, 3);
                Rational best = dot(c, Vec(lifted[0].begin(), lifted[0].begin() + kept));
                for (const auto& v : lifted)
                    best = std::max(best, dot(c, Vec(v.begin(), v.begin() + kept)));
                CHECK(*brute_max(q, c) == best);
            }
        }
    }

    TEST_CASE("projection of an infeasible system is empty")
    {
        ConstraintSystem s;
        s.add_block("x", 1);
        s.add_block("y", 1);
        s.add_le(Vec{1, 1}, 0);
        s.add_le(Vec{-1, -1}, -1);
        CHECK(is_empty(project_polytope(s, {0})));
    }

    TEST_CASE("polytope utilities")
    {
        auto a = HPolytope::box(Vec{0, 0}, Vec{2, 2});
        auto b = HPolytope::box(Vec{1, 1}, Vec{3, 3});
        auto c = intersect(a, b);
        CHECK(same_set(c, HPolytope::box(Vec{1, 1}, Vec{2, 2})));
        CHECK(includes(a, c));
        CHECK_FALSE(includes(c, a));
        auto [lo, hi] = bounding_box(c);
        CHECK(lo == Vec{1, 1});
        CHECK(hi == Vec{2, 2});
        HPolytope redundant = a;
        redundant.add_inequality(Vec{1, 1}, 10);
        redundant.add_inequality(Vec{1, 0}, 3);
        auto pruned = remove_redundant(redundant);
        CHECK(pruned.rows() == 4);
        CHECK(same_set(pruned, a));
        CHECK(convex_union({VPolytope(1, {Vec{0}}), VPolytope(1, {Vec{3}})}).rows() == 2);
    }

    TEST_CASE("opposite rows become equalities in a system")
    {
        HPolytope p(2);
        p.add_equality(Vec{1, -1}, 0);
        p.add_inequality(Vec{1, 0}, 1);
        ConstraintSystem s;
        s.add_block("x", 2);
        s.add_polytope(p, {0}, "p");
        std::size_t eq = 0;
        for (const auto& row : s.constraints())
            eq += row.relation == Relation::Equal;
        CHECK(eq == 1);
        CHECK(s.size() == 2);
    }
}
