#include "support.hpp"

#include <doctest.h>

using namespace cbar;
using namespace cbar::relax;
using geometry::HPolytope;
using geometry::VPolytope;
using network::Network;

namespace {

HPolytope clipped(HPolytope p, const Rational& l, const Rational& u)
{
    p.add_inequality(Vec{1, 0}, u);
    p.add_inequality(Vec{-1, 0}, -l);
    return p;
}

HPolytope rows(std::initializer_list<std::pair<Vec, Rational>> list)
{
    HPolytope p(2);
    for (const auto& [a, b] : list)
        p.add_inequality(a, b);
    return p;
}

bool contains_interval(const BoundReport& outer, const Vec& lo, const Vec& hi)
{
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (outer.lower[i] > lo[i] || outer.upper[i] < hi[i])
            return false;
    return true;
}

}  // namespace

TEST_SUITE("relaxations")
{
    TEST_CASE("spec names round trip")
    {
        for (std::string name : {"ibp", "triangle", "mk:3", "p1", "pr:4"})
            CHECK(RelaxationSpec::parse(name).name() == name);
        CHECK(RelaxationSpec::parse("pr:1").window() == std::size_t{1});
        CHECK(RelaxationSpec::layerwise_optimal().window() == std::size_t{1});
        CHECK_FALSE(RelaxationSpec::triangle().window());
        CHECK_THROWS_AS(RelaxationSpec::parse("mk:0"), ParseError);
        CHECK_THROWS_AS(RelaxationSpec::parse("deeppoly"), ParseError);
    }

    TEST_CASE("triangle template")
    {
        auto t = triangle_relax_neuron(-1, 1);
        auto expected = rows({{Vec{1, -1}, 0}, {Vec{0, -1}, 0}, {Vec{-1, 2}, 1}});
        CHECK(geometry::same_set(clipped(t, -1, 1), clipped(expected, -1, 1)));
        HPolytope active(2);
        active.add_equality(Vec{1, -1}, 0);
        CHECK(geometry::same_set(clipped(triangle_relax_neuron(1, 2), 1, 2), clipped(active, 1, 2)));
        HPolytope inactive(2);
        inactive.add_equality(Vec{0, 1}, 0);
        CHECK(geometry::same_set(clipped(triangle_relax_neuron(-2, -1), -2, -1), clipped(inactive, -2, -1)));
        CHECK_THROWS(triangle_relax_neuron(1, 0));
    }

    TEST_CASE("interval propagation examples")
    {
        auto diag = constructions::diagonal_network();
        auto r = ibp_bounds(diag, Vec{frac(1, 2), 0}, Vec{1, 1});
        CHECK(r.upper == Vec{frac(3, 2)});
        Network id(2);
        id.add_affine(identity(2), zeros(2));
        auto q = ibp_bounds(id, Vec{0, 0}, Vec{1, 1});
        CHECK(q.lower == Vec{0, 0});
        CHECK(q.upper == Vec{1, 1});
        auto z = ibp_bounds(constructions::zero_network(), Vec{-1}, Vec{1});
        CHECK(z.lower == Vec{-1});
        CHECK(z.upper == Vec{1});
        auto split = ibp_bounds(diag, Vec{0, 0}, Vec{1, 1}, {{1, 0, -1}});
        CHECK(split.upper == Vec{1});
    }

    TEST_CASE("relu graph hull")
    {
        auto tri = relu_graph_hull(HPolytope::box(Vec{-1}, Vec{1}), {0});
        auto expected = clipped(rows({{Vec{1, -1}, 0}, {Vec{0, -1}, 0}, {Vec{-1, 2}, 1}}), -1, 1);
        CHECK(geometry::same_set(tri, expected));
        auto stable = relu_graph_hull(HPolytope::box(Vec{1}, Vec{2}), {0});
        HPolytope line(2);
        line.add_equality(Vec{1, -1}, 0);
        CHECK(geometry::same_set(stable, clipped(line, 1, 2)));

        // inbound of the max case study: a = x1 - x2, b = x2 over the unit square
        HPolytope P(2);
        P.add_inequality(Vec{0, 1}, 1);
        P.add_inequality(Vec{0, -1}, 0);
        P.add_inequality(Vec{1, 1}, 1);
        P.add_inequality(Vec{-1, -1}, 0);
        auto H = relu_graph_hull(P, {0});
        CHECK(geometry::lp_optimize(H, Vec{0, 1, 1}, geometry::Sense::Maximize).value == 1);
        CHECK(geometry::lp_optimize(H, Vec{-1, -1, 1}, geometry::Sense::Maximize).value == 0);
        // both are facets: tight on a 2-dimensional face
        for (const Vec& normal : {Vec{0, 1, 1}, Vec{-1, -1, 1}}) {
            const Rational rhs = normal[0] == 0 ? Rational(1) : Rational(0);
            auto face = H;
            face.add_equality(normal, rhs);
            CHECK(geometry::affine_hull(geometry::vertices(face).points).free_coords.size() == 2);
        }
        auto pts = relu_graph_points(P, {0});
        CHECK(geometry::same_set(geometry::hull(VPolytope(3, pts)), H));
    }

    TEST_CASE("two-layer hull of the incompleteness example projects onto the hull of its image")
    {
        auto ex = constructions::incompleteness_example();
        auto first = ex.net.slice(0, ex.split_layer);
        auto H = layer_graph_hull(first, ex.input);
        geometry::ConstraintSystem s;
        s.add_block("x", 2);
        s.add_block("v1", 2);
        s.add_block("v2", 2);
        s.add_polytope(H, {0, 1, 2}, "hull");
        auto u = geometry::project_polytope(s, {2});
        std::vector<Vec> image;
        for (const auto& region : network::exact_output_graph(first, ex.input))
            for (const auto& p : region.points)
                image.emplace_back(p.begin() + 2, p.end());
        CHECK(geometry::same_set(u, geometry::hull(VPolytope(2, image))));
        // (1, 1) is in the hull but not in the image
        CHECK(geometry::contains(u, Vec{1, 1}));
    }

    TEST_CASE("single affine window is its graph")
    {
        Network affine(2);
        affine.add_affine({Vec{1, 2}, Vec{0, 1}}, Vec{1, 0});
        auto H = layer_graph_hull(affine, support::unit_box(2));
        CHECK(geometry::contains(H, Vec{1, 1, 4, 1}));
        CHECK_FALSE(geometry::contains(H, Vec{1, 1, 4, 0}));
    }

    TEST_CASE("named bounds")
    {
        auto max2 = constructions::max_network(2);
        auto X = support::unit_box(2);
        CHECK(bound(max2, X, RelaxationSpec::triangle()).upper == Vec{frac(3, 2)});
        auto mk = bound(max2, X, RelaxationSpec::multi_neuron(1));
        CHECK(mk.lower == Vec{0});
        CHECK(mk.upper == Vec{1});

        auto zero = constructions::zero_network();
        auto Z = HPolytope::box(Vec{-1}, Vec{1});
        auto m2 = bound(zero, Z, RelaxationSpec::multi_neuron(2));
        CHECK(m2.lower == Vec{0});
        CHECK(m2.upper == Vec{0});

        auto ex = constructions::incompleteness_example();
        CHECK(sgn(bound(ex.net, ex.input, RelaxationSpec::layerwise_optimal()).lower[0]) <= 0);
    }

    TEST_CASE("triangle on the zero network equals the hand-written linear program")
    {
        // variables (x, a, b, c, d): a = b = x, triangles on (a, c) and (b, d)
        HPolytope p(5);
        p.add_inequality(Vec{1, 0, 0, 0, 0}, 1);
        p.add_inequality(Vec{-1, 0, 0, 0, 0}, 1);
        p.add_equality(Vec{1, -1, 0, 0, 0}, 0);
        p.add_equality(Vec{1, 0, -1, 0, 0}, 0);
        for (std::size_t in : {1, 2}) {
            const std::size_t out = in + 2;
            Vec ge_in = zeros(5), ge_zero = zeros(5), le = zeros(5);
            ge_in[in] = 1;
            ge_in[out] = -1;
            ge_zero[out] = -1;
            le[out] = 2;
            le[in] = -1;
            p.add_inequality(ge_in, 0);
            p.add_inequality(ge_zero, 0);
            p.add_inequality(le, 1);
        }
        const Rational hi = *support::brute_max(p, Vec{0, 0, 0, 1, -1});
        const Rational lo = -*support::brute_max(p, Vec{0, 0, 0, -1, 1});
        auto tri = bound(constructions::zero_network(), HPolytope::box(Vec{-1}, Vec{1}), RelaxationSpec::triangle());
        CHECK(tri.lower == Vec{lo});
        CHECK(tri.upper == Vec{hi});
        CHECK(hi == frac(1, 2));
    }

    TEST_CASE("sign splits")
    {
        auto max2 = constructions::max_network(2);
        auto X = support::unit_box(2);
        for (auto spec : {RelaxationSpec::triangle(), RelaxationSpec::layerwise_optimal()}) {
            auto pos = bound(max2, X, spec, {{1, 0, 1}});
            auto neg = bound(max2, X, spec, {{1, 0, -1}});
            CHECK(pos.feasible);
            CHECK(neg.feasible);
            CHECK(pos.upper == Vec{1});
            CHECK(neg.upper == Vec{1});
        }
        // intervals lose the coupling: relu(x1 - x2) in [0, 1] plus x2 in [0, 1]
        CHECK(bound(max2, X, RelaxationSpec::ibp(), {{1, 0, 1}}).upper == Vec{2});
        CHECK(bound(max2, X, RelaxationSpec::ibp(), {{1, 0, -1}}).upper == Vec{1});
        // x1 - x2 <= -1/2 on this box, so the active side is empty
        HPolytope corner = HPolytope::box(Vec{0, 1}, Vec{frac(1, 2), 1});
        CHECK_FALSE(bound(max2, corner, RelaxationSpec::triangle(), {{1, 0, 1}}).feasible);
        CHECK_FALSE(bound(max2, corner, RelaxationSpec::layerwise_optimal(), {{1, 0, 1}}).feasible);
        CHECK_THROWS_AS(bound(max2, X, RelaxationSpec::triangle(), {{0, 0, 1}}), std::out_of_range);
    }

    TEST_CASE("soundness and nesting on random networks")
    {
        std::mt19937 rng(31);
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t d = support::pick(rng, 1, 2);
            auto net = support::random_network(rng, d, support::pick(rng, 1, 2), 3);
            auto X = support::random_box(rng, d);
            auto [lo, hi] = network::exact_bounds(net, X);
            std::size_t width = 1;
            for (std::size_t j = 0; j < net.depth(); ++j)
                if (net.is_relu(j))
                    width = std::max(width, net.block_dim(j));
            auto ibp = bound(net, X, RelaxationSpec::ibp());
            auto tri = bound(net, X, RelaxationSpec::triangle());
            auto mk = bound(net, X, RelaxationSpec::multi_neuron(width));
            auto p1 = bound(net, X, RelaxationSpec::layerwise_optimal());
            auto full = bound(net, X, RelaxationSpec::cross_layer(net.depth()));
            CHECK(contains_interval(p1, lo, hi));
            CHECK(contains_interval(mk, p1.lower, p1.upper));
            CHECK(contains_interval(tri, mk.lower, mk.upper));
            CHECK(contains_interval(ibp, tri.lower, tri.upper));
            CHECK(mk.lower == p1.lower);
            CHECK(mk.upper == p1.upper);
            // one window over the whole network is the hull of the graph
            CHECK(full.lower == lo);
            CHECK(full.upper == hi);
        }
    }

    TEST_CASE("witnesses lie in the input set and attain the relaxed bound")
    {
        auto net = constructions::max_network(3);
        auto X = support::unit_box(3);
        auto r = bound(net, X, RelaxationSpec::multi_neuron(1));
        REQUIRE(r.lower_witness.size() == 1);
        CHECK(geometry::contains(X, r.lower_witness[0]));
        CHECK(geometry::contains(X, r.upper_witness[0]));
        CHECK(r.neuron_bounds.size() == 2);
        CHECK(r.stats.lp_calls > 0);
    }
}
