// Acceptance checks for the library. Each criterion prints one PASS/FAIL line;
// the exit status is nonzero when any criterion fails.

#include "support.hpp"

#include "cbar/verifiers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace cbar;
using geometry::HPolytope;
using geometry::VPolytope;
using network::Network;
using relax::BoundReport;
using relax::RelaxationSpec;

namespace {

struct Check {
    std::ostringstream log;
    bool ok = true;

    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            log << "    failed: " << what << '\n';
        }
    }
};

bool contains_interval(const Vec& outer_lo, const Vec& outer_hi, const Vec& lo, const Vec& hi)
{
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (outer_lo[i] > lo[i] || outer_hi[i] < hi[i])
            return false;
    return true;
}

std::size_t max_relu_width(const Network& net)
{
    std::size_t w = 1;
    for (std::size_t j = 0; j < net.depth(); ++j)
        if (net.is_relu(j))
            w = std::max(w, net.block_dim(j));
    return w;
}

// vertices of X plus a grid of its bounding box restricted to X
std::vector<Vec> sample_points(const HPolytope& X)
{
    auto pts = geometry::vertices(X).points;
    auto [lo, hi] = geometry::bounding_box(X);
    const int steps = 6;
    std::vector<Vec> grid{Vec{}};
    for (std::size_t i = 0; i < X.dim; ++i) {
        std::vector<Vec> next;
        for (const auto& g : grid)
            for (int k = 0; k <= steps; ++k) {
                Vec p = g;
                p.push_back(lo[i] + (hi[i] - lo[i]) * frac(k, steps));
                next.push_back(std::move(p));
            }
        grid = std::move(next);
    }
    for (auto& p : grid)
        if (geometry::contains(X, p))
            pts.push_back(std::move(p));
    return pts;
}

void incompleteness(Check& c)
{
    auto ex = constructions::incompleteness_example();
    auto [lo, hi] = network::exact_bounds(ex.net, ex.input);
    auto p1 = relax::bound(ex.net, ex.input, RelaxationSpec::layerwise_optimal());
    c.log << "    exact min " << to_string(lo[0]) << ", p1 lower " << to_string(p1.lower[0]) << '\n';
    c.expect(lo == Vec{1}, "exact minimum is 1");
    c.expect(support::brute_exact_bounds(ex.net, ex.input).first == Vec{1}, "brute-force minimum is 1");
    c.expect(sgn(p1.lower[0]) <= 0, "layerwise optimal lower bound <= 0");
    c.expect(lo[0] - p1.lower[0] >= 1, "gap >= 1");
}

void max_case_study(Check& c)
{
    auto X = support::unit_box(2);
    auto tri = relax::bound(constructions::max_network(2), X, RelaxationSpec::triangle());
    c.log << "    triangle upper " << to_string(tri.upper[0]) << '\n';
    c.expect(tri.upper == Vec{frac(3, 2)}, "triangle upper bound is 3/2");
    for (std::size_t d = 2; d <= 5; ++d) {
        auto mk = relax::bound(constructions::max_network(d), support::unit_box(d), RelaxationSpec::multi_neuron(1));
        c.log << "    d=" << d << " mk:1 " << to_string(mk.lower) << " " << to_string(mk.upper) << '\n';
        c.expect(mk.lower == Vec{0} && mk.upper == Vec{1}, "mk:1 bounds are (0, 1) for d=" + std::to_string(d));
    }
}

void zero_network(Check& c)
{
    auto net = constructions::zero_network();
    auto X = HPolytope::box(Vec{-1}, Vec{1});
    auto tri = relax::bound(net, X, RelaxationSpec::triangle());
    auto mk = relax::bound(net, X, RelaxationSpec::multi_neuron(2));
    c.log << "    triangle " << to_string(tri.lower) << " " << to_string(tri.upper) << ", mk:2 " << to_string(mk.lower) << " "
          << to_string(mk.upper) << '\n';
    c.expect(tri.lower == Vec{-1} && tri.upper == Vec{1}, "triangle bounds are [-1, 1]");
    c.expect(mk.lower == Vec{0} && mk.upper == Vec{0}, "mk:2 bounds are [0, 0]");
}

void layerwise_gap(Check& c)
{
    auto X = support::unit_box(1);
    for (int T : {5, 100}) {
        auto w = constructions::gap_network(X, T);
        auto [lo, hi] = network::exact_bounds(w.network, X);
        auto p1 = relax::bound(w.network, X, RelaxationSpec::layerwise_optimal());
        c.log << "    T=" << T << " exact min " << to_string(lo[0]) << ", p1 lower " << to_string(p1.lower[0])
              << '\n';
        c.expect(lo == Vec{T}, "exact minimum is T for T=" + std::to_string(T));
        c.expect(sgn(p1.lower[0]) <= 0, "p1 lower <= 0 for T=" + std::to_string(T));
        c.expect(lo[0] - p1.lower[0] >= T, "gap >= T for T=" + std::to_string(T));
    }
}

void cross_layer_gap(Check& c)
{
    auto X = support::unit_box(1);
    auto w = constructions::gap_network(X, 5);
    auto [f1, f2] = network::split(w.network, w.split_layer);
    auto pumped = constructions::pump(f1, f2, frac(1, 2));
    const std::size_t r = std::max<std::size_t>(1, pumped.depth / 2);
    auto [lo, hi] = network::exact_bounds(pumped.network, X);
    auto windowed = relax::bound(pumped.network, X, RelaxationSpec::cross_layer(r));
    c.log << "    depth " << pumped.depth << ", window " << r << ", exact min " << to_string(lo[0]) << ", pr lower "
          << to_string(windowed.lower[0]) << '\n';
    c.expect(r == pumped.window, "window is max(1, floor(depth / 2))");
    c.expect(lo == Vec{5}, "pumped network keeps minimum 5");
    c.expect(lo[0] - windowed.lower[0] >= 5, "window relaxation keeps gap >= 5");

    auto [ulo, uhi] = network::exact_bounds(w.network, X);
    auto full = relax::bound(w.network, X, RelaxationSpec::cross_layer(w.network.depth()));
    c.log << "    unpumped full depth " << to_string(full.lower) << " " << to_string(full.upper) << '\n';
    c.expect(full.lower == ulo && full.upper == uhi, "full-depth window is exact on the unpumped witness");
}

void transform(Check& c)
{
    auto ex = constructions::incompleteness_example();
    std::vector<std::pair<std::string, std::pair<Network, HPolytope>>> cases{
        {"incompleteness example", {ex.net, ex.input}},
        {"max_network(2)", {constructions::max_network(2), support::unit_box(2)}}};
    for (const auto& [name, nx] : cases) {
        const auto& [net, X] = nx;
        auto g = constructions::exact_transform(net, X);
        bool same = true;
        for (const auto& x : sample_points(X))
            same = same && network::eval(g, x) == network::eval(net, x);
        auto [lo, hi] = network::exact_bounds(net, X);
        auto p1 = relax::bound(g, X, RelaxationSpec::layerwise_optimal());
        c.log << "    " << name << ": exact " << to_string(lo) << " " << to_string(hi) << ", p1 on transform "
              << to_string(p1.lower) << " " << to_string(p1.upper) << '\n';
        c.expect(same, name + ": transformed network agrees pointwise");
        c.expect(p1.lower == lo && p1.upper == hi, name + ": p1 on the transformed network is exact");
    }
}

void partition_complexity(Check& c)
{
    for (std::size_t d = 2; d <= 6; ++d) {
        auto net = constructions::max_network(d);
        auto X = support::unit_box(d);
        const std::size_t expected = std::size_t{1} << (d - 1);
        auto tri = verify::bab(net, X, RelaxationSpec::triangle(), 4096);
        auto part = verify::polytope_partition(net, X, 4096);
        auto patterns = network::count_activation_patterns(net, X);
        auto mn = verify::bab(net, X, RelaxationSpec::multi_neuron(d), 4096);
        c.log << "    d=" << d << " patterns " << patterns << ", bab triangle " << tri.subproblem_count
              << ", partition " << part.subproblem_count << ", bab multi-neuron " << mn.subproblem_count << '\n';
        const std::string at = " for d=" + std::to_string(d);
        c.expect(tri.status == verify::Status::Exact && tri.subproblem_count == expected,
                 "bab triangle leaves are 2^(d-1)" + at);
        c.expect(part.status == verify::Status::Exact && part.subproblem_count == 1, "partition count is 1" + at);
        c.expect(part.lower == Vec{0} && part.upper == Vec{1}, "partition bounds are exact" + at);
        c.expect(patterns == expected, "activation patterns are 2^(d-1)" + at);
        c.expect(mn.status == verify::Status::Exact && mn.subproblem_count == 1, "bab multi-neuron leaves are 1" + at);
    }
}

void ibp_divergence(Check& c)
{
    auto net = constructions::diagonal_network();
    auto r = verify::bab(net, support::unit_box(2), RelaxationSpec::ibp(), 10000);
    c.log << "    bab ibp: " << r.subproblem_count << " leaves, upper " << to_string(r.upper[0]) << '\n';
    c.expect(r.status == verify::Status::BudgetExhausted, "bab ibp exhausts the budget");
    c.expect(r.upper[0] > 1, "bab ibp upper bound stays above 1");
    auto direct = relax::ibp_bounds(net, Vec{frac(1, 2), 0}, Vec{1, 1});
    c.log << "    ibp on [1/2,1]x[0,1]: upper " << to_string(direct.upper[0]) << '\n';
    c.expect(direct.upper == Vec{frac(3, 2)}, "ibp upper on the half box is 3/2");
}

void soundness(Check& c)
{
    std::mt19937 rng(9001);
    int failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = support::pick(rng, 1, 2);
        auto net = support::random_network(rng, d, support::pick(rng, 1, 3), 3);
        auto X = support::random_box(rng, d);
        auto [lo, hi] = network::exact_bounds(net, X);
        auto ibp = relax::bound(net, X, RelaxationSpec::ibp());
        auto tri = relax::bound(net, X, RelaxationSpec::triangle());
        auto mk = relax::bound(net, X, RelaxationSpec::multi_neuron(max_relu_width(net)));
        auto p1 = relax::bound(net, X, RelaxationSpec::layerwise_optimal());
        auto p2 = relax::bound(net, X, RelaxationSpec::cross_layer(2));
        bool ok = true;
        for (const auto* r : {&ibp, &tri, &mk, &p1, &p2})
            ok = ok && contains_interval(r->lower, r->upper, lo, hi);
        ok = ok && contains_interval(mk.lower, mk.upper, p1.lower, p1.upper);
        ok = ok && contains_interval(tri.lower, tri.upper, mk.lower, mk.upper);
        ok = ok && contains_interval(ibp.lower, ibp.upper, tri.lower, tri.upper);
        ok = ok && mk.lower == p1.lower && mk.upper == p1.upper;
        if (!ok && failures++ < 5)
            c.log << "    trial " << trial << " violates soundness or nesting\n";
        c.expect(ok, "trial " + std::to_string(trial));
    }
    c.log << "    200 networks, " << failures << " failures\n";
}

void projection_and_hull(Check& c)
{
    std::mt19937 rng(9002);
    int failures = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = support::pick(rng, 1, 2);
        auto net = support::random_network(rng, d, support::pick(rng, 1, 3), 3);
        auto X = support::random_box(rng, d);
        const std::size_t i = support::pick(rng, 1, net.depth() - 1);
        auto [f1, f2] = network::split(net, i);
        bool ok = true;

        // the later layers do not cut the projection onto the split block
        for (auto spec : {RelaxationSpec::triangle(), RelaxationSpec::multi_neuron(2),
                          RelaxationSpec::layerwise_optimal()}) {
            auto full = relax::bound(net, X, spec);
            auto prefix = relax::bound(f1, X, spec);
            const auto name = network::block_name(i);
            auto a = geometry::project_polytope(full.system, {full.system.block_index(name)});
            auto b = geometry::project_polytope(prefix.system, {prefix.system.block_index(name)});
            if (!geometry::same_set(a, b)) {
                ok = false;
                c.log << "    trial " << trial << ": projection differs under " << spec.name() << '\n';
            }
        }

        // the optimal layerwise bound is no better than f2 over the hull of f1(X)
        std::vector<Vec> image;
        for (const auto& region : network::exact_output_graph(f1, X))
            for (const auto& p : region.points)
                image.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(d), p.end());
        auto hull = geometry::hull(VPolytope(f1.output_dim(), image));
        auto [hlo, hhi] = network::exact_bounds(f2, hull);
        auto p1 = relax::bound(net, X, RelaxationSpec::layerwise_optimal());
        if (!(p1.lower[0] <= hlo[0] && p1.upper[0] >= hhi[0])) {
            ok = false;
            c.log << "    trial " << trial << ": p1 " << to_string(p1.lower) << " " << to_string(p1.upper)
                  << " tighter than f2 over the hull " << to_string(hlo) << " " << to_string(hhi) << '\n';
        }
        if (!ok)
            ++failures;
        c.expect(ok, "trial " + std::to_string(trial));
    }
    c.log << "    50 networks, " << failures << " failures\n";
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"incompleteness of the optimal layerwise relaxation", incompleteness},
        {"max network case study", max_case_study},
        {"zero network", zero_network},
        {"layerwise gap network", layerwise_gap},
        {"cross-layer gap after pumping", cross_layer_gap},
        {"exact transform", transform},
        {"partition complexity separation", partition_complexity},
        {"interval branch and bound divergence", ibp_divergence},
        {"soundness and nesting on random networks", soundness},
        {"projection and hull properties on random networks", projection_and_hull},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[k].second(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.log << "    exception: " << e.what() << '\n';
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[160];
        std::snprintf(line, sizeof line, "criterion %zu: %s (%.2f s) %s", k + 1, c.ok ? "PASS" : "FAIL", secs,
                      criteria[k].first.c_str());
        std::cout << line << '\n' << c.log.str() << std::flush;
        failed += c.ok ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
