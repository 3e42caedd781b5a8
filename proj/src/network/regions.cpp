#include "cbar/caps.hpp"
#include "cbar/network.hpp"

namespace cbar::network {

using geometry::HPolytope;
using geometry::LpStatus;
using geometry::Sense;

std::vector<std::pair<Vec, Vec>> propagate_intervals(const Network& net, const Vec& lower, const Vec& upper)
{
    if (lower.size() != net.input_dim() || upper.size() != net.input_dim())
        throw DimensionMismatch("propagate_intervals: box of wrong dimension");
    std::vector<std::pair<Vec, Vec>> out{{lower, upper}};
    for (const auto& layer : net.layers()) {
        const auto& [lo, hi] = out.back();
        Vec nlo, nhi;
        if (auto* a = std::get_if<AffineLayer>(&layer)) {
            for (std::size_t i = 0; i < a->out_dim(); ++i) {
                Rational l = a->b[i], u = a->b[i];
                for (std::size_t j = 0; j < a->in_dim(); ++j) {
                    const Rational& w = a->A[i][j];
                    if (sgn(w) > 0) {
                        l += w * lo[j];
                        u += w * hi[j];
                    } else if (sgn(w) < 0) {
                        l += w * hi[j];
                        u += w * lo[j];
                    }
                }
                nlo.push_back(std::move(l));
                nhi.push_back(std::move(u));
            }
        } else {
            for (std::size_t i = 0; i < lo.size(); ++i) {
                nlo.push_back(sgn(lo[i]) > 0 ? lo[i] : Rational(0));
                nhi.push_back(sgn(hi[i]) > 0 ? hi[i] : Rational(0));
            }
        }
        out.emplace_back(std::move(nlo), std::move(nhi));
    }
    return out;
}

std::size_t unstable_relu_count(const Network& net, const HPolytope& X)
{
    auto [lo, hi] = geometry::bounding_box(X);
    auto intervals = propagate_intervals(net, lo, hi);
    std::size_t n = 0;
    for (std::size_t j = 0; j < net.depth(); ++j) {
        if (!net.is_relu(j))
            continue;
        const auto& [l, u] = intervals[j];
        for (std::size_t i = 0; i < l.size(); ++i)
            n += sgn(l[i]) < 0 && sgn(u[i]) > 0;
    }
    return n;
}

namespace {

struct Walker {
    const Network& net;
    const std::vector<SignConstraint>& forced;
    std::vector<LinearRegion> regions;

    struct State {
        HPolytope domain;
        AffineMap current;
        std::vector<AffineMap> blocks;
        std::vector<int> signs;
    };

    const SignConstraint* forced_sign(std::size_t layer, std::size_t neuron) const
    {
        for (const auto& f : forced)
            if (f.layer == layer && f.neuron == neuron)
                return &f;
        return nullptr;
    }

    // Constrains sign * (a.x + b) >= 0.
    static void restrict(HPolytope& domain, const Vec& a, const Rational& b, int sign)
    {
        Vec row = a;
        if (sign > 0)
            for (auto& v : row)
                v = -v;
        domain.add_inequality(std::move(row), sign > 0 ? Rational(b) : Rational(-b));
    }

    void visit(std::size_t layer, std::size_t neuron, State s)
    {
        while (layer < net.depth()) {
            if (auto* a = std::get_if<AffineLayer>(&net.layer(layer))) {
                AffineMap next{mat_mul(a->A, s.current.A), a->b};
                Vec shift = mat_vec(a->A, s.current.b);
                for (std::size_t i = 0; i < shift.size(); ++i)
                    next.b[i] += shift[i];
                s.current = std::move(next);
                s.blocks.push_back(s.current);
                ++layer;
                continue;
            }
            const std::size_t width = s.current.A.size();
            for (; neuron < width; ++neuron) {
                const Vec& a = s.current.A[neuron];
                const Rational& b = s.current.b[neuron];
                int sign = 0;
                if (const SignConstraint* f = forced_sign(layer, neuron)) {
                    restrict(s.domain, a, b, f->sign);
                    if (geometry::is_empty(s.domain))
                        return;
                    sign = f->sign;
                } else {
                    bool constant = true;
                    for (const auto& v : a)
                        if (sgn(v) != 0)
                            constant = false;
                    if (constant) {
                        sign = sgn(b) >= 0 ? 1 : -1;
                    } else {
                        auto lo = geometry::lp_optimize(s.domain, a, Sense::Minimize);
                        if (sgn(lo.value + b) >= 0) {
                            sign = 1;
                        } else {
                            auto hi = geometry::lp_optimize(s.domain, a, Sense::Maximize);
                            if (sgn(hi.value + b) <= 0) {
                                sign = -1;
                            } else {
                                State inactive = s;
                                restrict(inactive.domain, a, b, -1);
                                inactive.signs.push_back(-1);
                                restrict(s.domain, a, b, 1);
                                s.signs.push_back(1);
                                visit_after_sign(layer, neuron, std::move(s));
                                visit_after_sign(layer, neuron, std::move(inactive));
                                return;
                            }
                        }
                    }
                }
                s.signs.push_back(sign);
            }
            apply_relu(s);
            ++layer;
            neuron = 0;
        }
        regions.push_back(LinearRegion{ActivationPattern{std::move(s.signs)}, std::move(s.domain),
                                       std::move(s.current), std::move(s.blocks)});
    }

    void visit_after_sign(std::size_t layer, std::size_t neuron, State s)
    {
        if (neuron + 1 < s.current.A.size()) {
            visit(layer, neuron + 1, std::move(s));
            return;
        }
        apply_relu(s);
        visit(layer + 1, 0, std::move(s));
    }

    // Zeroes inactive rows using the signs just recorded for this layer.
    static void apply_relu(State& s)
    {
        const std::size_t width = s.current.A.size();
        const std::size_t first = s.signs.size() - width;
        for (std::size_t i = 0; i < width; ++i)
            if (s.signs[first + i] < 0) {
                for (auto& v : s.current.A[i])
                    v = 0;
                s.current.b[i] = 0;
            }
        s.blocks.push_back(s.current);
    }
};

}  // namespace

std::vector<LinearRegion> enumerate_regions(const Network& net, const HPolytope& X,
                                            const std::vector<SignConstraint>& forced)
{
    if (X.dim != net.input_dim())
        throw DimensionMismatch("enumerate_regions: input set of wrong dimension");
    for (const auto& f : forced)
        if (f.layer >= net.depth() || !net.is_relu(f.layer) || f.neuron >= net.block_dim(f.layer))
            throw std::out_of_range("enumerate_regions: sign constraint on a non-ReLU neuron");
    if (geometry::is_empty(X))
        return {};
    const std::size_t unstable = unstable_relu_count(net, X);
    if (unstable > static_cast<std::size_t>(caps().oracle_relus))
        throw CapExceeded("region oracle: " + std::to_string(unstable) + " unstable ReLU neurons exceed cap " +
                          std::to_string(caps().oracle_relus));

    Walker w{net, forced, {}};
    Walker::State root{X, AffineMap{identity(X.dim), zeros(X.dim)}, {}, {}};
    root.blocks.push_back(root.current);
    w.visit(0, 0, std::move(root));
    return std::move(w.regions);
}

std::pair<Vec, Vec> exact_bounds(const std::vector<LinearRegion>& regions, std::size_t output_dim)
{
    if (regions.empty())
        throw EmptyPolytope("exact_bounds: empty input set");
    Vec lower(output_dim), upper(output_dim);
    bool first = true;
    for (const auto& r : regions) {
        for (std::size_t i = 0; i < output_dim; ++i) {
            auto lo = geometry::lp_optimize(r.domain, r.map.A[i], Sense::Minimize);
            auto hi = geometry::lp_optimize(r.domain, r.map.A[i], Sense::Maximize);
            if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
                throw UnboundedPolytope("exact_bounds: input set must be bounded");
            Rational l = lo.value + r.map.b[i];
            Rational u = hi.value + r.map.b[i];
            if (first || l < lower[i])
                lower[i] = l;
            if (first || u > upper[i])
                upper[i] = u;
        }
        first = false;
    }
    return {lower, upper};
}

std::pair<Vec, Vec> exact_bounds(const Network& net, const HPolytope& X)
{
    return exact_bounds(enumerate_regions(net, X), net.output_dim());
}

std::vector<geometry::VPolytope> exact_output_graph(const Network& net, const HPolytope& X)
{
    std::vector<geometry::VPolytope> pieces;
    for (const auto& r : enumerate_regions(net, X)) {
        geometry::VPolytope v = geometry::vertices(r.domain);
        geometry::VPolytope piece(net.input_dim() + net.output_dim(), {});
        for (const auto& x : v.points) {
            Vec p = x;
            Vec y = r.map.apply(x);
            p.insert(p.end(), y.begin(), y.end());
            piece.points.push_back(std::move(p));
        }
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

std::size_t count_activation_patterns(const Network& net, const HPolytope& X)
{
    return enumerate_regions(net, X).size();
}

}  // namespace cbar::network
