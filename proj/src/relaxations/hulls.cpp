#include "cbar/relaxations.hpp"

#include <set>

namespace cbar::relax {

using geometry::HPolytope;
using geometry::VPolytope;

void relax_affine(const network::AffineLayer& layer, geometry::ConstraintSystem& system, std::size_t input_block,
                  const std::string& output)
{
    const geometry::Block in = system.block(input_block);
    if (in.dim != layer.in_dim())
        throw DimensionMismatch("relax_affine: layer input differs from block '" + in.name + "'");
    const std::size_t out_idx = system.add_block(output, layer.out_dim());
    const geometry::Block out = system.block(out_idx);
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
        Vec row = zeros(system.num_vars());
        row[out.offset + i] = 1;
        for (std::size_t j = 0; j < in.dim; ++j)
            row[in.offset + j] = -layer.A[i][j];
        system.add_eq(std::move(row), layer.b[i], "affine " + output);
    }
}

HPolytope triangle_relax_neuron(const Rational& l, const Rational& u)
{
    if (l > u)
        throw std::invalid_argument("triangle relaxation: lower bound above upper bound");
    HPolytope t(2);
    if (sgn(u) <= 0) {
        t.add_equality(Vec{0, 1}, 0);
    } else if (sgn(l) >= 0) {
        t.add_equality(Vec{-1, 1}, 0);
    } else {
        t.add_inequality(Vec{0, -1}, 0);
        t.add_inequality(Vec{1, -1}, 0);
        // y <= u (x - l) / (u - l)
        const Rational slope = u / (u - l);
        t.add_inequality(Vec{-slope, 1}, -slope * l);
    }
    return t;
}

namespace {

void collect_orthants(const HPolytope& piece, const std::vector<std::size_t>& unstable, std::size_t depth,
                      const std::vector<std::size_t>& I, std::set<Vec>& out)
{
    if (depth == unstable.size()) {
        VPolytope v;
        try {
            v = geometry::vertices(piece);
        } catch (const EmptyPolytope&) {
            return;
        }
        for (const auto& x : v.points) {
            Vec p = x;
            for (auto i : I)
                p.push_back(sgn(x[i]) > 0 ? x[i] : Rational(0));
            out.insert(std::move(p));
        }
        return;
    }
    for (int sign : {1, -1}) {
        HPolytope next = piece;
        Vec row = zeros(piece.dim);
        row[unstable[depth]] = -sign;
        next.add_inequality(std::move(row), 0);
        if (!geometry::is_empty(next))
            collect_orthants(next, unstable, depth + 1, I, out);
    }
}

}  // namespace

std::vector<Vec> relu_graph_points(const HPolytope& P, const std::vector<std::size_t>& I)
{
    for (auto i : I)
        if (i >= P.dim)
            throw std::out_of_range("relu_graph_points: neuron index out of range");
    const VPolytope v = geometry::vertices(P);
    std::vector<std::size_t> unstable;
    for (auto i : I) {
        bool neg = false, pos = false;
        for (const auto& x : v.points) {
            neg = neg || sgn(x[i]) < 0;
            pos = pos || sgn(x[i]) > 0;
        }
        if (neg && pos)
            unstable.push_back(i);
    }
    std::set<Vec> points;
    if (unstable.empty()) {
        for (const auto& x : v.points) {
            Vec p = x;
            for (auto i : I)
                p.push_back(sgn(x[i]) > 0 ? x[i] : Rational(0));
            points.insert(std::move(p));
        }
    } else {
        collect_orthants(P, unstable, 0, I, points);
    }
    return {points.begin(), points.end()};
}

HPolytope relu_graph_hull(const HPolytope& P, const std::vector<std::size_t>& I)
{
    return geometry::hull(VPolytope(P.dim + I.size(), relu_graph_points(P, I)));
}

std::vector<Vec> layer_graph_points(const network::Network& sub, const HPolytope& P,
                                    const std::vector<network::SignConstraint>& forced)
{
    std::set<Vec> points;
    for (const auto& region : network::enumerate_regions(sub, P, forced)) {
        const VPolytope v = geometry::vertices(region.domain);
        for (const auto& x : v.points) {
            Vec joint;
            for (const auto& m : region.block_maps) {
                Vec y = m.apply(x);
                joint.insert(joint.end(), y.begin(), y.end());
            }
            points.insert(std::move(joint));
        }
    }
    if (points.empty())
        throw EmptyPolytope("layer_graph_points: empty input set");
    return {points.begin(), points.end()};
}

HPolytope layer_graph_hull(const network::Network& sub, const HPolytope& P,
                           const std::vector<network::SignConstraint>& forced)
{
    std::size_t dim = 0;
    for (std::size_t j = 0; j <= sub.depth(); ++j)
        dim += sub.block_dim(j);
    return geometry::hull(VPolytope(dim, layer_graph_points(sub, P, forced)));
}

}  // namespace cbar::relax
