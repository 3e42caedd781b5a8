#include "cbar/geometry.hpp"

#include <set>

namespace cbar::geometry {

HPolytope convex_union(const std::vector<VPolytope>& parts)
{
    if (parts.empty())
        throw std::invalid_argument("convex_union: no parts");
    VPolytope all(parts.front().dim, {});
    for (const auto& part : parts) {
        if (part.dim != all.dim)
            throw DimensionMismatch("convex_union: parts differ in dimension");
        all.points.insert(all.points.end(), part.points.begin(), part.points.end());
    }
    return hull(all);
}

bool contains(const HPolytope& p, const Vec& point)
{
    if (point.size() != p.dim)
        throw DimensionMismatch("contains: point of wrong dimension");
    for (std::size_t i = 0; i < p.rows(); ++i)
        if (dot(p.A[i], point) > p.b[i])
            return false;
    return true;
}

HPolytope intersect(const HPolytope& p, const HPolytope& q)
{
    if (p.dim != q.dim)
        throw DimensionMismatch("intersect: polytopes differ in dimension");
    HPolytope out = p;
    for (std::size_t i = 0; i < q.rows(); ++i)
        out.add_inequality(q.A[i], q.b[i]);
    return out;
}

bool is_empty(const HPolytope& p)
{
    return lp_optimize(p, zeros(p.dim), Sense::Maximize).status == LpStatus::Infeasible;
}

std::pair<Vec, Vec> bounding_box(const HPolytope& p)
{
    ConstraintSystem sys = system_of(p, "x");
    Vec lower(p.dim), upper(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) {
        Vec e = zeros(p.dim);
        e[j] = 1;
        for (auto sense : {Sense::Minimize, Sense::Maximize}) {
            LpResult r = lp_optimize(sys, e, sense);
            if (r.status == LpStatus::Infeasible)
                throw EmptyPolytope("bounding_box: empty polytope");
            if (r.status == LpStatus::Unbounded)
                throw UnboundedPolytope("bounding_box: unbounded polytope");
            (sense == Sense::Minimize ? lower : upper)[j] = r.value;
        }
    }
    return {lower, upper};
}

bool includes(const HPolytope& outer, const HPolytope& inner)
{
    if (outer.dim != inner.dim)
        throw DimensionMismatch("includes: polytopes differ in dimension");
    ConstraintSystem sys = system_of(inner, "x");
    for (std::size_t i = 0; i < outer.rows(); ++i) {
        LpResult r = lp_optimize(sys, outer.A[i], Sense::Maximize);
        if (r.status == LpStatus::Infeasible)
            return true;
        if (r.status == LpStatus::Unbounded || r.value > outer.b[i])
            return false;
    }
    return true;
}

bool same_set(const HPolytope& p, const HPolytope& q)
{
    return includes(p, q) && includes(q, p);
}

HPolytope remove_redundant(const HPolytope& p)
{
    std::vector<bool> dropped(p.rows(), false);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        HPolytope rest(p.dim);
        for (std::size_t j = 0; j < p.rows(); ++j)
            if (j != i && !dropped[j])
                rest.add_inequality(p.A[j], p.b[j]);
        rest.add_inequality(p.A[i], p.b[i] + 1);
        LpResult r = lp_optimize(rest, p.A[i], Sense::Maximize);
        if (r.status == LpStatus::Infeasible)
            return p;
        if (r.optimal() && r.value <= p.b[i])
            dropped[i] = true;
    }
    HPolytope out(p.dim);
    for (std::size_t i = 0; i < p.rows(); ++i)
        if (!dropped[i])
            out.add_inequality(p.A[i], p.b[i]);
    return out;
}

VPolytope extreme_points(const VPolytope& v)
{
    std::vector<Vec> pts;
    std::set<Vec> seen;
    for (const auto& x : v.points)
        if (seen.insert(x).second)
            pts.push_back(x);
    if (pts.size() <= 2)
        return VPolytope(v.dim, pts);

    std::vector<bool> dropped(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i && !dropped[j])
                others.push_back(j);
        // pts[i] is redundant iff it is a convex combination of the others
        ConstraintSystem s;
        s.add_block("lambda", others.size());
        Vec sum(others.size(), Rational(1));
        s.add_eq(sum, Rational(1));
        for (std::size_t k = 0; k < others.size(); ++k) {
            Vec e = zeros(others.size());
            e[k] = -1;
            s.add_le(std::move(e), Rational(0));
        }
        for (std::size_t c = 0; c < v.dim; ++c) {
            Vec row(others.size());
            for (std::size_t k = 0; k < others.size(); ++k)
                row[k] = pts[others[k]][c];
            s.add_eq(std::move(row), pts[i][c]);
        }
        if (lp_optimize(s, zeros(others.size()), Sense::Maximize).optimal())
            dropped[i] = true;
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!dropped[i])
            out.push_back(std::move(pts[i]));
    return VPolytope(v.dim, std::move(out));
}

}  // namespace cbar::geometry
