#include "cbar/caps.hpp"
#include "cbar/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>

namespace cbar::geometry {

namespace {

class ZeroSet {
public:
    explicit ZeroSet(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    ZeroSet meet(const ZeroSet& o) const
    {
        ZeroSet r;
        r.words_.resize(words_.size());
        for (std::size_t k = 0; k < words_.size(); ++k)
            r.words_[k] = words_[k] & o.words_[k];
        return r;
    }

    bool subset_of(const ZeroSet& o) const
    {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~o.words_[k])
                return false;
        return true;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct Ray {
    Vec z;
    ZeroSet zeros;
};

// Rows of m forming a basis of its row space, greedily in order.
std::vector<std::size_t> basis_rows(const Mat& m, std::size_t cols)
{
    std::vector<std::size_t> chosen;
    Mat reduced;
    std::vector<std::size_t> pivots;
    for (std::size_t i = 0; i < m.size() && chosen.size() < cols; ++i) {
        Vec r = m[i];
        for (std::size_t k = 0; k < reduced.size(); ++k) {
            const Rational f = r[pivots[k]];
            if (sgn(f) == 0)
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (sgn(reduced[k][j]) != 0)
                    r[j] -= f * reduced[k][j];
        }
        std::size_t p = 0;
        while (p < cols && sgn(r[p]) == 0)
            ++p;
        if (p == cols)
            continue;
        const Rational inv = 1 / r[p];
        for (auto& x : r)
            x *= inv;
        for (auto& other : reduced) {
            const Rational f = other[p];
            if (sgn(f) == 0)
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (sgn(r[j]) != 0)
                    other[j] -= f * r[j];
        }
        reduced.push_back(std::move(r));
        pivots.push_back(p);
        chosen.push_back(i);
    }
    return chosen;
}

Mat inverse(Mat a)
{
    const std::size_t n = a.size();
    Mat aug(n, zeros(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    row_reduce(aug);
    Mat inv(n, zeros(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv[i][j] = aug[i][n + j];
    return inv;
}

std::size_t rank_of(Mat m)
{
    return row_reduce(m).size();
}

}  // namespace

std::vector<Vec> extreme_rays(const Mat& m)
{
    if (m.empty())
        throw std::invalid_argument("extreme_rays: no constraints");
    const std::size_t d = m.front().size();
    const std::vector<std::size_t> basis = basis_rows(m, d);
    if (basis.size() < d)
        throw std::invalid_argument("extreme_rays: cone is not pointed");

    Mat b;
    for (auto i : basis)
        b.push_back(m[i]);
    Mat inv = inverse(b);

    std::vector<Ray> rays;
    for (std::size_t k = 0; k < d; ++k) {
        Ray r{zeros(d), ZeroSet(m.size())};
        for (std::size_t j = 0; j < d; ++j)
            r.z[j] = inv[j][k];
        make_primitive(r.z);
        for (std::size_t other = 0; other < d; ++other)
            if (other != k)
                r.zeros.set(basis[other]);
        rays.push_back(std::move(r));
    }

    std::vector<bool> in_basis(m.size(), false);
    for (auto i : basis)
        in_basis[i] = true;

    for (std::size_t i = 0; i < m.size(); ++i) {
        if (in_basis[i])
            continue;
        std::vector<Rational> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        for (std::size_t k = 0; k < rays.size(); ++k) {
            val[k] = dot(m[i], rays[k].z);
            int s = sgn(val[k]);
            if (s > 0)
                pos.push_back(k);
            else if (s < 0)
                neg.push_back(k);
        }
        if (neg.empty()) {
            for (std::size_t k = 0; k < rays.size(); ++k)
                if (sgn(val[k]) == 0)
                    rays[k].zeros.set(i);
            continue;
        }
        for (std::size_t k = 0; k < rays.size(); ++k)
            if (sgn(val[k]) >= 0) {
                next.push_back(rays[k]);
                if (sgn(val[k]) == 0)
                    next.back().zeros.set(i);
            }
        for (auto p : pos)
            for (auto n : neg) {
                ZeroSet common = rays[p].zeros.meet(rays[n].zeros);
                if (common.count() + 2 < d)
                    continue;
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size() && adjacent; ++k)
                    if (k != p && k != n && common.subset_of(rays[k].zeros))
                        adjacent = false;
                if (!adjacent)
                    continue;
                Ray r{zeros(d), common};
                for (std::size_t j = 0; j < d; ++j)
                    r.z[j] = val[p] * rays[n].z[j] - val[n] * rays[p].z[j];
                make_primitive(r.z);
                r.zeros.set(i);
                next.push_back(std::move(r));
            }
        rays = std::move(next);
    }

    std::vector<Vec> out;
    std::set<Vec> seen;
    for (auto& r : rays)
        if (seen.insert(r.z).second)
            out.push_back(std::move(r.z));
    return out;
}

VPolytope vertices(const HPolytope& p)
{
    ++counters().vertex_calls;
    const std::size_t d = p.dim;
    if (d == 0) {
        for (const auto& x : p.b)
            if (sgn(x) < 0)
                throw EmptyPolytope("vertices: empty polytope");
        return VPolytope(0, {Vec{}});
    }

    ConstraintSystem sys = system_of(p, "x");
    Mat eq;
    for (const auto& c : sys.constraints())
        if (c.relation == Relation::Equal)
            eq.push_back(c.coeffs);
    const std::size_t intrinsic = d - rank_of(eq);
    if (intrinsic > static_cast<std::size_t>(caps().geometry_dim))
        throw CapExceeded("vertices: dimension " + std::to_string(intrinsic) + " exceeds cap " +
                          std::to_string(caps().geometry_dim));

    if (rank_of(p.A) < d) {
        LpResult r = lp_optimize(sys, zeros(d), Sense::Maximize);
        if (r.status == LpStatus::Infeasible)
            throw EmptyPolytope("vertices: empty polytope");
        throw UnboundedPolytope("vertices: polytope contains a line");
    }

    Mat cone;
    for (std::size_t i = 0; i < p.rows(); ++i) {
        Vec row(d + 1);
        row[0] = p.b[i];
        for (std::size_t j = 0; j < d; ++j)
            row[j + 1] = -p.A[i][j];
        cone.push_back(std::move(row));
    }
    Vec t = zeros(d + 1);
    t[0] = 1;
    cone.push_back(std::move(t));

    std::vector<Vec> points;
    bool recession = false;
    for (const auto& r : extreme_rays(cone)) {
        if (sgn(r[0]) == 0) {
            recession = true;
            continue;
        }
        Vec x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = r[j + 1] / r[0];
        points.push_back(std::move(x));
    }
    if (points.empty())
        throw EmptyPolytope("vertices: empty polytope");
    if (recession)
        throw UnboundedPolytope("vertices: unbounded polytope");
    std::sort(points.begin(), points.end());
    return VPolytope(d, std::move(points));
}

HPolytope hull(const VPolytope& v)
{
    ++counters().hull_calls;
    if (v.points.empty())
        throw std::invalid_argument("hull: no points");
    const std::size_t d = v.dim;
    AffineHull ah = affine_hull(v.points);
    const std::size_t k = ah.free_coords.size();
    if (k > static_cast<std::size_t>(caps().geometry_dim))
        throw CapExceeded("hull: dimension " + std::to_string(k) + " exceeds cap " +
                          std::to_string(caps().geometry_dim));

    HPolytope out(d);
    for (std::size_t i = 0; i < ah.normals.size(); ++i)
        out.add_equality(ah.normals[i], ah.offsets[i]);
    if (k == 0)
        return out;

    std::set<Vec> projected;
    for (const auto& pt : v.points) {
        Vec q(k);
        for (std::size_t j = 0; j < k; ++j)
            q[j] = pt[ah.free_coords[j]];
        projected.insert(std::move(q));
    }
    // valid inequalities a.x <= beta form the cone {(beta, a) : beta - a.v >= 0}
    Mat cone;
    for (const auto& q : projected) {
        Vec row(k + 1);
        row[0] = 1;
        for (std::size_t j = 0; j < k; ++j)
            row[j + 1] = -q[j];
        cone.push_back(std::move(row));
    }
    for (const auto& r : extreme_rays(cone)) {
        Vec a = zeros(d);
        bool nonzero = false;
        for (std::size_t j = 0; j < k; ++j) {
            a[ah.free_coords[j]] = r[j + 1];
            nonzero = nonzero || sgn(r[j + 1]) != 0;
        }
        if (nonzero)
            out.add_inequality(std::move(a), r[0]);
    }
    return out;
}

AffineHull affine_hull(const std::vector<Vec>& points)
{
    if (points.empty())
        throw std::invalid_argument("affine_hull: no points");
    AffineHull ah;
    ah.dim = points.front().size();
    const Vec& base = points.front();
    Mat diffs;
    for (std::size_t i = 1; i < points.size(); ++i) {
        Vec r(ah.dim);
        bool nonzero = false;
        for (std::size_t j = 0; j < ah.dim; ++j) {
            r[j] = points[i][j] - base[j];
            nonzero = nonzero || sgn(r[j]) != 0;
        }
        if (nonzero)
            diffs.push_back(std::move(r));
    }
    ah.free_coords = row_reduce(diffs);
    std::vector<bool> is_pivot(ah.dim, false);
    for (auto c : ah.free_coords)
        is_pivot[c] = true;
    for (std::size_t c = 0; c < ah.dim; ++c) {
        if (is_pivot[c])
            continue;
        Vec n = zeros(ah.dim);
        n[c] = 1;
        for (std::size_t r = 0; r < ah.free_coords.size(); ++r)
            n[ah.free_coords[r]] = -diffs[r][c];
        make_primitive(n);
        ah.offsets.push_back(dot(n, base));
        ah.normals.push_back(std::move(n));
    }
    return ah;
}

}  // namespace cbar::geometry
