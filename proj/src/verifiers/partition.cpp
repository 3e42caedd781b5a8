#include "cbar/verifiers.hpp"

namespace cbar::verify {

using geometry::HPolytope;
using geometry::Sense;
using geometry::VPolytope;
using network::AffineMap;

namespace {

// Closed rows A x <= b plus strict rows C x < d.
struct Cell {
    HPolytope closed;
    Mat strict_rows;
    Vec strict_rhs;
};

bool nonempty(const Cell& c)
{
    if (c.strict_rows.empty())
        return !geometry::is_empty(c.closed);
    // maximise t with C x + t <= d and t <= 1; the cell is nonempty iff t > 0
    const std::size_t n = c.closed.dim;
    HPolytope lifted(n + 1);
    for (std::size_t i = 0; i < c.closed.rows(); ++i) {
        Vec row = c.closed.A[i];
        row.push_back(0);
        lifted.add_inequality(std::move(row), c.closed.b[i]);
    }
    for (std::size_t i = 0; i < c.strict_rows.size(); ++i) {
        Vec row = c.strict_rows[i];
        row.push_back(1);
        lifted.add_inequality(std::move(row), c.strict_rhs[i]);
    }
    Vec t = zeros(n + 1);
    t[n] = 1;
    lifted.add_inequality(t, 1);
    auto r = geometry::lp_optimize(lifted, t, Sense::Maximize);
    return r.optimal() && sgn(r.value) > 0;
}

// Whether every point of the cell lies in one of pieces[k..].
bool covered(const Cell& cell, const std::vector<HPolytope>& pieces, std::size_t k)
{
    if (!nonempty(cell))
        return true;
    if (k == pieces.size())
        return false;
    const HPolytope& q = pieces[k];
    // cell minus q splits by the first violated row of q
    for (std::size_t r = 0; r < q.rows(); ++r) {
        Cell sub = cell;
        Vec neg = q.A[r];
        for (auto& v : neg)
            v = -v;
        sub.strict_rows.push_back(std::move(neg));
        sub.strict_rhs.push_back(-q.b[r]);
        for (std::size_t p = 0; p < r; ++p)
            sub.closed.add_inequality(q.A[p], q.b[p]);
        if (!covered(sub, pieces, k + 1))
            return false;
    }
    return true;
}

Vec relu_of(const Vec& v)
{
    Vec out = v;
    for (auto& x : out)
        if (sgn(x) < 0)
            x = 0;
    return out;
}

AffineMap compose(const network::AffineLayer& layer, const AffineMap& m)
{
    AffineMap out{mat_mul(layer.A, m.A), layer.b};
    Vec shift = mat_vec(layer.A, m.b);
    for (std::size_t i = 0; i < shift.size(); ++i)
        out.b[i] += shift[i];
    return out;
}

AffineMap with_signs(AffineMap m, const std::vector<int>& signs)
{
    for (std::size_t i = 0; i < signs.size(); ++i)
        if (signs[i] < 0) {
            for (auto& v : m.A[i])
                v = 0;
            m.b[i] = 0;
        }
    return m;
}

struct SignedPiece {
    HPolytope domain;
    std::vector<int> signs;
};

// Splits a linear piece along the zero sets of the coordinates in `unstable`,
// only where both signs occur strictly; other coordinates take `fixed`.
std::vector<SignedPiece> split_piece(const PartitionNode::Piece& piece, const std::vector<std::size_t>& unstable,
                                     const std::vector<int>& fixed)
{
    std::vector<SignedPiece> work{{piece.domain, fixed}};
    for (auto i : unstable) {
        std::vector<SignedPiece> next;
        const Vec& a = piece.map.A[i];
        const Rational& b = piece.map.b[i];
        for (auto& sp : work) {
            auto lo = geometry::lp_optimize(sp.domain, a, Sense::Minimize);
            if (sgn(lo.value + b) >= 0) {
                sp.signs[i] = 1;
                next.push_back(std::move(sp));
                continue;
            }
            auto hi = geometry::lp_optimize(sp.domain, a, Sense::Maximize);
            if (sgn(hi.value + b) <= 0) {
                sp.signs[i] = -1;
                next.push_back(std::move(sp));
                continue;
            }
            SignedPiece neg = sp;
            Vec na = a;
            for (auto& v : na)
                v = -v;
            sp.domain.add_inequality(std::move(na), b);
            sp.signs[i] = 1;
            neg.domain.add_inequality(a, -b);
            neg.signs[i] = -1;
            next.push_back(std::move(sp));
            next.push_back(std::move(neg));
        }
        work = std::move(next);
    }
    return work;
}

VPolytope image_of(const HPolytope& domain, const AffineMap& m, std::size_t width)
{
    VPolytope out(width, {});
    for (const auto& x : geometry::vertices(domain).points)
        out.points.push_back(m.apply(x));
    return geometry::extreme_points(out);
}

class BudgetExceeded {};

class Partitioner {
public:
    Partitioner(const Network& net, std::size_t budget) : net_(net), budget_(budget) {}

    std::vector<PartitionNode> parts;
    std::vector<std::size_t> trace;

    void run(const HPolytope& X)
    {
        PartitionNode root;
        root.input_part = X;
        root.image = geometry::extreme_points(geometry::vertices(X));
        root.pieces.push_back({X, AffineMap{identity(X.dim), zeros(X.dim)}});
        parts.push_back(std::move(root));
        for (std::size_t j = 0; j < net_.depth(); ++j) {
            if (auto* a = std::get_if<network::AffineLayer>(&net_.layer(j))) {
                for (auto& p : parts) {
                    VPolytope img(a->out_dim(), {});
                    for (const auto& v : p.image.points) {
                        Vec y = mat_vec(a->A, v);
                        for (std::size_t i = 0; i < y.size(); ++i)
                            y[i] += a->b[i];
                        img.points.push_back(std::move(y));
                    }
                    p.image = geometry::extreme_points(img);
                    for (auto& piece : p.pieces)
                        piece.map = compose(*a, piece.map);
                }
            } else {
                std::vector<PartitionNode> next;
                for (auto& p : parts)
                    relu(p, next);
                parts = std::move(next);
            }
            trace.push_back(parts.size());
        }
    }

private:
    const Network& net_;
    std::size_t budget_;

    void push(std::vector<PartitionNode>& out, PartitionNode node)
    {
        out.push_back(std::move(node));
        if (out.size() > budget_)
            throw BudgetExceeded{};
    }

    void relu(PartitionNode& part, std::vector<PartitionNode>& out)
    {
        const std::size_t width = part.image.dim;
        std::vector<int> fixed(width, 1);
        std::vector<std::size_t> unstable;
        for (std::size_t i = 0; i < width; ++i) {
            bool pos = false, neg = false;
            for (const auto& v : part.image.points) {
                pos = pos || sgn(v[i]) > 0;
                neg = neg || sgn(v[i]) < 0;
            }
            if (pos && neg)
                unstable.push_back(i);
            else if (neg)
                fixed[i] = -1;
        }

        if (unstable.empty()) {
            VPolytope img(width, {});
            for (const auto& v : part.image.points)
                img.points.push_back(relu_of(v));
            part.image = geometry::extreme_points(img);
            for (auto& piece : part.pieces)
                piece.map = with_signs(std::move(piece.map), fixed);
            push(out, std::move(part));
            return;
        }

        if (relu_image_is_convex(part.image, unstable)) {
            VPolytope img(width, {});
            HPolytope h = geometry::hull(part.image);
            std::vector<PartitionNode::Piece> refined;
            for (const auto& piece : part.pieces)
                for (auto& sp : split_piece(piece, unstable, fixed))
                    refined.push_back({std::move(sp.domain), with_signs(piece.map, sp.signs)});
            for (const auto& v : part.image.points)
                img.points.push_back(relu_of(v));
            collect_orthant_images(h, unstable, img);
            part.image = geometry::extreme_points(img);
            part.pieces = std::move(refined);
            push(out, std::move(part));
            return;
        }

        for (const auto& piece : part.pieces)
            for (auto& sp : split_piece(piece, unstable, fixed)) {
                PartitionNode child;
                AffineMap m = with_signs(piece.map, sp.signs);
                child.image = image_of(sp.domain, m, width);
                child.input_part = sp.domain;
                child.pieces.push_back({std::move(sp.domain), std::move(m)});
                push(out, std::move(child));
            }
    }

    // Adds relu of the vertices of every orthant piece of h.
    static void collect_orthant_images(const HPolytope& h, const std::vector<std::size_t>& unstable, VPolytope& img)
    {
        for (const auto& q : orthant_pieces(h, unstable))
            for (const auto& v : geometry::vertices(q).points)
                img.points.push_back(relu_of(v));
    }

    static std::vector<HPolytope> orthant_pieces(const HPolytope& h, const std::vector<std::size_t>& unstable)
    {
        std::vector<HPolytope> work{h};
        for (auto i : unstable) {
            std::vector<HPolytope> next;
            for (const auto& p : work)
                for (int sign : {1, -1}) {
                    HPolytope q = p;
                    Vec row = zeros(h.dim);
                    row[i] = -sign;
                    q.add_inequality(std::move(row), 0);
                    if (!geometry::is_empty(q))
                        next.push_back(std::move(q));
                }
            work = std::move(next);
        }
        return work;
    }

    // relu(S) is the union of the images of S's orthant pieces; it is convex
    // iff the hull of that union is covered by the pieces' images.
    static bool relu_image_is_convex(const VPolytope& image, const std::vector<std::size_t>& unstable)
    {
        const HPolytope h = geometry::hull(image);
        std::vector<HPolytope> pieces;
        VPolytope all(image.dim, {});
        for (const auto& q : orthant_pieces(h, unstable)) {
            VPolytope img(image.dim, {});
            for (const auto& v : geometry::vertices(q).points)
                img.points.push_back(relu_of(v));
            all.points.insert(all.points.end(), img.points.begin(), img.points.end());
            pieces.push_back(geometry::hull(img));
        }
        Cell whole{geometry::hull(all), {}, {}};
        return covered(whole, pieces, 0);
    }
};

}  // namespace

VerifierReport polytope_partition(const Network& net, const HPolytope& X, std::size_t budget)
{
    if (budget == 0)
        throw std::invalid_argument("polytope_partition: budget must be positive");
    if (X.dim != net.input_dim())
        throw DimensionMismatch("polytope_partition: input set of wrong dimension");
    if (geometry::is_empty(X))
        throw EmptyPolytope("polytope_partition: empty input set");
    const auto before = geometry::counters();
    VerifierReport report;
    Partitioner p(net, budget);
    try {
        p.run(X);
    } catch (const BudgetExceeded&) {
        report.status = Status::BudgetExhausted;
        report.trace = p.trace;
        report.subproblem_count = budget + 1;
        auto fallback = relax::bound(net, X, relax::RelaxationSpec::triangle());
        report.lower = fallback.lower;
        report.upper = fallback.upper;
        report.lp_calls = geometry::counters().lp_calls - before.lp_calls;
        report.hull_calls = geometry::counters().hull_calls - before.hull_calls;
        return report;
    }

    const std::size_t m = net.output_dim();
    bool first = true;
    for (const auto& part : p.parts) {
        auto b = relax::bound(net, part.input_part, relax::RelaxationSpec::layerwise_optimal());
        for (std::size_t i = 0; i < m; ++i) {
            Rational lo = part.image.points.front()[i], hi = lo;
            for (const auto& v : part.image.points) {
                if (v[i] < lo)
                    lo = v[i];
                if (v[i] > hi)
                    hi = v[i];
            }
            if (lo != b.lower[i] || hi != b.upper[i])
                throw std::logic_error("polytope_partition: layerwise bound differs from the exact image of a part");
        }
        if (first) {
            report.lower = b.lower;
            report.upper = b.upper;
            first = false;
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                if (b.lower[i] < report.lower[i])
                    report.lower[i] = b.lower[i];
                if (b.upper[i] > report.upper[i])
                    report.upper[i] = b.upper[i];
            }
        }
    }
    report.subproblem_count = p.parts.size();
    report.trace = p.trace;
    for (const auto& part : p.parts)
        report.parts.push_back(part.input_part);
    report.lp_calls = geometry::counters().lp_calls - before.lp_calls;
    report.hull_calls = geometry::counters().hull_calls - before.hull_calls;
    return report;
}

}  // namespace cbar::verify
