#include "cbar/geometry.hpp"

#include <map>

namespace cbar::geometry {

namespace {

struct Row {
    Vec a;
    Rational b;
    bool eq = false;
};

bool is_zero(const Vec& v)
{
    for (const auto& x : v)
        if (sgn(x) != 0)
            return false;
    return true;
}

// Scales so the first nonzero coefficient has magnitude one.
void normalize(Row& r)
{
    for (const auto& x : r.a)
        if (sgn(x) != 0) {
            Rational s = 1 / abs(x);
            if (r.eq && sgn(x) < 0)
                s = -s;
            for (auto& y : r.a)
                y *= s;
            r.b *= s;
            return;
        }
}

// Working set of rows with duplicate and opposite-pair detection.
class RowSet {
public:
    bool infeasible = false;
    std::vector<Row> eqs;
    std::vector<Row> ineqs;

    void add(Row r)
    {
        if (infeasible)
            return;
        if (is_zero(r.a)) {
            if (r.eq ? sgn(r.b) != 0 : sgn(r.b) < 0)
                infeasible = true;
            return;
        }
        normalize(r);
        if (r.eq)
            eqs.push_back(std::move(r));
        else
            ineqs.push_back(std::move(r));
    }

    // Merges parallel inequalities and turns tight opposite pairs into equalities.
    void tidy()
    {
        if (infeasible)
            return;
        std::map<Vec, std::size_t> index;
        std::vector<Row> kept;
        for (auto& r : ineqs) {
            auto it = index.find(r.a);
            if (it == index.end()) {
                index.emplace(r.a, kept.size());
                kept.push_back(std::move(r));
            } else if (r.b < kept[it->second].b) {
                kept[it->second].b = r.b;
            }
        }
        std::vector<bool> drop(kept.size(), false);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (drop[i])
                continue;
            Vec neg = kept[i].a;
            for (auto& x : neg)
                x = -x;
            auto it = index.find(neg);
            if (it == index.end() || drop[it->second])
                continue;
            const std::size_t j = it->second;
            // a.x <= b_i and a.x >= -b_j
            if (-kept[j].b > kept[i].b) {
                infeasible = true;
                return;
            }
            if (-kept[j].b == kept[i].b) {
                Row e{kept[i].a, kept[i].b, true};
                normalize(e);
                eqs.push_back(std::move(e));
                drop[i] = drop[j] = true;
            }
        }
        ineqs.clear();
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (!drop[i])
                ineqs.push_back(std::move(kept[i]));
    }
};

void substitute(Row& target, const Row& eq, std::size_t var)
{
    if (sgn(target.a[var]) == 0)
        return;
    const Rational f = target.a[var] / eq.a[var];
    for (std::size_t j = 0; j < target.a.size(); ++j)
        if (sgn(eq.a[j]) != 0)
            target.a[j] -= f * eq.a[j];
    target.b -= f * eq.b;
    target.a[var] = 0;
}

// Drops inequalities implied by the others, one LP each.
void prune_redundant(RowSet& rows, std::size_t n)
{
    std::vector<bool> dropped(rows.ineqs.size(), false);
    for (std::size_t i = 0; i < rows.ineqs.size(); ++i) {
        ConstraintSystem s;
        s.add_block("z", n);
        for (const auto& e : rows.eqs)
            s.add_eq(e.a, e.b);
        for (std::size_t j = 0; j < rows.ineqs.size(); ++j)
            if (j != i && !dropped[j])
                s.add_le(rows.ineqs[j].a, rows.ineqs[j].b);
        // Bound the probe so the LP stays finite; the row is kept unless implied.
        s.add_le(rows.ineqs[i].a, rows.ineqs[i].b + 1);
        LpResult r = lp_optimize(s, rows.ineqs[i].a, Sense::Maximize);
        if (r.status == LpStatus::Infeasible) {
            rows.infeasible = true;
            return;
        }
        if (r.optimal() && r.value <= rows.ineqs[i].b)
            dropped[i] = true;
    }
    std::vector<Row> kept;
    for (std::size_t i = 0; i < rows.ineqs.size(); ++i)
        if (!dropped[i])
            kept.push_back(std::move(rows.ineqs[i]));
    rows.ineqs = std::move(kept);
}

}  // namespace

ConstraintSystem project(const ConstraintSystem& system, const std::vector<std::size_t>& keep)
{
    ++counters().projections;
    if (keep.empty())
        throw std::invalid_argument("project: nothing to keep");
    const std::size_t n = system.num_vars();
    std::vector<bool> kept_var(n, false);
    for (auto bi : keep) {
        const Block& blk = system.block(bi);
        for (std::size_t k = 0; k < blk.dim; ++k)
            kept_var[blk.offset + k] = true;
    }
    std::vector<std::size_t> elim;
    for (std::size_t j = 0; j < n; ++j)
        if (!kept_var[j])
            elim.push_back(j);

    RowSet rows;
    for (const auto& c : system.constraints())
        rows.add(Row{c.coeffs, c.rhs, c.relation == Relation::Equal});
    rows.tidy();

    std::size_t prune_threshold = std::max<std::size_t>(24, 2 * rows.ineqs.size());
    while (!elim.empty() && !rows.infeasible) {
        // Prefer a variable fixed by an equality; otherwise the cheapest pairing.
        std::size_t pick = elim.size();
        std::size_t eq_row = rows.eqs.size();
        for (std::size_t e = 0; e < elim.size() && pick == elim.size(); ++e)
            for (std::size_t r = 0; r < rows.eqs.size(); ++r)
                if (sgn(rows.eqs[r].a[elim[e]]) != 0) {
                    pick = e;
                    eq_row = r;
                    break;
                }
        if (pick != elim.size()) {
            const std::size_t var = elim[pick];
            Row eq = rows.eqs[eq_row];
            rows.eqs.erase(rows.eqs.begin() + static_cast<std::ptrdiff_t>(eq_row));
            RowSet next;
            for (auto& r : rows.eqs) {
                substitute(r, eq, var);
                next.add(std::move(r));
            }
            for (auto& r : rows.ineqs) {
                substitute(r, eq, var);
                next.add(std::move(r));
            }
            next.tidy();
            rows = std::move(next);
            elim.erase(elim.begin() + static_cast<std::ptrdiff_t>(pick));
            continue;
        }

        long best_cost = 0;
        for (std::size_t e = 0; e < elim.size(); ++e) {
            long pos = 0, neg = 0;
            for (const auto& r : rows.ineqs) {
                int s = sgn(r.a[elim[e]]);
                pos += s > 0;
                neg += s < 0;
            }
            long cost = pos * neg - pos - neg;
            if (pick == elim.size() || cost < best_cost) {
                best_cost = cost;
                pick = e;
            }
        }
        const std::size_t var = elim[pick];
        std::vector<const Row*> pos, neg;
        RowSet next;
        next.eqs = rows.eqs;
        for (const auto& r : rows.ineqs) {
            int s = sgn(r.a[var]);
            if (s > 0)
                pos.push_back(&r);
            else if (s < 0)
                neg.push_back(&r);
            else
                next.add(r);
        }
        for (const Row* p : pos)
            for (const Row* q : neg) {
                const Rational sp = 1 / p->a[var];
                const Rational sq = 1 / -q->a[var];
                Row combined{zeros(n), p->b * sp + q->b * sq, false};
                for (std::size_t j = 0; j < n; ++j)
                    if (sgn(p->a[j]) != 0 || sgn(q->a[j]) != 0)
                        combined.a[j] = p->a[j] * sp + q->a[j] * sq;
                combined.a[var] = 0;
                next.add(std::move(combined));
            }
        next.tidy();
        rows = std::move(next);
        elim.erase(elim.begin() + static_cast<std::ptrdiff_t>(pick));
        if (!rows.infeasible && rows.ineqs.size() > prune_threshold) {
            prune_redundant(rows, n);
            prune_threshold = std::max<std::size_t>(24, 2 * rows.ineqs.size());
        }
    }

    ConstraintSystem out;
    std::vector<std::size_t> columns;
    for (auto bi : keep) {
        const Block& blk = system.block(bi);
        out.add_block(blk.name, blk.dim);
        for (std::size_t k = 0; k < blk.dim; ++k)
            columns.push_back(blk.offset + k);
    }
    auto restrict = [&](const Vec& a) {
        Vec v(columns.size());
        for (std::size_t k = 0; k < columns.size(); ++k)
            v[k] = a[columns[k]];
        return v;
    };
    if (rows.infeasible) {
        out.add_le(zeros(out.num_vars()), Rational(-1), "empty");
        return out;
    }
    for (const auto& r : rows.eqs)
        out.add_eq(restrict(r.a), r.b, "projection");
    for (const auto& r : rows.ineqs)
        out.add_le(restrict(r.a), r.b, "projection");
    return out;
}

HPolytope project_polytope(const ConstraintSystem& system, const std::vector<std::size_t>& keep)
{
    return project(system, keep).as_polytope();
}

}  // namespace cbar::geometry
