#include "cbar/geometry.hpp"

namespace cbar::geometry {

Counters& counters()
{
    thread_local Counters c;
    return c;
}

namespace {

constexpr std::size_t none = static_cast<std::size_t>(-1);

// Dictionary form: every basic variable equals konst[r] + sum_j coef[r][j] x_j
// over the nonbasic variables. Variables [0, free_count) are free; the rest
// (slacks and the auxiliary phase-one variable) are nonnegative.
struct Dictionary {
    std::size_t vars = 0;
    std::size_t free_count = 0;
    std::vector<Vec> coef;
    Vec konst;
    std::vector<std::size_t> basic;
    std::vector<std::size_t> row_of;
    std::vector<bool> removed;

    bool is_free(std::size_t j) const { return j < free_count; }

    void pivot(std::size_t r, std::size_t enter)
    {
        Vec& row = coef[r];
        const Rational a = row[enter];
        const std::size_t leave = basic[r];
        // x_enter = (x_leave - konst - sum_{j != enter} row_j x_j) / a
        Rational inv = 1 / a;
        for (std::size_t j = 0; j < vars; ++j) {
            if (j == enter || sgn(row[j]) == 0)
                continue;
            row[j] = -row[j] * inv;
        }
        row[leave] = inv;
        row[enter] = 0;
        konst[r] = -konst[r] * inv;
        basic[r] = enter;
        row_of[enter] = r;
        row_of[leave] = none;
        for (std::size_t s = 0; s < coef.size(); ++s) {
            if (s == r)
                continue;
            substitute(coef[s], konst[s], enter, r);
        }
    }

    // Replaces nonbasic-turned-basic variable `var` in a row by its defining row.
    void substitute(Vec& target, Rational& target_konst, std::size_t var, std::size_t r) const
    {
        if (sgn(target[var]) == 0)
            return;
        const Rational c = target[var];
        target[var] = 0;
        const Vec& row = coef[r];
        for (std::size_t j = 0; j < vars; ++j)
            if (sgn(row[j]) != 0)
                target[j] += c * row[j];
        target_konst += c * konst[r];
    }

    // Objective sum_j c_j x_j rewritten over the nonbasic variables.
    std::pair<Vec, Rational> objective_row(const Vec& c) const
    {
        Vec d = c;
        d.resize(vars, Rational(0));
        Rational z = 0;
        for (std::size_t r = 0; r < coef.size(); ++r) {
            const std::size_t b = basic[r];
            if (sgn(d[b]) == 0)
                continue;
            const Rational m = d[b];
            d[b] = 0;
            for (std::size_t j = 0; j < vars; ++j)
                if (sgn(coef[r][j]) != 0)
                    d[j] += m * coef[r][j];
            z += m * konst[r];
        }
        return {d, z};
    }

    // Maximizes the objective with Bland's rule from a feasible dictionary.
    // Returns false when unbounded.
    bool maximize(Vec& d, Rational& z)
    {
        for (;;) {
            std::size_t enter = none;
            for (std::size_t j = free_count; j < vars; ++j) {
                if (removed[j] || row_of[j] != none)
                    continue;
                if (sgn(d[j]) > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == none)
                return true;
            std::size_t leave_row = none;
            Rational best;
            for (std::size_t r = 0; r < coef.size(); ++r) {
                if (is_free(basic[r]) || sgn(coef[r][enter]) >= 0)
                    continue;
                Rational ratio = konst[r] / -coef[r][enter];
                if (leave_row == none || ratio < best ||
                    (ratio == best && basic[r] < basic[leave_row])) {
                    leave_row = r;
                    best = ratio;
                }
            }
            if (leave_row == none)
                return false;
            pivot(leave_row, enter);
            // keep the objective expressed over nonbasic variables
            const Rational m = d[enter];
            if (sgn(m) != 0) {
                d[enter] = 0;
                const Vec& row = coef[leave_row];
                for (std::size_t j = 0; j < vars; ++j)
                    if (sgn(row[j]) != 0)
                        d[j] += m * row[j];
                z += m * konst[leave_row];
            }
        }
    }
};

// Maximizes c.y subject to G y <= h over free y. Returns value and point.
LpResult solve_inequalities(const Mat& g, const Vec& h, const Vec& c)
{
    const std::size_t n = c.size();
    const std::size_t m = g.size();
    LpResult result;

    Dictionary dict;
    dict.free_count = n;
    dict.vars = n + m + 1;
    const std::size_t aux = n + m;
    dict.removed.assign(dict.vars, false);
    dict.row_of.assign(dict.vars, none);
    dict.coef.assign(m, zeros(dict.vars));
    dict.konst = h;
    dict.basic.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        // slack_r = h_r - g_r . y
        for (std::size_t j = 0; j < n; ++j)
            if (sgn(g[r][j]) != 0)
                dict.coef[r][j] = -g[r][j];
        dict.basic[r] = n + r;
        dict.row_of[n + r] = r;
    }

    // Phase 0: move each free variable into the basis where possible.
    std::vector<std::size_t> stuck;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t row = none;
        for (std::size_t r = 0; r < m; ++r)
            if (!dict.is_free(dict.basic[r]) && sgn(dict.coef[r][j]) != 0) {
                row = r;
                break;
            }
        if (row == none)
            stuck.push_back(j);
        else
            dict.pivot(row, j);
    }

    // Phase 1: a single auxiliary variable absorbs all infeasibility.
    std::size_t worst = none;
    for (std::size_t r = 0; r < m; ++r) {
        if (dict.is_free(dict.basic[r]))
            continue;
        if (sgn(dict.konst[r]) < 0 && (worst == none || dict.konst[r] < dict.konst[worst]))
            worst = r;
    }
    if (worst != none) {
        for (std::size_t r = 0; r < m; ++r)
            if (!dict.is_free(dict.basic[r]))
                dict.coef[r][aux] = 1;
        dict.pivot(worst, aux);
        Vec w = zeros(dict.vars);
        w[aux] = -1;
        auto [d, z] = dict.objective_row(w);
        dict.maximize(d, z);
        if (sgn(z) < 0) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        if (dict.row_of[aux] != none) {
            const std::size_t r = dict.row_of[aux];
            std::size_t enter = none;
            for (std::size_t j = n; j < dict.vars; ++j)
                if (j != aux && dict.row_of[j] == none && sgn(dict.coef[r][j]) != 0) {
                    enter = j;
                    break;
                }
            if (enter != none) {
                dict.pivot(r, enter);
            } else {
                // the row reads aux = 0 identically; drop it
                dict.coef.erase(dict.coef.begin() + static_cast<std::ptrdiff_t>(r));
                dict.konst.erase(dict.konst.begin() + static_cast<std::ptrdiff_t>(r));
                dict.basic.erase(dict.basic.begin() + static_cast<std::ptrdiff_t>(r));
                dict.row_of.assign(dict.vars, none);
                for (std::size_t s = 0; s < dict.basic.size(); ++s)
                    dict.row_of[dict.basic[s]] = s;
            }
        }
        for (auto& row : dict.coef)
            row[aux] = 0;
    }
    dict.removed[aux] = true;

    // Phase 2.
    Vec objective = c;
    auto [d, z] = dict.objective_row(objective);
    for (auto j : stuck)
        if (sgn(d[j]) != 0) {
            result.status = LpStatus::Unbounded;
            return result;
        }
    if (!dict.maximize(d, z)) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.value = z;
    result.point = zeros(n);
    for (std::size_t r = 0; r < dict.basic.size(); ++r)
        if (dict.basic[r] < n)
            result.point[dict.basic[r]] = dict.konst[r];
    return result;
}

}  // namespace

LpResult lp_optimize(const ConstraintSystem& system, const Vec& objective, Sense sense)
{
    ++counters().lp_calls;
    const std::size_t n = system.num_vars();
    if (objective.size() != n)
        throw DimensionMismatch("objective length differs from variable count");

    // Eliminate equalities by reduced row echelon form.
    Mat eq;
    Vec eq_rhs;
    for (const auto& c : system.constraints())
        if (c.relation == Relation::Equal) {
            eq.push_back(c.coeffs);
            eq_rhs.push_back(c.rhs);
        }
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < eq.size(); ++col) {
        std::size_t p = rank;
        while (p < eq.size() && sgn(eq[p][col]) == 0)
            ++p;
        if (p == eq.size())
            continue;
        std::swap(eq[p], eq[rank]);
        std::swap(eq_rhs[p], eq_rhs[rank]);
        const Rational inv = 1 / eq[rank][col];
        for (auto& x : eq[rank])
            x *= inv;
        eq_rhs[rank] *= inv;
        for (std::size_t r = 0; r < eq.size(); ++r) {
            if (r == rank || sgn(eq[r][col]) == 0)
                continue;
            const Rational f = eq[r][col];
            for (std::size_t j = col; j < n; ++j)
                if (sgn(eq[rank][j]) != 0)
                    eq[r][j] -= f * eq[rank][j];
            eq_rhs[r] -= f * eq_rhs[rank];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    LpResult result;
    for (std::size_t r = rank; r < eq.size(); ++r)
        if (sgn(eq_rhs[r]) != 0) {
            result.status = LpStatus::Infeasible;
            return result;
        }

    std::vector<bool> is_pivot(n, false);
    for (auto col : pivot_col)
        is_pivot[col] = true;
    std::vector<std::size_t> free_vars;
    std::vector<std::size_t> reduced_index(n, none);
    for (std::size_t j = 0; j < n; ++j)
        if (!is_pivot[j]) {
            reduced_index[j] = free_vars.size();
            free_vars.push_back(j);
        }

    // x_pivot = rhs - sum_{free j} eq[r][j] x_j; reduce a functional accordingly.
    auto reduce = [&](const Vec& a, Rational& constant) {
        Vec out = zeros(free_vars.size());
        for (std::size_t j = 0; j < n; ++j)
            if (!is_pivot[j] && sgn(a[j]) != 0)
                out[reduced_index[j]] += a[j];
        for (std::size_t r = 0; r < rank; ++r) {
            const Rational& ap = a[pivot_col[r]];
            if (sgn(ap) == 0)
                continue;
            constant += ap * eq_rhs[r];
            for (std::size_t k = 0; k < free_vars.size(); ++k) {
                const Rational& e = eq[r][free_vars[k]];
                if (sgn(e) != 0)
                    out[k] -= ap * e;
            }
        }
        return out;
    };

    Mat g;
    Vec h;
    for (const auto& c : system.constraints()) {
        if (c.relation != Relation::LessEq)
            continue;
        Rational shift = 0;
        Vec row = reduce(c.coeffs, shift);
        Rational rhs = c.rhs - shift;
        bool zero_row = true;
        for (const auto& x : row)
            if (sgn(x) != 0) {
                zero_row = false;
                break;
            }
        if (zero_row) {
            if (sgn(rhs) < 0) {
                result.status = LpStatus::Infeasible;
                return result;
            }
            continue;
        }
        g.push_back(std::move(row));
        h.push_back(std::move(rhs));
    }

    Vec signed_objective = objective;
    if (sense == Sense::Minimize)
        for (auto& x : signed_objective)
            x = -x;
    Rational offset = 0;
    Vec c = reduce(signed_objective, offset);

    LpResult reduced = solve_inequalities(g, h, c);
    if (!reduced.optimal()) {
        result.status = reduced.status;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.value = reduced.value + offset;
    if (sense == Sense::Minimize)
        result.value = -result.value;
    result.point = zeros(n);
    for (std::size_t k = 0; k < free_vars.size(); ++k)
        result.point[free_vars[k]] = reduced.point[k];
    for (std::size_t r = 0; r < rank; ++r) {
        Rational v = eq_rhs[r];
        for (std::size_t k = 0; k < free_vars.size(); ++k)
            if (sgn(eq[r][free_vars[k]]) != 0)
                v -= eq[r][free_vars[k]] * reduced.point[k];
        result.point[pivot_col[r]] = v;
    }
    return result;
}

LpResult lp_optimize(const ConstraintSystem& system, std::size_t block, const Vec& coeffs, Sense sense)
{
    return lp_optimize(system, system.embed(block, coeffs), sense);
}

LpResult lp_optimize(const HPolytope& p, const Vec& objective, Sense sense)
{
    if (objective.size() != p.dim)
        throw DimensionMismatch("objective length differs from polytope dimension");
    return lp_optimize(system_of(p, "x"), objective, sense);
}

}  // namespace cbar::geometry
