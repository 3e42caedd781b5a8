#include "cbar/geometry.hpp"

#include <map>

namespace cbar::geometry {

HPolytope::HPolytope(std::size_t dimension, Mat rows, Vec rhs)
    : dim(dimension), A(std::move(rows)), b(std::move(rhs))
{
    if (A.size() != b.size())
        throw DimensionMismatch("HPolytope: row count differs from offset count");
    for (const auto& row : A)
        if (row.size() != dim)
            throw DimensionMismatch("HPolytope: row length differs from dimension");
}

HPolytope HPolytope::box(const Vec& lower, const Vec& upper)
{
    if (lower.size() != upper.size())
        throw DimensionMismatch("box: bound vectors differ in length");
    HPolytope p(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) {
        Vec e = zeros(p.dim);
        e[i] = 1;
        p.add_inequality(e, upper[i]);
        e[i] = -1;
        p.add_inequality(e, -lower[i]);
    }
    return p;
}

void HPolytope::add_inequality(Vec row, Rational rhs)
{
    if (row.size() != dim)
        throw DimensionMismatch("HPolytope: row length differs from dimension");
    A.push_back(std::move(row));
    b.push_back(std::move(rhs));
}

void HPolytope::add_equality(const Vec& row, const Rational& rhs)
{
    add_inequality(row, rhs);
    Vec neg = row;
    for (auto& x : neg)
        x = -x;
    add_inequality(std::move(neg), -rhs);
}

VPolytope::VPolytope(std::size_t dimension, std::vector<Vec> pts) : dim(dimension), points(std::move(pts))
{
    for (const auto& p : points)
        if (p.size() != dim)
            throw DimensionMismatch("VPolytope: point of wrong dimension");
}

std::size_t ConstraintSystem::add_block(const std::string& name, std::size_t dim)
{
    if (find_block(name))
        throw std::invalid_argument("duplicate block '" + name + "'");
    blocks_.push_back(Block{name, dim, num_vars_});
    num_vars_ += dim;
    for (auto& row : rows_)
        row.coeffs.resize(num_vars_, Rational(0));
    return blocks_.size() - 1;
}

std::optional<std::size_t> ConstraintSystem::find_block(const std::string& name) const
{
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t ConstraintSystem::block_index(const std::string& name) const
{
    if (auto i = find_block(name))
        return *i;
    throw std::invalid_argument("unknown block '" + name + "'");
}

void ConstraintSystem::add(Constraint c)
{
    if (c.coeffs.size() != num_vars_)
        throw DimensionMismatch("constraint references undeclared variables");
    rows_.push_back(std::move(c));
}

void ConstraintSystem::add_le(Vec coeffs, Rational rhs, std::string tag)
{
    add(Constraint{std::move(coeffs), Relation::LessEq, std::move(rhs), std::move(tag)});
}

void ConstraintSystem::add_eq(Vec coeffs, Rational rhs, std::string tag)
{
    add(Constraint{std::move(coeffs), Relation::Equal, std::move(rhs), std::move(tag)});
}

namespace {

// Key identifying a row up to positive scaling; the scale maps the row onto it.
std::pair<std::string, Rational> direction_key(const Vec& row)
{
    Rational scale = 0;
    for (const auto& x : row)
        if (sgn(x) != 0) {
            scale = abs(x);
            break;
        }
    std::string key;
    if (sgn(scale) == 0)
        return {key, scale};
    for (const auto& x : row) {
        key += Rational(x / scale).get_str();
        key += ',';
    }
    return {key, scale};
}

Vec negated(const Vec& v)
{
    Vec out = v;
    for (auto& x : out)
        x = -x;
    return out;
}

}  // namespace

void ConstraintSystem::add_polytope(const HPolytope& p, const std::vector<std::size_t>& over,
                                    const std::string& tag)
{
    std::vector<std::size_t> columns;
    for (auto bi : over) {
        const Block& blk = block(bi);
        for (std::size_t k = 0; k < blk.dim; ++k)
            columns.push_back(blk.offset + k);
    }
    add_polytope_at(p, columns, tag);
}

void ConstraintSystem::add_polytope_at(const HPolytope& p, const std::vector<std::size_t>& columns,
                                       const std::string& tag)
{
    if (columns.size() != p.dim)
        throw DimensionMismatch("add_polytope: polytope dimension differs from block dimensions");
    for (auto c : columns)
        if (c >= num_vars_)
            throw DimensionMismatch("add_polytope: undeclared variable");

    // Pair up opposite rows with matching offsets into equalities.
    std::map<std::string, std::vector<std::size_t>> by_key;
    std::vector<std::pair<std::string, Rational>> keys;
    keys.reserve(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        keys.push_back(direction_key(p.A[i]));
        by_key[keys.back().first].push_back(i);
    }
    std::vector<bool> used(p.rows(), false);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        if (used[i])
            continue;
        Vec coeffs = zeros(num_vars_);
        for (std::size_t k = 0; k < columns.size(); ++k)
            coeffs[columns[k]] = p.A[i][k];
        used[i] = true;
        bool paired = false;
        if (sgn(keys[i].second) != 0) {
            auto opposite = direction_key(negated(p.A[i]));
            auto it = by_key.find(opposite.first);
            if (it != by_key.end()) {
                Rational rhs_i = p.b[i] / keys[i].second;
                for (auto j : it->second) {
                    if (used[j])
                        continue;
                    if (Rational(p.b[j] / keys[j].second) == -rhs_i) {
                        used[j] = true;
                        paired = true;
                        break;
                    }
                }
            }
        }
        add(Constraint{std::move(coeffs), paired ? Relation::Equal : Relation::LessEq, p.b[i], tag});
    }
}

void ConstraintSystem::conjoin(const ConstraintSystem& other)
{
    std::vector<std::size_t> mapping;
    for (const auto& blk : other.blocks()) {
        auto idx = find_block(blk.name);
        if (!idx)
            idx = add_block(blk.name, blk.dim);
        else if (block(*idx).dim != blk.dim)
            throw DimensionMismatch("conjoin: block '" + blk.name + "' has different dimensions");
        mapping.push_back(*idx);
    }
    for (const auto& c : other.constraints()) {
        Vec coeffs = zeros(num_vars_);
        for (std::size_t bi = 0; bi < other.blocks().size(); ++bi) {
            const Block& src = other.block(bi);
            const Block& dst = block(mapping[bi]);
            for (std::size_t k = 0; k < src.dim; ++k)
                coeffs[dst.offset + k] = c.coeffs[src.offset + k];
        }
        add(Constraint{std::move(coeffs), c.relation, c.rhs, c.tag});
    }
}

Vec ConstraintSystem::embed(std::size_t block_idx, const Vec& coeffs) const
{
    const Block& blk = block(block_idx);
    if (coeffs.size() != blk.dim)
        throw DimensionMismatch("objective length differs from block dimension");
    Vec full = zeros(num_vars_);
    for (std::size_t k = 0; k < blk.dim; ++k)
        full[blk.offset + k] = coeffs[k];
    return full;
}

HPolytope ConstraintSystem::as_polytope() const
{
    HPolytope p(num_vars_);
    for (const auto& c : rows_) {
        if (c.relation == Relation::Equal)
            p.add_equality(c.coeffs, c.rhs);
        else
            p.add_inequality(c.coeffs, c.rhs);
    }
    return p;
}

ConstraintSystem system_of(const HPolytope& p, const std::string& block_name)
{
    ConstraintSystem s;
    auto b = s.add_block(block_name, p.dim);
    s.add_polytope(p, {b}, block_name);
    return s;
}

}  // namespace cbar::geometry
