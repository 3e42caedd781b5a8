#pragma once

#include "cbar/errors.hpp"
#include "cbar/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cbar::geometry {

/// {x : A x <= b}. Equalities are stored as a pair of opposite rows.
struct HPolytope {
    std::size_t dim = 0;
    Mat A;
    Vec b;

    HPolytope() = default;
    explicit HPolytope(std::size_t dimension) : dim(dimension) {}
    HPolytope(std::size_t dimension, Mat rows, Vec rhs);

    static HPolytope box(const Vec& lower, const Vec& upper);

    std::size_t rows() const { return A.size(); }
    void add_inequality(Vec row, Rational rhs);
    void add_equality(const Vec& row, const Rational& rhs);
};

struct VPolytope {
    std::size_t dim = 0;
    std::vector<Vec> points;

    VPolytope() = default;
    VPolytope(std::size_t dimension, std::vector<Vec> pts);
};

enum class Relation { LessEq, Equal };

struct Constraint {
    Vec coeffs;
    Relation relation = Relation::LessEq;
    Rational rhs;
    std::string tag;
};

struct Block {
    std::string name;
    std::size_t dim = 0;
    std::size_t offset = 0;
};

/// Affine (in)equalities over an ordered list of named variable blocks.
class ConstraintSystem {
public:
    ConstraintSystem() = default;

    std::size_t add_block(const std::string& name, std::size_t dim);
    std::size_t num_vars() const { return num_vars_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& block(std::size_t index) const { return blocks_.at(index); }
    std::optional<std::size_t> find_block(const std::string& name) const;
    std::size_t block_index(const std::string& name) const;

    const std::vector<Constraint>& constraints() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    void add(Constraint c);
    void add_le(Vec coeffs, Rational rhs, std::string tag = {});
    void add_eq(Vec coeffs, Rational rhs, std::string tag = {});

    /// Adds the rows of p, whose coordinates are the concatenation of the
    /// listed blocks. Opposite row pairs are recorded as equalities.
    void add_polytope(const HPolytope& p, const std::vector<std::size_t>& over,
                      const std::string& tag);
    /// Same, with coordinate k of p placed on variable columns[k].
    void add_polytope_at(const HPolytope& p, const std::vector<std::size_t>& columns,
                         const std::string& tag);

    /// Conjunction with a system declaring the same block names; blocks
    /// missing here are appended.
    void conjoin(const ConstraintSystem& other);

    /// Coefficient vector over all variables for a functional on one block.
    Vec embed(std::size_t block, const Vec& coeffs) const;

    /// Feasible set over the concatenation of all blocks.
    HPolytope as_polytope() const;

private:
    std::vector<Block> blocks_;
    std::vector<Constraint> rows_;
    std::size_t num_vars_ = 0;
};

/// System over a single block holding p.
ConstraintSystem system_of(const HPolytope& p, const std::string& block_name);

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    // Optimal point over all variables; empty unless Optimal.
    Vec point;

    bool optimal() const { return status == LpStatus::Optimal; }
};

/// Exact simplex (Bland's rule). objective spans all variables of the system.
LpResult lp_optimize(const ConstraintSystem& system, const Vec& objective, Sense sense);
LpResult lp_optimize(const ConstraintSystem& system, std::size_t block, const Vec& coeffs,
                     Sense sense);
LpResult lp_optimize(const HPolytope& p, const Vec& objective, Sense sense);

/// Fourier-Motzkin projection onto the kept blocks (in their declared order).
ConstraintSystem project(const ConstraintSystem& system, const std::vector<std::size_t>& keep);
HPolytope project_polytope(const ConstraintSystem& system, const std::vector<std::size_t>& keep);

/// Extreme points of a bounded polytope. Throws EmptyPolytope,
/// UnboundedPolytope, or CapExceeded.
VPolytope vertices(const HPolytope& p);

/// Facet description of conv(points); lower-dimensional hulls carry their
/// affine hull as equality pairs.
HPolytope hull(const VPolytope& points);
HPolytope convex_union(const std::vector<VPolytope>& parts);

bool contains(const HPolytope& p, const Vec& point);
HPolytope intersect(const HPolytope& p, const HPolytope& q);
bool is_empty(const HPolytope& p);
std::pair<Vec, Vec> bounding_box(const HPolytope& p);

/// True when every point of inner lies in outer.
bool includes(const HPolytope& outer, const HPolytope& inner);
bool same_set(const HPolytope& p, const HPolytope& q);

/// Drops rows implied by the remaining ones (one LP per row).
HPolytope remove_redundant(const HPolytope& p);

/// Points of v that are not convex combinations of the others.
VPolytope extreme_points(const VPolytope& v);

/// Affine hull of a point set: a base point, and for each coordinate not
/// in `free_coords`, its expression as an affine function of the free ones.
struct AffineHull {
    std::size_t dim = 0;
    std::vector<std::size_t> free_coords;
    // equalities c . x = d spanning the orthogonal complement
    Mat normals;
    Vec offsets;
};
AffineHull affine_hull(const std::vector<Vec>& points);

/// Extreme rays of the pointed cone {z : M z >= 0}; exposed for testing.
std::vector<Vec> extreme_rays(const Mat& m);

struct Counters {
    std::size_t lp_calls = 0;
    std::size_t hull_calls = 0;
    std::size_t vertex_calls = 0;
    std::size_t projections = 0;
};
/// Per-thread operation counters.
Counters& counters();

}  // namespace cbar::geometry
