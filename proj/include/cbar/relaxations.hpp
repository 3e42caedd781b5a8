#pragma once

#include "cbar/geometry.hpp"
#include "cbar/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbar::relax {

enum class Kind { IBP, Triangle, MultiNeuron, LayerwiseOptimal, CrossLayer };

struct RelaxationSpec {
    Kind kind = Kind::Triangle;
    // k for MultiNeuron, r for CrossLayer
    std::size_t param = 1;

    static RelaxationSpec ibp() { return {Kind::IBP, 1}; }
    static RelaxationSpec triangle() { return {Kind::Triangle, 1}; }
    static RelaxationSpec multi_neuron(std::size_t k);
    static RelaxationSpec layerwise_optimal() { return {Kind::LayerwiseOptimal, 1}; }
    static RelaxationSpec cross_layer(std::size_t r);

    /// Window size for cross-layer hulls (layerwise optimal is r = 1).
    std::optional<std::size_t> window() const;
    /// "ibp", "triangle", "mk:K", "p1", "pr:R".
    std::string name() const;
    static RelaxationSpec parse(const std::string& text);
};

enum class Stability { StableActive, StableInactive, Unstable };

struct NeuronBounds {
    Rational lower;
    Rational upper;

    Stability stability() const;
};

struct LayerBounds {
    std::size_t layer = 0;
    std::vector<NeuronBounds> neurons;
};

struct BoundStats {
    std::size_t constraints = 0;
    std::size_t lp_calls = 0;
    std::size_t hull_calls = 0;
    std::size_t vertex_calls = 0;
    std::size_t projections = 0;
};

struct BoundReport {
    RelaxationSpec spec;
    // false when the relaxed system (under sign splits) has no point
    bool feasible = true;
    Vec lower;
    Vec upper;
    // input part of an LP optimum attaining each bound, when one exists
    std::vector<Vec> lower_witness;
    std::vector<Vec> upper_witness;
    geometry::ConstraintSystem system;
    // pre-activation bounds of every ReLU layer, in layer order
    std::vector<LayerBounds> neuron_bounds;
    BoundStats stats;
    std::optional<bool> exact;
};

/// Adds block `output` with output = A * input + b.
void relax_affine(const network::AffineLayer& layer, geometry::ConstraintSystem& system,
                  std::size_t input_block, const std::string& output);

/// Constraints over (x, y) for y = relu(x) with x in [l, u].
geometry::HPolytope triangle_relax_neuron(const Rational& l, const Rational& u);

/// Interval propagation from the box [lower, upper]; a split clamps its
/// neuron's pre-activation interval to the chosen side.
BoundReport ibp_bounds(const network::Network& net, const Vec& lower, const Vec& upper,
                       const std::vector<network::SignConstraint>& splits = {});

/// conv{(x, relu(x_I)) : x in P}, coordinates x then y_I in the order of I.
geometry::HPolytope relu_graph_hull(const geometry::HPolytope& P, const std::vector<std::size_t>& I);

/// Finite point sets whose hulls relu_graph_hull and layer_graph_hull return.
std::vector<Vec> relu_graph_points(const geometry::HPolytope& P, const std::vector<std::size_t>& I);
std::vector<Vec> layer_graph_points(const network::Network& sub, const geometry::HPolytope& P,
                                    const std::vector<network::SignConstraint>& forced = {});

/// conv{(v_0, ..., v_r)} over inputs v_0 in P, where v_j are the block values
/// of `sub`; coordinates are the blocks concatenated.
geometry::HPolytope layer_graph_hull(const network::Network& sub, const geometry::HPolytope& P,
                                     const std::vector<network::SignConstraint>& forced = {});

/// Output bounds of net over X under the relaxation. Sign splits restrict
/// the named neurons to one side of zero.
BoundReport bound(const network::Network& net, const geometry::HPolytope& X, const RelaxationSpec& spec,
                  const std::vector<network::SignConstraint>& splits = {});

}  // namespace cbar::relax
