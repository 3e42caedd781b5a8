#pragma once

#include "cbar/geometry.hpp"
#include "cbar/network.hpp"
#include "cbar/relaxations.hpp"

#include <vector>

namespace cbar::verify {

using network::Network;

enum class Status { Exact, BudgetExhausted };

/// A convex part of the input together with the exact image of the layers
/// processed so far. `pieces` are the linear pieces of that prefix on the part.
struct PartitionNode {
    geometry::HPolytope input_part;
    geometry::VPolytope image;
    struct Piece {
        geometry::HPolytope domain;
        network::AffineMap map;
    };
    std::vector<Piece> pieces;
};

struct VerifierReport {
    Vec lower;
    Vec upper;
    std::size_t subproblem_count = 0;
    Status status = Status::Exact;
    // partition: parts after each layer; branch-and-bound: open nodes per depth
    std::vector<std::size_t> trace;
    // partition only: the final input parts
    std::vector<geometry::HPolytope> parts;
    std::size_t lp_calls = 0;
    std::size_t hull_calls = 0;
};

/// Splits the input into parts whose image stays convex layer by layer; a
/// part is split along the orthants of its unstable coordinates only when the
/// ReLU image of its current image is not convex. Bounds come from the
/// layerwise-optimal relaxation on each final part.
VerifierReport polytope_partition(const Network& net, const geometry::HPolytope& X, std::size_t budget);

/// Branch-and-bound on the first unstable neuron in layer order. A Triangle
/// node closes when no neuron is unstable; an interval node when corners of
/// its box attain both bounds; stronger relaxations close on either, using
/// the LP witnesses. With interval bounding, sign splits shrink the node's
/// box to the bounding box of its sign region, and a node with nothing left
/// to split is bisected along its widest coordinate.
VerifierReport bab(const Network& net, const geometry::HPolytope& X, const relax::RelaxationSpec& spec,
                   std::size_t budget);

struct ComplexityRow {
    std::size_t d = 0;
    std::size_t activation_patterns = 0;
    std::size_t bab_triangle_leaves = 0;
    std::size_t partition_count = 0;
    std::size_t bab_multi_neuron_leaves = 0;
};

/// Rows for max_network(d) on [0, 1]^d, d = 2 .. d_max.
std::vector<ComplexityRow> complexity_experiment(std::size_t d_max);

}  // namespace cbar::verify
