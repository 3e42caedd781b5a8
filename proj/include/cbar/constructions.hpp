#pragma once

#include "cbar/geometry.hpp"
#include "cbar/network.hpp"
#include "cbar/relaxations.hpp"

namespace cbar::constructions {

using network::Network;

/// max(x_1, ..., x_d) on nonnegative inputs, built by nesting max(a, b) =
/// relu(a - b) + relu(b). Inputs not yet merged ride along through the
/// ReLU layers, so only the d - 1 comparison neurons can change sign on
/// [0, 1]^d.
Network max_network(std::size_t d);

/// relu(x) - relu(x) on a single input, with two separate neurons.
Network zero_network();

/// x1 + relu(x2 - x1).
Network diagonal_network();

struct Example {
    Network net;
    geometry::HPolytope input;
    // layer index separating the first part (affine + ReLU) from the rest
    std::size_t split_layer = 0;
};

/// Two-input network whose first affine + ReLU maps [-1, 1]^2 onto a
/// non-convex union of three pieces, followed by |u1 - 1| + |u2 - 1| as four
/// ReLUs. Minimum 1 on the box.
Example incompleteness_example();

enum class Direction { Lower, Upper };

struct GapWitness {
    Network network;
    geometry::HPolytope input;
    relax::RelaxationSpec spec;
    Rational claimed_gap;
    Direction direction = Direction::Lower;
    // the network is second(first(x)) with first = layers [0, split_layer)
    std::size_t split_layer = 0;
};

/// Network with exact minimum T over X (maximum -T for Direction::Upper)
/// whose layerwise-optimal bound is <= 0 (>= 0). X must not be a single point.
GapWitness gap_network(const geometry::HPolytope& X, const Rational& T, Direction direction = Direction::Lower);

struct Pumped {
    Network network;
    // total depth after padding
    std::size_t depth = 0;
    // cross-layer window max(1, floor(alpha * depth))
    std::size_t window = 0;
    std::size_t identity_layers = 0;
};

/// Inserts identity affine layers between f1 and f2 so that the total depth is
/// ceil(max(1 / alpha, (L1 + L2 + 1) / (1 - alpha))).
Pumped pump(const Network& f1, const Network& f2, const Rational& alpha);

/// Equivalent network on X whose hidden layers also carry x - lower(X)
/// through every ReLU; the copies get zero output weight.
Network exact_transform(const Network& f, const geometry::HPolytope& X);

}  // namespace cbar::constructions
