#pragma once

#include "cbar/geometry.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cbar::network {

struct AffineLayer {
    Mat A;
    Vec b;

    std::size_t in_dim() const { return A.empty() ? 0 : A.front().size(); }
    std::size_t out_dim() const { return A.size(); }
};

struct ReluLayer {
    std::size_t width = 0;
};

using Layer = std::variant<AffineLayer, ReluLayer>;

/// A sequence of affine and ReLU layers; each counts as one layer. Block 0 is
/// the input and block j the output of layer j.
class Network {
public:
    Network() = default;
    explicit Network(std::size_t input_dim) : input_dim_(input_dim) {}
    Network(std::size_t input_dim, std::vector<Layer> layers);

    void add(Layer layer);
    void add_affine(Mat A, Vec b);
    void add_relu();

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return block_dim(depth()); }
    std::size_t depth() const { return layers_.size(); }
    const std::vector<Layer>& layers() const { return layers_; }
    const Layer& layer(std::size_t j) const { return layers_.at(j); }
    bool is_relu(std::size_t j) const { return std::holds_alternative<ReluLayer>(layers_.at(j)); }

    std::size_t block_dim(std::size_t block) const;
    std::size_t relu_count() const;

    /// Sub-network made of layers [from, to).
    Network slice(std::size_t from, std::size_t to) const;

private:
    std::size_t input_dim_ = 0;
    std::vector<Layer> layers_;
};

/// "x" for the input block, "v<j>" for the output of layer j.
std::string block_name(std::size_t block);

Vec eval(const Network& net, const Vec& x);
/// Values of every block, input first.
std::vector<Vec> eval_blocks(const Network& net, const Vec& x);

/// (first i layers, remaining layers).
std::pair<Network, Network> split(const Network& net, std::size_t i);
Network compose(const Network& first, const Network& second);

struct AffineMap {
    Mat A;
    Vec b;

    Vec apply(const Vec& x) const;
};

/// One sign per ReLU neuron in topological order; +1 active, -1 inactive.
struct ActivationPattern {
    std::vector<int> signs;

    bool operator==(const ActivationPattern&) const = default;
    auto operator<=>(const ActivationPattern&) const = default;
};

struct LinearRegion {
    ActivationPattern pattern;
    geometry::HPolytope domain;
    AffineMap map;
    // map from the input to each block on this region, input block first
    std::vector<AffineMap> block_maps;
};

/// Fixes the sign of one neuron: layer is the index of a ReLU layer.
struct SignConstraint {
    std::size_t layer = 0;
    std::size_t neuron = 0;
    int sign = 1;

    bool operator==(const SignConstraint&) const = default;
};

/// Interval arithmetic through every layer from the box [lower, upper]:
/// affine layers split weights by sign, ReLU clamps. Entry j bounds block j.
std::vector<std::pair<Vec, Vec>> propagate_intervals(const Network& net, const Vec& lower, const Vec& upper);

/// Neurons whose pre-activation interval, propagated from the bounding box
/// of X, contains zero in its interior. This is the count the oracle cap
/// applies to.
std::size_t unstable_relu_count(const Network& net, const geometry::HPolytope& X);

/// Depth-first sign enumeration with LP pruning. A neuron is branched on only
/// when its pre-activation takes both signs strictly on the current region;
/// otherwise it gets +1 when the minimum is >= 0 and -1 when the maximum is
/// <= 0. Throws CapExceeded beyond the oracle cap.
std::vector<LinearRegion> enumerate_regions(const Network& net, const geometry::HPolytope& X,
                                            const std::vector<SignConstraint>& forced = {});

std::pair<Vec, Vec> exact_bounds(const Network& net, const geometry::HPolytope& X);
std::pair<Vec, Vec> exact_bounds(const std::vector<LinearRegion>& regions, std::size_t output_dim);

/// Per region, the vertices of {(x, f(x))}; coordinates are input then output.
std::vector<geometry::VPolytope> exact_output_graph(const Network& net, const geometry::HPolytope& X);

std::size_t count_activation_patterns(const Network& net, const geometry::HPolytope& X);

}  // namespace cbar::network
