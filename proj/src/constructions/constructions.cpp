#include "cbar/constructions.hpp"

namespace cbar::constructions {

using geometry::HPolytope;

namespace {

Vec unit(std::size_t n, std::size_t i, const Rational& value = 1)
{
    Vec v = zeros(n);
    v[i] = value;
    return v;
}

}  // namespace

Network max_network(std::size_t d)
{
    if (d < 2)
        throw std::invalid_argument("max_network needs d >= 2");
    Network net(d);
    // stage 1 input: (x1, x2, ..., xd) -> (x1 - x2, x2, x3, ..., xd)
    {
        Mat A;
        A.push_back(unit(d, 0));
        A[0][1] = -1;
        for (std::size_t k = 1; k < d; ++k)
            A.push_back(unit(d, k));
        net.add_affine(std::move(A), zeros(d));
        net.add_relu();
    }
    // later stages read (relu(m - x_s), x_s, x_{s+1}, ...) and merge the first two
    for (std::size_t width = d; width > 2; --width) {
        Mat A;
        Vec head = zeros(width);
        head[0] = 1;
        head[1] = 1;
        head[2] = -1;
        A.push_back(head);
        for (std::size_t k = 2; k < width; ++k)
            A.push_back(unit(width, k));
        net.add_affine(std::move(A), zeros(width - 1));
        net.add_relu();
    }
    net.add_affine({Vec{1, 1}}, Vec{0});
    return net;
}

Network zero_network()
{
    Network net(1);
    net.add_affine({Vec{1}, Vec{1}}, zeros(2));
    net.add_relu();
    net.add_affine({Vec{1, -1}}, Vec{0});
    return net;
}

Network diagonal_network()
{
    Network net(2);
    net.add_affine({Vec{1, 0}, Vec{-1, 1}}, zeros(2));
    net.add_relu();
    net.add_affine({Vec{1, 1}}, Vec{0});
    return net;
}

namespace {

// |u1 - c1| + |u2 - c2| scaled by `scale`, as affine, ReLU, affine.
void add_abs_sum(Network& net, const Rational& c1, const Rational& c2, const Rational& scale)
{
    net.add_affine({Vec{1, 0}, Vec{-1, 0}, Vec{0, 1}, Vec{0, -1}}, Vec{-c1, c1, -c2, c2});
    net.add_relu();
    net.add_affine({Vec{scale, scale, scale, scale}}, Vec{0});
}

}  // namespace

Example incompleteness_example()
{
    Example ex;
    ex.net = Network(2);
    ex.net.add_affine({Vec{-1, frac(-3, 2)}, Vec{-1, frac(3, 2)}}, Vec{frac(-1, 2), frac(-1, 2)});
    ex.net.add_relu();
    add_abs_sum(ex.net, 1, 1, 1);
    ex.input = HPolytope::box(Vec{-1, -1}, Vec{1, 1});
    ex.split_layer = 2;
    return ex;
}

GapWitness gap_network(const HPolytope& X, const Rational& T, Direction direction)
{
    if (sgn(T) <= 0)
        throw std::invalid_argument("gap_network needs T > 0");
    const std::size_t d = X.dim;
    // first coordinate along which X is not a single value
    std::size_t coord = d;
    Rational lo, hi;
    for (std::size_t i = 0; i < d && coord == d; ++i) {
        auto mn = geometry::lp_optimize(X, unit(d, i), geometry::Sense::Minimize);
        auto mx = geometry::lp_optimize(X, unit(d, i), geometry::Sense::Maximize);
        if (mn.status == geometry::LpStatus::Infeasible)
            throw EmptyPolytope("gap_network: empty input set");
        if (!mn.optimal() || !mx.optimal())
            throw UnboundedPolytope("gap_network: unbounded input set");
        if (mn.value < mx.value) {
            coord = i;
            lo = mn.value;
            hi = mx.value;
        }
    }
    if (coord == d)
        throw std::invalid_argument("gap_network: input set is a single point");

    GapWitness w;
    w.network = Network(d);
    // normalise the chosen coordinate onto [-1, 1]
    const Rational scale = 2 / (hi - lo);
    w.network.add_affine({unit(d, coord, scale)}, Vec{-scale * lo - 1});
    w.network.add_affine({Vec{1}, Vec{1}}, Vec{1, 0});
    w.network.add_relu();
    const Rational weight = direction == Direction::Lower ? Rational(2 * T) : Rational(-2 * T);
    add_abs_sum(w.network, 1, frac(1, 2), weight);
    w.input = X;
    w.spec = relax::RelaxationSpec::layerwise_optimal();
    w.claimed_gap = T;
    w.direction = direction;
    w.split_layer = 3;
    return w;
}

Pumped pump(const Network& f1, const Network& f2, const Rational& alpha)
{
    if (sgn(alpha) <= 0 || alpha >= 1)
        throw std::invalid_argument("pump: alpha must lie in (0, 1)");
    if (f1.output_dim() != f2.input_dim())
        throw DimensionMismatch("pump: f1 output differs from f2 input");
    const Rational l1 = static_cast<long>(f1.depth());
    const Rational l2 = static_cast<long>(f2.depth());
    Rational a = 1 / alpha;
    Rational b = (l1 + l2 + 1) / (1 - alpha);
    const Rational depth = ceil_of(a > b ? a : b);
    Rational window = floor_of(alpha * depth);
    if (window < 1)
        window = 1;

    Pumped out;
    out.depth = depth.get_num().get_ui();
    out.window = window.get_num().get_ui();
    out.identity_layers = out.depth - f1.depth() - f2.depth();
    out.network = f1;
    const std::size_t width = f1.output_dim();
    for (std::size_t k = 0; k < out.identity_layers; ++k)
        out.network.add_affine(identity(width), zeros(width));
    for (const auto& l : f2.layers())
        out.network.add(l);
    return out;
}

Network exact_transform(const Network& f, const HPolytope& X)
{
    if (X.dim != f.input_dim())
        throw DimensionMismatch("exact_transform: input set of wrong dimension");
    auto [lower, upper] = geometry::bounding_box(X);
    const std::size_t d = X.dim;

    // Work on a copy that starts and ends with affine layers.
    std::vector<network::Layer> layers;
    if (f.depth() == 0 || f.is_relu(0))
        layers.emplace_back(network::AffineLayer{identity(d), zeros(d)});
    for (const auto& l : f.layers())
        layers.push_back(l);
    if (std::holds_alternative<network::ReluLayer>(layers.back())) {
        const std::size_t w = f.output_dim();
        layers.emplace_back(network::AffineLayer{identity(w), zeros(w)});
    }
    if (layers.size() == 1)
        return Network(d, layers);

    Network g(d);
    for (std::size_t j = 0; j < layers.size(); ++j) {
        if (std::holds_alternative<network::ReluLayer>(layers[j])) {
            g.add_relu();
            continue;
        }
        const auto& a = std::get<network::AffineLayer>(layers[j]);
        const bool first = j == 0;
        const bool last = j + 1 == layers.size();
        const std::size_t in = a.in_dim(), out = a.out_dim();
        Mat A;
        Vec b;
        for (std::size_t i = 0; i < out; ++i) {
            Vec row = zeros(first ? in : in + d);
            for (std::size_t k = 0; k < in; ++k)
                row[k] = a.A[i][k];
            A.push_back(std::move(row));
            b.push_back(a.b[i]);
        }
        if (!last) {
            // copy channel t_k = x_k - lower_k, nonnegative on X
            for (std::size_t k = 0; k < d; ++k) {
                Vec row = zeros(first ? in : in + d);
                row[first ? k : in + k] = 1;
                A.push_back(std::move(row));
                b.push_back(first ? Rational(-lower[k]) : Rational(0));
            }
        }
        g.add_affine(std::move(A), std::move(b));
    }
    return g;
}

}  // namespace cbar::constructions
