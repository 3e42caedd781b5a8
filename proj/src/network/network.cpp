#include "cbar/network.hpp"

namespace cbar::network {

Network::Network(std::size_t input_dim, std::vector<Layer> layers) : input_dim_(input_dim)
{
    for (auto& l : layers)
        add(std::move(l));
}

void Network::add(Layer layer)
{
    const std::size_t in = output_dim();
    if (auto* a = std::get_if<AffineLayer>(&layer)) {
        if (a->A.size() != a->b.size())
            throw DimensionMismatch("affine layer: weight rows differ from bias length");
        for (const auto& row : a->A)
            if (row.size() != in)
                throw DimensionMismatch("affine layer: input dimension " + std::to_string(row.size()) +
                                        ", expected " + std::to_string(in));
        if (a->A.empty())
            throw DimensionMismatch("affine layer with no outputs");
    } else {
        auto& r = std::get<ReluLayer>(layer);
        if (r.width != in)
            throw DimensionMismatch("relu layer: width " + std::to_string(r.width) + ", expected " +
                                    std::to_string(in));
    }
    layers_.push_back(std::move(layer));
}

void Network::add_affine(Mat A, Vec b)
{
    add(AffineLayer{std::move(A), std::move(b)});
}

void Network::add_relu()
{
    add(ReluLayer{output_dim()});
}

std::size_t Network::block_dim(std::size_t block) const
{
    if (block > layers_.size())
        throw std::out_of_range("block index out of range");
    std::size_t dim = input_dim_;
    for (std::size_t j = 0; j < block; ++j)
        if (auto* a = std::get_if<AffineLayer>(&layers_[j]))
            dim = a->out_dim();
    return dim;
}

std::size_t Network::relu_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_)
        if (auto* r = std::get_if<ReluLayer>(&l))
            n += r->width;
    return n;
}

Network Network::slice(std::size_t from, std::size_t to) const
{
    if (from > to || to > layers_.size())
        throw std::out_of_range("slice: bad layer range");
    Network out(block_dim(from));
    for (std::size_t j = from; j < to; ++j)
        out.add(layers_[j]);
    return out;
}

std::string block_name(std::size_t block)
{
    return block == 0 ? std::string("x") : "v" + std::to_string(block);
}

std::vector<Vec> eval_blocks(const Network& net, const Vec& x)
{
    if (x.size() != net.input_dim())
        throw DimensionMismatch("eval: input of dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(net.input_dim()));
    std::vector<Vec> values{x};
    for (const auto& layer : net.layers()) {
        const Vec& in = values.back();
        if (auto* a = std::get_if<AffineLayer>(&layer)) {
            Vec out = mat_vec(a->A, in);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += a->b[i];
            values.push_back(std::move(out));
        } else {
            Vec out = in;
            for (auto& v : out)
                if (sgn(v) < 0)
                    v = 0;
            values.push_back(std::move(out));
        }
    }
    return values;
}

Vec eval(const Network& net, const Vec& x)
{
    return eval_blocks(net, x).back();
}

std::pair<Network, Network> split(const Network& net, std::size_t i)
{
    if (i == 0 || i >= net.depth())
        throw std::out_of_range("split: index must lie strictly inside the network");
    return {net.slice(0, i), net.slice(i, net.depth())};
}

Network compose(const Network& first, const Network& second)
{
    if (first.output_dim() != second.input_dim())
        throw DimensionMismatch("compose: output and input dimensions differ");
    Network out = first;
    for (const auto& l : second.layers())
        out.add(l);
    return out;
}

Vec AffineMap::apply(const Vec& x) const
{
    Vec y = mat_vec(A, x);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += b[i];
    return y;
}

}  // namespace cbar::network
