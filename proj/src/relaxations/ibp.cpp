#include "cbar/relaxations.hpp"

namespace cbar::relax {

RelaxationSpec RelaxationSpec::multi_neuron(std::size_t k)
{
    if (k == 0)
        throw std::invalid_argument("multi-neuron relaxation needs k >= 1");
    return {Kind::MultiNeuron, k};
}

RelaxationSpec RelaxationSpec::cross_layer(std::size_t r)
{
    if (r == 0)
        throw std::invalid_argument("cross-layer relaxation needs r >= 1");
    return {Kind::CrossLayer, r};
}

std::optional<std::size_t> RelaxationSpec::window() const
{
    if (kind == Kind::LayerwiseOptimal)
        return 1;
    if (kind == Kind::CrossLayer)
        return param;
    return std::nullopt;
}

std::string RelaxationSpec::name() const
{
    switch (kind) {
    case Kind::IBP:
        return "ibp";
    case Kind::Triangle:
        return "triangle";
    case Kind::MultiNeuron:
        return "mk:" + std::to_string(param);
    case Kind::LayerwiseOptimal:
        return "p1";
    case Kind::CrossLayer:
        return "pr:" + std::to_string(param);
    }
    return "?";
}

namespace {

std::size_t parse_count(const std::string& text, const std::string& whole)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("bad method '" + whole + "'");
    std::size_t v = std::stoul(text);
    if (v == 0)
        throw ParseError("method parameter must be positive in '" + whole + "'");
    return v;
}

}  // namespace

RelaxationSpec RelaxationSpec::parse(const std::string& text)
{
    if (text == "ibp")
        return ibp();
    if (text == "triangle")
        return triangle();
    if (text == "p1")
        return layerwise_optimal();
    if (text.rfind("mk:", 0) == 0)
        return multi_neuron(parse_count(text.substr(3), text));
    if (text.rfind("pr:", 0) == 0)
        return cross_layer(parse_count(text.substr(3), text));
    throw ParseError("unknown method '" + text + "'");
}

Stability NeuronBounds::stability() const
{
    if (sgn(lower) >= 0)
        return Stability::StableActive;
    if (sgn(upper) <= 0)
        return Stability::StableInactive;
    return Stability::Unstable;
}

BoundReport ibp_bounds(const network::Network& net, const Vec& lower, const Vec& upper,
                       const std::vector<network::SignConstraint>& splits)
{
    if (lower.size() != net.input_dim() || upper.size() != net.input_dim())
        throw DimensionMismatch("ibp_bounds: box of wrong dimension");
    const auto before = geometry::counters();
    BoundReport report;
    report.spec = RelaxationSpec::ibp();
    report.system.add_block("x", net.input_dim());
    report.system.add_polytope(geometry::HPolytope::box(lower, upper), {0}, "input");
    report.stats.constraints = report.system.size();

    Vec lo = lower, hi = upper;
    for (std::size_t j = 0; j < net.depth(); ++j) {
        if (auto* a = std::get_if<network::AffineLayer>(&net.layer(j))) {
            network::Network single(lo.size());
            single.add(*a);
            auto next = network::propagate_intervals(single, lo, hi).back();
            lo = std::move(next.first);
            hi = std::move(next.second);
            continue;
        }
        for (const auto& s : splits) {
            if (s.layer != j)
                continue;
            if (s.sign > 0 && sgn(lo[s.neuron]) < 0)
                lo[s.neuron] = 0;
            if (s.sign < 0 && sgn(hi[s.neuron]) > 0)
                hi[s.neuron] = 0;
            if (lo[s.neuron] > hi[s.neuron])
                report.feasible = false;
        }
        LayerBounds lb{j, {}};
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lb.neurons.push_back({lo[i], hi[i]});
            if (sgn(lo[i]) < 0)
                lo[i] = 0;
            if (sgn(hi[i]) < 0)
                hi[i] = 0;
        }
        report.neuron_bounds.push_back(std::move(lb));
    }
    if (report.feasible) {
        report.lower = lo;
        report.upper = hi;
    }
    report.stats.lp_calls = geometry::counters().lp_calls - before.lp_calls;
    return report;
}

}  // namespace cbar::relax
