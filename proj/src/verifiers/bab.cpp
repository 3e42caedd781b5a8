#include "cbar/verifiers.hpp"

#include "cbar/errors.hpp"

#include <deque>

namespace cbar::verify {

using geometry::HPolytope;
using network::SignConstraint;
using relax::BoundReport;
using relax::Kind;
using relax::Stability;

namespace {

struct Node {
    std::vector<SignConstraint> splits;
    // interval bounding only: the node's box
    Vec lo;
    Vec hi;
    std::size_t depth = 0;
};

// First unstable neuron in layer order, if any.
std::optional<SignConstraint> first_unstable(const BoundReport& r)
{
    for (const auto& layer : r.neuron_bounds)
        for (std::size_t i = 0; i < layer.neurons.size(); ++i)
            if (layer.neurons[i].stability() == Stability::Unstable)
                return SignConstraint{layer.layer, i, 1};
    return std::nullopt;
}

bool attains(const Network& net, const std::vector<Vec>& candidates, const Rational& target, std::size_t i)
{
    for (const auto& x : candidates)
        if (network::eval(net, x)[i] == target)
            return true;
    return false;
}

// Both bounds of every output are attained by points of X.
bool closed_by_witnesses(const Network& net, const BoundReport& r, const std::vector<Vec>& shared)
{
    for (std::size_t i = 0; i < r.lower.size(); ++i) {
        std::vector<Vec> lo = shared, hi = shared;
        if (i < r.lower_witness.size() && !r.lower_witness[i].empty())
            lo.push_back(r.lower_witness[i]);
        if (i < r.upper_witness.size() && !r.upper_witness[i].empty())
            hi.push_back(r.upper_witness[i]);
        if (!attains(net, lo, r.lower[i], i) || !attains(net, hi, r.upper[i], i))
            return false;
    }
    return true;
}

HPolytope with_box(const HPolytope& X, const Vec& lo, const Vec& hi)
{
    return geometry::intersect(X, HPolytope::box(lo, hi));
}

// Bounding box of the points of X in [lo, hi] whose neurons take the forced signs.
std::optional<std::pair<Vec, Vec>> rebox(const Network& net, const HPolytope& X, const Node& node)
{
    HPolytope part = with_box(X, node.lo, node.hi);
    auto regions = network::enumerate_regions(net, part, node.splits);
    if (regions.empty())
        return std::nullopt;
    std::optional<std::pair<Vec, Vec>> box;
    for (const auto& region : regions) {
        auto [lo, hi] = geometry::bounding_box(region.domain);
        if (!box) {
            box.emplace(std::move(lo), std::move(hi));
            continue;
        }
        for (std::size_t k = 0; k < lo.size(); ++k) {
            if (lo[k] < box->first[k])
                box->first[k] = lo[k];
            if (hi[k] > box->second[k])
                box->second[k] = hi[k];
        }
    }
    return box;
}

std::vector<Vec> corner_witnesses(const HPolytope& X, const Node& node)
{
    constexpr std::size_t max_corner_dim = 10;
    if (X.dim > max_corner_dim)
        return {};
    try {
        return geometry::vertices(with_box(X, node.lo, node.hi)).points;
    } catch (const CapExceeded&) {
        return {};
    }
}

class Search {
public:
    Search(const Network& net, const HPolytope& X, const relax::RelaxationSpec& spec, std::size_t budget)
        : net_(net), X_(X), spec_(spec), budget_(budget), interval_(spec.kind == Kind::IBP)
    {
    }

    VerifierReport run()
    {
        const auto before = geometry::counters();
        Node root;
        if (interval_)
            std::tie(root.lo, root.hi) = geometry::bounding_box(X_);
        std::deque<Node> open{root};
        std::vector<BoundReport> leaves;
        VerifierReport out;
        while (!open.empty()) {
            if (leaves.size() + open.size() > budget_) {
                out.status = Status::BudgetExhausted;
                for (const auto& node : open) {
                    auto r = bound(node);
                    if (r.feasible)
                        leaves.push_back(std::move(r));
                }
                out.subproblem_count = leaves.size();
                break;
            }
            Node node = std::move(open.front());
            open.pop_front();
            if (out.trace.size() <= node.depth)
                out.trace.resize(node.depth + 1, 0);
            ++out.trace[node.depth];

            BoundReport r = bound(node);
            if (!r.feasible)
                continue;
            auto split = first_unstable(r);
            if (closes(node, r, split.has_value())) {
                leaves.push_back(std::move(r));
                continue;
            }
            for (auto& child : children(node, split))
                open.push_back(std::move(child));
        }
        if (out.status == Status::Exact)
            out.subproblem_count = leaves.size();
        for (std::size_t n = 0; n < leaves.size(); ++n) {
            const auto& r = leaves[n];
            if (n == 0) {
                out.lower = r.lower;
                out.upper = r.upper;
                continue;
            }
            for (std::size_t i = 0; i < r.lower.size(); ++i) {
                if (r.lower[i] < out.lower[i])
                    out.lower[i] = r.lower[i];
                if (r.upper[i] > out.upper[i])
                    out.upper[i] = r.upper[i];
            }
        }
        out.lp_calls = geometry::counters().lp_calls - before.lp_calls;
        out.hull_calls = geometry::counters().hull_calls - before.hull_calls;
        return out;
    }

private:
    const Network& net_;
    const HPolytope& X_;
    relax::RelaxationSpec spec_;
    std::size_t budget_;
    bool interval_;

    // Triangle bounds are certified exact only once no neuron is unstable;
    // interval bounds only by points attaining them; multi-neuron and
    // cross-layer bounds by either.
    bool closes(const Node& node, const BoundReport& r, bool unstable) const
    {
        switch (spec_.kind) {
        case Kind::Triangle:
            return !unstable;
        case Kind::IBP:
            return closed_by_witnesses(net_, r, corner_witnesses(X_, node));
        default:
            return !unstable || closed_by_witnesses(net_, r, {});
        }
    }

    BoundReport bound(const Node& node) const
    {
        if (interval_)
            return relax::ibp_bounds(net_, node.lo, node.hi, node.splits);
        return relax::bound(net_, X_, spec_, node.splits);
    }

    std::vector<Node> children(const Node& node, const std::optional<SignConstraint>& split) const
    {
        std::vector<Node> out;
        if (split) {
            for (int sign : {1, -1}) {
                Node child = node;
                child.depth = node.depth + 1;
                child.splits.push_back({split->layer, split->neuron, sign});
                if (interval_) {
                    auto box = rebox(net_, X_, child);
                    if (!box)
                        continue;
                    child.lo = std::move(box->first);
                    child.hi = std::move(box->second);
                }
                out.push_back(std::move(child));
            }
            return out;
        }
        // interval bounding with every neuron stable or split: bisect the box
        std::size_t widest = 0;
        for (std::size_t k = 1; k < node.lo.size(); ++k)
            if (node.hi[k] - node.lo[k] > node.hi[widest] - node.lo[widest])
                widest = k;
        const Rational mid = (node.lo[widest] + node.hi[widest]) / 2;
        for (int half : {0, 1}) {
            Node child = node;
            child.depth = node.depth + 1;
            (half == 0 ? child.hi : child.lo)[widest] = mid;
            auto box = rebox(net_, X_, child);
            if (!box)
                continue;
            child.lo = std::move(box->first);
            child.hi = std::move(box->second);
            out.push_back(std::move(child));
        }
        return out;
    }
};

}  // namespace

VerifierReport bab(const Network& net, const HPolytope& X, const relax::RelaxationSpec& spec, std::size_t budget)
{
    if (budget == 0)
        throw std::invalid_argument("bab: budget must be positive");
    if (X.dim != net.input_dim())
        throw DimensionMismatch("bab: input set of wrong dimension");
    if (geometry::is_empty(X))
        throw EmptyPolytope("bab: empty input set");
    return Search(net, X, spec, budget).run();
}

}  // namespace cbar::verify
