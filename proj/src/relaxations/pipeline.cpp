#include "cbar/relaxations.hpp"

#include <algorithm>
#include <numeric>

namespace cbar::relax {

using geometry::ConstraintSystem;
using geometry::HPolytope;
using geometry::LpStatus;
using geometry::Sense;
using network::Network;
using network::SignConstraint;

namespace {

// Thrown internally when sign splits leave no feasible point.
struct NoPoint {};

std::vector<std::size_t> block_columns(const ConstraintSystem& s, std::size_t block)
{
    const geometry::Block& b = s.block(block);
    std::vector<std::size_t> cols(b.dim);
    std::iota(cols.begin(), cols.end(), b.offset);
    return cols;
}

// sign * v[neuron] >= 0 on the given block.
void add_split(ConstraintSystem& s, std::size_t block, const SignConstraint& split)
{
    Vec row = zeros(s.num_vars());
    row[s.block(block).offset + split.neuron] = split.sign > 0 ? -1 : 1;
    s.add_le(std::move(row), 0, "split");
}

void add_split(HPolytope& p, const SignConstraint& split)
{
    Vec row = zeros(p.dim);
    row[split.neuron] = split.sign > 0 ? -1 : 1;
    p.add_inequality(std::move(row), 0);
}

std::vector<SignConstraint> splits_on(const std::vector<SignConstraint>& splits, std::size_t layer)
{
    std::vector<SignConstraint> out;
    for (const auto& s : splits)
        if (s.layer == layer)
            out.push_back(s);
    return out;
}

NeuronBounds lp_interval(const ConstraintSystem& s, std::size_t block, std::size_t neuron)
{
    Vec e = zeros(s.block(block).dim);
    e[neuron] = 1;
    auto lo = geometry::lp_optimize(s, block, e, Sense::Minimize);
    if (lo.status == LpStatus::Infeasible)
        throw NoPoint{};
    auto hi = geometry::lp_optimize(s, block, e, Sense::Maximize);
    if (!lo.optimal() || !hi.optimal())
        throw std::logic_error("relaxation: pre-activation bound is unbounded");
    return {lo.value, hi.value};
}

// Widest unstable neurons first, lowest index on ties; stable neurons fill up.
std::vector<std::size_t> choose_index_set(const std::vector<NeuronBounds>& bounds, std::size_t k)
{
    std::vector<std::size_t> unstable, stable;
    for (std::size_t i = 0; i < bounds.size(); ++i)
        (bounds[i].stability() == Stability::Unstable ? unstable : stable).push_back(i);
    std::stable_sort(unstable.begin(), unstable.end(), [&](std::size_t a, std::size_t b) {
        return bounds[a].upper - bounds[a].lower > bounds[b].upper - bounds[b].lower;
    });
    std::vector<std::size_t> chosen;
    for (auto i : unstable)
        if (chosen.size() < k)
            chosen.push_back(i);
    for (auto i : stable)
        if (chosen.size() < k)
            chosen.push_back(i);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// Image of R under an affine layer, by Fourier-Motzkin.
HPolytope affine_image(const HPolytope& R, const network::AffineLayer& layer)
{
    ConstraintSystem local;
    local.add_block("in", R.dim);
    local.add_polytope(R, {0}, "inbound");
    relax_affine(layer, local, 0, "out");
    return geometry::project_polytope(local, {1});
}

// Triangle and multi-neuron pipelines: each ReLU layer is relaxed against the
// exact projection of the constraints so far onto its input block.
class LayerwiseAssembly {
public:
    LayerwiseAssembly(const Network& net, const HPolytope& X, const RelaxationSpec& spec,
                      const std::vector<SignConstraint>& splits)
        : net_(net), spec_(spec), splits_(splits)
    {
        system.add_block("x", net.input_dim());
        system.add_polytope(X, {0}, "input");
        inbound_ = X;
    }

    ConstraintSystem system;
    std::vector<LayerBounds> neuron_bounds;

    void run()
    {
        for (std::size_t j = 0; j < net_.depth(); ++j) {
            if (auto* a = std::get_if<network::AffineLayer>(&net_.layer(j))) {
                relax_affine(*a, system, j, network::block_name(j + 1));
                if (spec_.kind != Kind::Triangle)
                    inbound_ = affine_image(inbound_, *a);
            } else {
                relu_layer(j);
            }
        }
    }

private:
    const Network& net_;
    RelaxationSpec spec_;
    const std::vector<SignConstraint>& splits_;
    HPolytope inbound_;

    void relu_layer(std::size_t j)
    {
        const std::size_t width = net_.block_dim(j);
        for (const auto& s : splits_on(splits_, j)) {
            add_split(system, j, s);
            if (spec_.kind != Kind::Triangle)
                add_split(inbound_, s);
        }

        LayerBounds lb{j, {}};
        if (spec_.kind == Kind::Triangle) {
            for (std::size_t i = 0; i < width; ++i)
                lb.neurons.push_back(lp_interval(system, j, i));
        } else {
            ConstraintSystem in = geometry::system_of(inbound_, "in");
            for (std::size_t i = 0; i < width; ++i)
                lb.neurons.push_back(lp_interval(in, 0, i));
        }

        const std::size_t out = system.add_block(network::block_name(j + 1), width);
        const auto pre = block_columns(system, j);
        const auto post = block_columns(system, out);

        std::vector<std::size_t> hulled;
        if (spec_.kind == Kind::MultiNeuron)
            hulled = choose_index_set(lb.neurons, spec_.param);

        // the next inbound set for multi-neuron, projected from this layer's constraints
        const bool track = spec_.kind == Kind::MultiNeuron;
        ConstraintSystem local;
        local.add_block("in", width);
        local.add_block("out", width);
        if (track)
            local.add_polytope(inbound_, {0}, "inbound");

        if (!hulled.empty()) {
            HPolytope H = relu_graph_hull(inbound_, hulled);
            std::vector<std::size_t> cols = pre, local_cols(width);
            std::iota(local_cols.begin(), local_cols.end(), 0);
            for (auto i : hulled) {
                cols.push_back(post[i]);
                local_cols.push_back(width + i);
            }
            system.add_polytope_at(H, cols, "hull " + network::block_name(j + 1));
            if (track)
                local.add_polytope_at(H, local_cols, "hull");
        }
        std::vector<bool> in_hull(width, false);
        for (auto i : hulled)
            in_hull[i] = true;
        for (std::size_t i = 0; i < width; ++i) {
            if (in_hull[i])
                continue;
            HPolytope t = triangle_relax_neuron(lb.neurons[i].lower, lb.neurons[i].upper);
            system.add_polytope_at(t, {pre[i], post[i]}, "triangle " + network::block_name(j + 1));
            if (track)
                local.add_polytope_at(t, {i, width + i}, "triangle");
        }
        if (track)
            inbound_ = geometry::project_polytope(local, {1});
        neuron_bounds.push_back(std::move(lb));
    }
};

// Cross-layer hulls over windows of r consecutive layers with stride one;
// r = 1 is the optimal layerwise relaxation.
class WindowAssembly {
public:
    WindowAssembly(const Network& net, const HPolytope& X, std::size_t r, const std::vector<SignConstraint>& splits)
        : net_(net), r_(std::min(r, net.depth())), splits_(splits)
    {
        for (std::size_t j = 0; j <= net.depth(); ++j)
            system.add_block(network::block_name(j), net.block_dim(j));
        system.add_polytope(X, {0}, "input");
        for (const auto& s : splits)
            add_split(system, s.layer, s);
        if (r_ == 0)
            return;
        for (std::size_t j = 0; j < r_; ++j)
            state_.add_block(network::block_name(j), net.block_dim(j));
        state_.add_polytope(X, {0}, "input");
        for (std::size_t j = 0; j < r_; ++j)
            for (const auto& s : splits_on(splits_, j))
                add_split(state_, j, s);
    }

    ConstraintSystem system;

    void run()
    {
        if (r_ == 0)
            return;
        for (std::size_t i = 0; i + r_ <= net_.depth(); ++i)
            window(i);
    }

private:
    const Network& net_;
    std::size_t r_;
    const std::vector<SignConstraint>& splits_;
    // projection of the constraints so far onto blocks i .. i + r - 1
    ConstraintSystem state_;

    void window(std::size_t i)
    {
        HPolytope inbound = r_ == 1 ? state_.as_polytope() : geometry::project_polytope(state_, {0});
        std::vector<SignConstraint> forced;
        for (const auto& s : splits_)
            if (s.layer >= i && s.layer < i + r_)
                forced.push_back({s.layer - i, s.neuron, s.sign});
        const Network sub = net_.slice(i, i + r_);
        std::vector<Vec> points;
        try {
            points = layer_graph_points(sub, inbound, forced);
        } catch (const EmptyPolytope&) {
            throw NoPoint{};
        }
        std::size_t joint = 0;
        std::vector<std::size_t> blocks;
        for (std::size_t j = i; j <= i + r_; ++j) {
            joint += net_.block_dim(j);
            blocks.push_back(j);
        }
        HPolytope H = geometry::hull(geometry::VPolytope(joint, points));
        system.add_polytope(H, blocks, "window " + std::to_string(i));

        if (i + r_ == net_.depth())
            return;
        const std::size_t next = i + r_;
        ConstraintSystem updated;
        if (r_ == 1) {
            const std::size_t skip = net_.block_dim(i);
            std::vector<Vec> image;
            for (const auto& p : points)
                image.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(skip), p.end());
            HPolytope img = geometry::hull(geometry::VPolytope(net_.block_dim(next), image));
            updated.add_block(network::block_name(next), img.dim);
            updated.add_polytope(img, {0}, "inbound");
        } else {
            ConstraintSystem joined = state_;
            joined.add_block(network::block_name(next), net_.block_dim(next));
            std::vector<std::size_t> all(blocks.size());
            std::iota(all.begin(), all.end(), 0);
            joined.add_polytope(H, all, "window");
            std::vector<std::size_t> keep(all.begin() + 1, all.end());
            updated = geometry::project(joined, keep);
        }
        for (const auto& s : splits_on(splits_, next))
            add_split(updated, updated.block_index(network::block_name(next)), s);
        state_ = std::move(updated);
    }
};

void fill_output_bounds(BoundReport& report, const ConstraintSystem& system, std::size_t out_block,
                        std::size_t input_dim)
{
    const std::size_t m = system.block(out_block).dim;
    report.lower.resize(m);
    report.upper.resize(m);
    report.lower_witness.resize(m);
    report.upper_witness.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec e = zeros(m);
        e[i] = 1;
        for (auto sense : {Sense::Minimize, Sense::Maximize}) {
            auto r = geometry::lp_optimize(system, out_block, e, sense);
            if (r.status == LpStatus::Infeasible)
                throw NoPoint{};
            if (r.status == LpStatus::Unbounded)
                throw std::logic_error("relaxation: output is unbounded");
            Vec witness(r.point.begin(), r.point.begin() + static_cast<std::ptrdiff_t>(input_dim));
            if (sense == Sense::Minimize) {
                report.lower[i] = r.value;
                report.lower_witness[i] = std::move(witness);
            } else {
                report.upper[i] = r.value;
                report.upper_witness[i] = std::move(witness);
            }
        }
    }
}

}  // namespace

BoundReport bound(const Network& net, const HPolytope& X, const RelaxationSpec& spec,
                  const std::vector<SignConstraint>& splits)
{
    if (X.dim != net.input_dim())
        throw DimensionMismatch("bound: input set of wrong dimension");
    for (const auto& s : splits)
        if (s.layer >= net.depth() || !net.is_relu(s.layer) || s.neuron >= net.block_dim(s.layer))
            throw std::out_of_range("bound: split on a non-ReLU neuron");

    if (splits.empty() && geometry::is_empty(X))
        throw EmptyPolytope("bound: empty input set");
    if (spec.kind == Kind::IBP) {
        auto [lo, hi] = geometry::bounding_box(X);
        return ibp_bounds(net, lo, hi, splits);
    }

    const auto before = geometry::counters();
    BoundReport report;
    report.spec = spec;
    try {
        if (spec.window()) {
            WindowAssembly w(net, X, *spec.window(), splits);
            w.run();
            report.system = std::move(w.system);
            for (std::size_t j = 0; j < net.depth(); ++j) {
                if (!net.is_relu(j))
                    continue;
                LayerBounds lb{j, {}};
                for (std::size_t i = 0; i < net.block_dim(j); ++i)
                    lb.neurons.push_back(lp_interval(report.system, j, i));
                report.neuron_bounds.push_back(std::move(lb));
            }
        } else {
            LayerwiseAssembly a(net, X, spec, splits);
            a.run();
            report.system = std::move(a.system);
            report.neuron_bounds = std::move(a.neuron_bounds);
        }
        fill_output_bounds(report, report.system, net.depth(), net.input_dim());
    } catch (const NoPoint&) {
        if (splits.empty())
            throw std::logic_error("relaxation of a non-empty input set has no point");
        report.feasible = false;
        report.lower.clear();
        report.upper.clear();
        report.lower_witness.clear();
        report.upper_witness.clear();
    } catch (const EmptyPolytope&) {
        if (splits.empty())
            throw;
        report.feasible = false;
        report.lower.clear();
        report.upper.clear();
    }
    const auto& after = geometry::counters();
    report.stats.constraints = report.system.size();
    report.stats.lp_calls = after.lp_calls - before.lp_calls;
    report.stats.hull_calls = after.hull_calls - before.hull_calls;
    report.stats.vertex_calls = after.vertex_calls - before.vertex_calls;
    report.stats.projections = after.projections - before.projections;
    return report;
}

}  // namespace cbar::relax
