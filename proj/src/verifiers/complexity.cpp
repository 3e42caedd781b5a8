#include "cbar/verifiers.hpp"

#include "cbar/constructions.hpp"

namespace cbar::verify {

std::vector<ComplexityRow> complexity_experiment(std::size_t d_max)
{
    if (d_max < 2 || d_max > 8)
        throw std::invalid_argument("complexity_experiment: d_max must lie in [2, 8]");
    constexpr std::size_t budget = 1u << 12;
    std::vector<ComplexityRow> rows;
    for (std::size_t d = 2; d <= d_max; ++d) {
        const auto net = constructions::max_network(d);
        const auto X = geometry::HPolytope::box(zeros(d), Vec(d, Rational(1)));
        ComplexityRow row;
        row.d = d;
        row.activation_patterns = network::count_activation_patterns(net, X);
        row.bab_triangle_leaves = bab(net, X, relax::RelaxationSpec::triangle(), budget).subproblem_count;
        row.partition_count = polytope_partition(net, X, budget).subproblem_count;
        row.bab_multi_neuron_leaves = bab(net, X, relax::RelaxationSpec::multi_neuron(d), budget).subproblem_count;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cbar::verify
