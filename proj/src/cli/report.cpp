#include "cbar/cli.hpp"

#include <sstream>

namespace cbar::cli {

namespace {

json witnesses(const std::vector<Vec>& ws)
{
    json out = json::array();
    for (const auto& w : ws)
        out.push_back(w.empty() ? json(nullptr) : to_json(w));
    return out;
}

std::string stability_name(relax::Stability s)
{
    switch (s) {
    case relax::Stability::StableActive:
        return "active";
    case relax::Stability::StableInactive:
        return "inactive";
    case relax::Stability::Unstable:
        break;
    }
    return "unstable";
}

}  // namespace

std::string status_name(verify::Status s)
{
    return s == verify::Status::Exact ? "exact" : "budget_exhausted";
}

json to_json(const relax::BoundReport& r)
{
    json layers = json::array();
    for (const auto& lb : r.neuron_bounds) {
        json neurons = json::array();
        for (const auto& n : lb.neurons)
            neurons.push_back({{"lower", to_string(n.lower)},
                               {"upper", to_string(n.upper)},
                               {"stability", stability_name(n.stability())}});
        layers.push_back({{"layer", lb.layer}, {"neurons", std::move(neurons)}});
    }
    json out = {{"spec", r.spec.name()},
                {"feasible", r.feasible},
                {"lower", to_json(r.lower)},
                {"upper", to_json(r.upper)},
                {"lower_witness", witnesses(r.lower_witness)},
                {"upper_witness", witnesses(r.upper_witness)},
                {"neuron_bounds", std::move(layers)},
                {"constraints", r.stats.constraints}};
    out["exact"] = r.exact ? json(*r.exact) : json(nullptr);
    return out;
}

json to_json(const verify::VerifierReport& r)
{
    return {{"status", status_name(r.status)},
            {"lower", to_json(r.lower)},
            {"upper", to_json(r.upper)},
            {"subproblems", r.subproblem_count},
            {"trace", r.trace},
            {"lp_calls", r.lp_calls},
            {"hull_calls", r.hull_calls}};
}

json Report::to_json() const
{
    return {{"command", command},
            {"args", args},
            {"spec", spec},
            {"status", status},
            {"lower", lower},
            {"upper", upper},
            {"counters", counters},
            {"result", result},
            {"wall_time_seconds", wall_seconds}};
}

std::string complexity_csv(const std::vector<verify::ComplexityRow>& rows)
{
    std::ostringstream out;
    out << "d,activation_patterns,bab_triangle_leaves,partition_count,bab_multi_neuron_leaves\n";
    for (const auto& r : rows)
        out << r.d << ',' << r.activation_patterns << ',' << r.bab_triangle_leaves << ',' << r.partition_count << ','
            << r.bab_multi_neuron_leaves << '\n';
    return out.str();
}

}  // namespace cbar::cli
