#include "cbar/cli.hpp"

#include "cbar/constructions.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

namespace cbar::cli {

using geometry::HPolytope;
using relax::RelaxationSpec;

namespace {

struct CounterScope {
    geometry::Counters before = geometry::counters();

    json delta() const
    {
        const auto& now = geometry::counters();
        return {{"lp_calls", now.lp_calls - before.lp_calls},
                {"hull_calls", now.hull_calls - before.hull_calls},
                {"vertex_calls", now.vertex_calls - before.vertex_calls},
                {"projections", now.projections - before.projections}};
    }
};

json row(const std::string& quantity, json value, json expected = nullptr)
{
    return {{"quantity", quantity}, {"value", std::move(value)}, {"expected", std::move(expected)}};
}

json interval(const Vec& lo, const Vec& hi)
{
    return {{"lower", to_json(lo)}, {"upper", to_json(hi)}};
}

json interval(const relax::BoundReport& r)
{
    return interval(r.lower, r.upper);
}

HPolytope unit_box(std::size_t d)
{
    return HPolytope::box(zeros(d), Vec(d, Rational(1)));
}

// Points of X to compare two networks on: its vertices and a rational grid
// of its bounding box filtered to X.
std::vector<Vec> sample_points(const HPolytope& X)
{
    std::vector<Vec> pts = geometry::vertices(X).points;
    auto [lo, hi] = geometry::bounding_box(X);
    constexpr int steps = 6;
    std::vector<int> idx(X.dim, 0);
    while (true) {
        Vec p(X.dim);
        for (std::size_t k = 0; k < X.dim; ++k)
            p[k] = lo[k] + (hi[k] - lo[k]) * frac(static_cast<long>(idx[k]), steps);
        if (geometry::contains(X, p))
            pts.push_back(std::move(p));
        std::size_t k = 0;
        while (k < X.dim && ++idx[k] > steps)
            idx[k++] = 0;
        if (k == X.dim)
            break;
    }
    return pts;
}

void finish(Report& r, bool confirmed, const std::string& claim)
{
    r.result["claim"] = claim;
    r.result["confirmed"] = confirmed;
    r.status = confirmed ? "confirmed" : "claim_failed";
}

Report demo_sec3()
{
    Report r;
    const auto ex = constructions::incompleteness_example();
    auto [lo, hi] = network::exact_bounds(ex.net, ex.input);
    auto p1 = relax::bound(ex.net, ex.input, RelaxationSpec::layerwise_optimal());
    r.spec = p1.spec.name();
    r.lower = to_json(p1.lower);
    r.upper = to_json(p1.upper);
    r.result["table"] = json::array({row("exact", interval(lo, hi), interval(Vec{1}, hi)),
                                     row("p1", interval(p1), {{"lower", "<= 0"}})});
    finish(r, lo[0] == 1 && sgn(p1.lower[0]) <= 0, "layerwise-optimal lower bound <= 0 < 1 = exact minimum");
    return r;
}

Report demo_zero()
{
    Report r;
    const auto net = constructions::zero_network();
    const auto X = HPolytope::box(Vec{-1}, Vec{1});
    auto [lo, hi] = network::exact_bounds(net, X);
    auto tri = relax::bound(net, X, RelaxationSpec::triangle());
    auto mk = relax::bound(net, X, RelaxationSpec::multi_neuron(2));
    r.spec = mk.spec.name();
    r.lower = to_json(mk.lower);
    r.upper = to_json(mk.upper);
    r.result["table"] = json::array({row("exact", interval(lo, hi), interval(Vec{0}, Vec{0})),
                                     row("triangle", interval(tri), interval(Vec{-1}, Vec{1})),
                                     row("mk:2", interval(mk), interval(Vec{0}, Vec{0}))});
    const bool ok = lo == Vec{0} && hi == Vec{0} && tri.lower == Vec{-1} && tri.upper == Vec{1} &&
                    mk.lower == Vec{0} && mk.upper == Vec{0};
    finish(r, ok, "triangle gives [-1, 1], the two-neuron hull gives [0, 0]");
    return r;
}

Report demo_max(std::size_t d)
{
    Report r;
    const auto net = constructions::max_network(d);
    const auto X = unit_box(d);
    auto [lo, hi] = network::exact_bounds(net, X);
    auto tri = relax::bound(net, X, RelaxationSpec::triangle());
    auto mk = relax::bound(net, X, RelaxationSpec::multi_neuron(1));
    r.spec = mk.spec.name();
    r.lower = to_json(mk.lower);
    r.upper = to_json(mk.upper);
    json tri_expected = d == 2 ? json{{"upper", "3/2"}} : json{{"upper", "> 1"}};
    r.result["table"] = json::array({row("exact", interval(lo, hi), interval(Vec{0}, Vec{1})),
                                     row("triangle", interval(tri), tri_expected),
                                     row("mk:1", interval(mk), interval(Vec{0}, Vec{1}))});
    bool ok = lo == Vec{0} && hi == Vec{1} && mk.lower == lo && mk.upper == hi && tri.upper[0] > 1;
    if (d == 2)
        ok = ok && tri.upper[0] == frac(3, 2);
    finish(r, ok, "triangle upper bound exceeds the maximum 1, the one-neuron hull is exact");
    return r;
}

Report demo_gap(const Rational& T)
{
    Report r;
    const auto X = unit_box(1);
    const auto w = constructions::gap_network(X, T);
    auto [lo, hi] = network::exact_bounds(w.network, X);
    auto p1 = relax::bound(w.network, X, w.spec);
    r.spec = p1.spec.name();
    r.lower = to_json(p1.lower);
    r.upper = to_json(p1.upper);
    r.result["gap"] = to_string(lo[0] - p1.lower[0]);
    r.result["table"] = json::array({row("exact", interval(lo, hi), {{"lower", to_string(T)}}),
                                     row("p1", interval(p1), {{"lower", "<= 0"}})});
    finish(r, lo[0] == T && sgn(p1.lower[0]) <= 0, "layerwise-optimal lower bound trails the minimum by at least T");
    return r;
}

Report demo_pump(const Rational& alpha)
{
    Report r;
    const auto X = unit_box(1);
    const auto w = constructions::gap_network(X, 5);
    auto [f1, f2] = network::split(w.network, w.split_layer);
    const auto pumped = constructions::pump(f1, f2, alpha);
    auto [lo, hi] = network::exact_bounds(pumped.network, X);
    auto windowed = relax::bound(pumped.network, X, RelaxationSpec::cross_layer(pumped.window));
    auto full = relax::bound(w.network, X, RelaxationSpec::cross_layer(w.network.depth()));
    r.spec = windowed.spec.name();
    r.lower = to_json(windowed.lower);
    r.upper = to_json(windowed.upper);
    r.result["depth"] = pumped.depth;
    r.result["window"] = pumped.window;
    r.result["identity_layers"] = pumped.identity_layers;
    r.result["table"] = json::array({row("exact", interval(lo, hi), {{"lower", "5"}}),
                                     row(windowed.spec.name() + " pumped", interval(windowed), {{"lower", "<= 0"}}),
                                     row(full.spec.name() + " unpumped", interval(full), interval(lo, hi))});
    const bool ok = lo[0] == 5 && sgn(windowed.lower[0]) <= 0 && full.lower == lo && full.upper == hi;
    finish(r, ok, "the window relaxation keeps the gap on the pumped network, the full-depth one is exact");
    return r;
}

Report demo_transform()
{
    Report r;
    const auto ex = constructions::incompleteness_example();
    struct Case {
        std::string name;
        network::Network net;
        HPolytope X;
    };
    std::vector<Case> cases{{"incompleteness example", ex.net, ex.input},
                            {"max_network(2)", constructions::max_network(2), unit_box(2)}};
    json table = json::array();
    bool ok = true;
    for (const auto& c : cases) {
        const auto g = constructions::exact_transform(c.net, c.X);
        bool same = true;
        for (const auto& x : sample_points(c.X))
            same = same && network::eval(g, x) == network::eval(c.net, x);
        auto [lo, hi] = network::exact_bounds(c.net, c.X);
        auto before = relax::bound(c.net, c.X, RelaxationSpec::layerwise_optimal());
        auto after = relax::bound(g, c.X, RelaxationSpec::layerwise_optimal());
        table.push_back(row(c.name + " exact", interval(lo, hi)));
        table.push_back(row(c.name + " p1", interval(before)));
        table.push_back(row(c.name + " transformed p1", interval(after), interval(lo, hi)));
        table.push_back(row(c.name + " pointwise equal", same, true));
        ok = ok && same && after.lower == lo && after.upper == hi;
    }
    r.spec = RelaxationSpec::layerwise_optimal().name();
    r.result["table"] = std::move(table);
    finish(r, ok, "the transformed networks agree with the originals and their layerwise-optimal bounds are exact");
    return r;
}

Report demo_ibp_divergence()
{
    Report r;
    const auto net = constructions::diagonal_network();
    const auto X = unit_box(2);
    constexpr std::size_t budget = 10000;
    auto bab = verify::bab(net, X, RelaxationSpec::ibp(), budget);
    auto direct = relax::ibp_bounds(net, Vec{frac(1, 2), 0}, Vec{1, 1});
    r.spec = RelaxationSpec::ibp().name();
    r.lower = to_json(bab.lower);
    r.upper = to_json(bab.upper);
    r.result["bab"] = to_json(bab);
    r.result["table"] = json::array(
        {row("bab(ibp) status", status_name(bab.status), "budget_exhausted"),
         row("bab(ibp) upper", to_json(bab.upper), "> 1"),
         row("ibp on [1/2,1]x[0,1]", interval(direct), {{"upper", "3/2"}})});
    const bool ok =
        bab.status == verify::Status::BudgetExhausted && bab.upper[0] > 1 && direct.upper == Vec{frac(3, 2)};
    finish(r, ok, "interval branch-and-bound never reaches the exact maximum 1");
    return r;
}

std::pair<std::string, std::string> split_name(const std::string& name)
{
    auto colon = name.find(':');
    if (colon == std::string::npos)
        return {name, ""};
    return {name.substr(0, colon), name.substr(colon + 1)};
}

std::size_t parse_count(const std::string& text, const std::string& what)
{
    Rational v = parse_rational(text);
    if (v.get_den() != 1 || sgn(v) < 0 || !v.get_num().fits_ulong_p())
        throw ParseError(what + " must be a nonnegative integer");
    return v.get_num().get_ui();
}

}  // namespace

Report demo(const std::string& name)
{
    auto [head, param] = split_name(name);
    Report r;
    if (head == "sec3" && param.empty())
        r = demo_sec3();
    else if (head == "zero" && param.empty())
        r = demo_zero();
    else if (head == "max" && !param.empty())
        r = demo_max(parse_count(param, "max:d"));
    else if (head == "gap" && !param.empty())
        r = demo_gap(parse_rational(param));
    else if (head == "pump" && !param.empty())
        r = demo_pump(parse_rational(param));
    else if (head == "transform" && param.empty())
        r = demo_transform();
    else if (head == "ibp-divergence" && param.empty())
        r = demo_ibp_divergence();
    else
        throw ParseError("unknown demo '" + name + "'");
    r.command = "demo";
    r.args = {{"name", name}};
    return r;
}

Report complexity_report(std::size_t d_max)
{
    Report r;
    r.command = "complexity";
    r.args = {{"d_max", d_max}};
    json rows = json::array();
    for (const auto& row : verify::complexity_experiment(d_max))
        rows.push_back({{"d", row.d},
                        {"activation_patterns", row.activation_patterns},
                        {"bab_triangle_leaves", row.bab_triangle_leaves},
                        {"partition_count", row.partition_count},
                        {"bab_multi_neuron_leaves", row.bab_multi_neuron_leaves}});
    r.result["rows"] = std::move(rows);
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact convex relaxations and complete verifiers for ReLU networks", "cbar"};
    app.require_subcommand(1);

    std::string network_path, input_text, method = "triangle", verifier = "bab", demo_name, csv_path;
    std::size_t budget = 10000, d_max = 6;

    auto* bound_cmd = app.add_subcommand("bound", "Output bounds under a relaxation");
    bound_cmd->add_option("--network", network_path, "network file")->required();
    bound_cmd->add_option("--input", input_text, "box:lo..hi,... or a polytope file")->required();
    bound_cmd->add_option("--method", method, "ibp | triangle | mk:K | p1 | pr:R");

    auto* exact_cmd = app.add_subcommand("exact", "Exact output bounds by region enumeration");
    exact_cmd->add_option("--network", network_path, "network file")->required();
    exact_cmd->add_option("--input", input_text, "box:lo..hi,... or a polytope file")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Run a complete verifier");
    verify_cmd->add_option("--network", network_path, "network file")->required();
    verify_cmd->add_option("--input", input_text, "box:lo..hi,... or a polytope file")->required();
    verify_cmd->add_option("--verifier", verifier, "bab | partition");
    verify_cmd->add_option("--method", method, "bounding relaxation for bab");
    verify_cmd->add_option("--budget", budget, "subproblem budget");

    auto* demo_cmd = app.add_subcommand("demo", "Run a named construction and check its claim");
    demo_cmd->add_option("name", demo_name, "sec3 | zero | max:d | gap:T | pump:alpha | transform | ibp-divergence")
        ->required();

    auto* complexity_cmd = app.add_subcommand("complexity", "Subproblem counts on the max network");
    complexity_cmd->add_option("--d-max", d_max, "largest input dimension, 2..8");
    complexity_cmd->add_option("--csv", csv_path, "also write the table as CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return BadInput;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        CounterScope counters;
        Report report;
        if (bound_cmd->parsed() || exact_cmd->parsed() || verify_cmd->parsed()) {
            const auto file = load_network(network_path);
            const auto X = parse_input(input_text);
            if (X.dim != file.network.input_dim())
                throw ParseError("input set has dimension " + std::to_string(X.dim) + ", network expects " +
                                 std::to_string(file.network.input_dim()));
            report.args = {{"network", network_path}, {"input", input_text}};
            if (bound_cmd->parsed()) {
                const auto spec = RelaxationSpec::parse(method);
                auto b = relax::bound(file.network, X, spec);
                report.command = "bound";
                report.args["method"] = method;
                report.spec = spec.name();
                report.lower = to_json(b.lower);
                report.upper = to_json(b.upper);
                report.result = to_json(b);
            } else if (exact_cmd->parsed()) {
                auto regions = network::enumerate_regions(file.network, X);
                auto [lo, hi] = network::exact_bounds(regions, file.network.output_dim());
                report.command = "exact";
                report.lower = to_json(lo);
                report.upper = to_json(hi);
                report.result["regions"] = regions.size();
            } else {
                verify::VerifierReport v;
                report.command = "verify";
                report.args["verifier"] = verifier;
                report.args["budget"] = budget;
                if (verifier == "partition") {
                    v = verify::polytope_partition(file.network, X, budget);
                } else if (verifier == "bab") {
                    const auto spec = RelaxationSpec::parse(method);
                    report.args["method"] = method;
                    report.spec = spec.name();
                    v = verify::bab(file.network, X, spec, budget);
                } else {
                    throw ParseError("unknown verifier '" + verifier + "'");
                }
                report.status = status_name(v.status);
                report.lower = to_json(v.lower);
                report.upper = to_json(v.upper);
                report.result = to_json(v);
            }
        } else if (demo_cmd->parsed()) {
            report = demo(demo_name);
        } else {
            report = complexity_report(d_max);
            if (!csv_path.empty()) {
                std::vector<verify::ComplexityRow> rows;
                for (const auto& r : report.result["rows"])
                    rows.push_back({r["d"], r["activation_patterns"], r["bab_triangle_leaves"],
                                    r["partition_count"], r["bab_multi_neuron_leaves"]});
                std::ofstream csv(csv_path);
                if (!csv)
                    throw ParseError("cannot write " + csv_path);
                csv << complexity_csv(rows);
                report.result["csv"] = csv_path;
            }
        }
        report.counters = counters.delta();
        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out << report.to_json().dump(2) << '\n';
        if (report.status == "claim_failed") {
            err << "claim not confirmed: " << report.result["claim"].get<std::string>() << '\n';
            return ClaimFailed;
        }
        return Ok;
    } catch (const CapExceeded& e) {
        err << "cap exceeded: " << e.what() << '\n';
        return CapHit;
    } catch (const json::exception& e) {
        err << "malformed document: " << e.what() << '\n';
        return BadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return BadInput;
    }
}

}  // namespace cbar::cli
