#include "cbar/cli.hpp"

#include <fstream>
#include <sstream>

namespace cbar::cli {

using geometry::HPolytope;

namespace {

Rational rational_of(const json& v, const std::string& where)
{
    if (v.is_string())
        return parse_rational(v.get<std::string>());
    if (v.is_number_integer())
        return Rational(v.get<long>());
    throw ParseError(where + ": expected a rational string");
}

Vec vec_of(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ParseError(where + ": expected an array");
    Vec out;
    for (const auto& e : v)
        out.push_back(rational_of(e, where));
    return out;
}

Mat mat_of(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ParseError(where + ": expected an array of rows");
    Mat out;
    for (const auto& row : v)
        out.push_back(vec_of(row, where));
    return out;
}

json mat_json(const Mat& m)
{
    json out = json::array();
    for (const auto& row : m)
        out.push_back(to_json(row));
    return out;
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void check_version(const json& doc, const std::string& what)
{
    if (!doc.is_object())
        throw ParseError(what + ": expected an object");
    if (doc.contains("version") && doc["version"] != 1)
        throw ParseError(what + ": unsupported version");
}

std::pair<Rational, Rational> parse_range(const std::string& text)
{
    auto dots = text.find("..");
    if (dots == std::string::npos)
        throw ParseError("box range '" + text + "' is not lo..hi");
    Rational lo = parse_rational(text.substr(0, dots));
    Rational hi = parse_rational(text.substr(dots + 2));
    if (lo > hi)
        throw ParseError("box range '" + text + "' has lo > hi");
    return {lo, hi};
}

}  // namespace

json to_json(const Vec& v)
{
    json out = json::array();
    for (const auto& x : v)
        out.push_back(to_string(x));
    return out;
}

NetworkFile network_from_json(const json& doc)
{
    check_version(doc, "network");
    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw ParseError("network: missing layer list");
    if (!doc.contains("input_dim") && doc["layers"].empty())
        throw ParseError("network: empty layer list needs input_dim");
    std::vector<network::Layer> layers;
    std::size_t width = doc.contains("input_dim") ? doc["input_dim"].get<std::size_t>() : 0;
    bool width_known = doc.contains("input_dim");
    std::size_t input_dim = width;
    for (const auto& l : doc["layers"]) {
        if (l.contains("affine")) {
            const auto& a = l["affine"];
            network::AffineLayer layer{mat_of(a.at("A"), "affine A"), vec_of(a.at("b"), "affine b")};
            if (layer.A.empty() || layer.A.size() != layer.b.size())
                throw ParseError("network: affine layer with inconsistent shape");
            for (const auto& row : layer.A)
                if (row.size() != layer.A.front().size())
                    throw ParseError("network: ragged affine matrix");
            if (!width_known) {
                input_dim = width = layer.in_dim();
                width_known = true;
            }
            if (layer.in_dim() != width)
                throw ParseError("network: affine layer does not match the previous width");
            width = layer.out_dim();
            layers.emplace_back(std::move(layer));
        } else if (l.contains("relu")) {
            std::size_t w = l["relu"].at("width").get<std::size_t>();
            if (!width_known)
                throw ParseError("network: leading relu layer needs input_dim");
            if (w != width)
                throw ParseError("network: relu width does not match the previous layer");
            layers.emplace_back(network::ReluLayer{w});
        } else {
            throw ParseError("network: layer is neither affine nor relu");
        }
    }
    NetworkFile out;
    try {
        out.network = network::Network(input_dim, std::move(layers));
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("network: ") + e.what());
    }
    if (doc.contains("metadata"))
        out.metadata = doc["metadata"];
    return out;
}

json network_to_json(const NetworkFile& file)
{
    json doc;
    doc["version"] = 1;
    const auto& net = file.network;
    if (net.depth() == 0 || net.is_relu(0))
        doc["input_dim"] = net.input_dim();
    json layers = json::array();
    for (const auto& l : net.layers()) {
        if (auto* a = std::get_if<network::AffineLayer>(&l))
            layers.push_back({{"affine", {{"A", mat_json(a->A)}, {"b", to_json(a->b)}}}});
        else
            layers.push_back({{"relu", {{"width", std::get<network::ReluLayer>(l).width}}}});
    }
    doc["layers"] = std::move(layers);
    doc["metadata"] = file.metadata;
    return doc;
}

NetworkFile load_network(const std::string& path)
{
    return network_from_json(read_json(path));
}

void save_network(const NetworkFile& file, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << network_to_json(file).dump(2) << '\n';
}

HPolytope polytope_from_json(const json& doc)
{
    check_version(doc, "polytope");
    if (!doc.contains("dim"))
        throw ParseError("polytope: missing dim");
    HPolytope p(doc["dim"].get<std::size_t>());
    Mat A = doc.contains("A") ? mat_of(doc["A"], "polytope A") : Mat{};
    Vec b = doc.contains("b") ? vec_of(doc["b"], "polytope b") : Vec{};
    Mat Aeq = doc.contains("Aeq") ? mat_of(doc["Aeq"], "polytope Aeq") : Mat{};
    Vec beq = doc.contains("beq") ? vec_of(doc["beq"], "polytope beq") : Vec{};
    if (A.size() != b.size() || Aeq.size() != beq.size())
        throw ParseError("polytope: row and right-hand side counts differ");
    try {
        for (std::size_t i = 0; i < A.size(); ++i)
            p.add_inequality(A[i], b[i]);
        for (std::size_t i = 0; i < Aeq.size(); ++i)
            p.add_equality(Aeq[i], beq[i]);
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("polytope: ") + e.what());
    }
    return p;
}

json polytope_to_json(const HPolytope& p)
{
    return {{"version", 1}, {"dim", p.dim}, {"A", mat_json(p.A)}, {"b", to_json(p.b)}};
}

HPolytope parse_input(const std::string& text)
{
    const std::string prefix = "box:";
    if (text.rfind(prefix, 0) != 0)
        return polytope_from_json(read_json(text));
    Vec lo, hi;
    std::stringstream ranges(text.substr(prefix.size()));
    std::string range;
    while (std::getline(ranges, range, ',')) {
        auto [l, h] = parse_range(range);
        lo.push_back(l);
        hi.push_back(h);
    }
    if (lo.empty())
        throw ParseError("box input has no ranges");
    return HPolytope::box(lo, hi);
}

}  // namespace cbar::cli
