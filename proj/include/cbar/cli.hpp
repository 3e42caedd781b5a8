#pragma once

#include "cbar/geometry.hpp"
#include "cbar/network.hpp"
#include "cbar/relaxations.hpp"
#include "cbar/verifiers.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cbar::cli {

using json = nlohmann::ordered_json;

enum ExitCode { Ok = 0, BadInput = 2, CapHit = 3, ClaimFailed = 4 };

/// {"version": 1, "layers": [{"affine": {"A": [["1", "-1"]], "b": ["0"]}},
/// {"relu": {"width": 1}}], "metadata": {...}}. Rationals are "p/q" strings.
struct NetworkFile {
    network::Network network;
    json metadata = json::object();
};

NetworkFile network_from_json(const json& doc);
json network_to_json(const NetworkFile& file);
NetworkFile load_network(const std::string& path);
void save_network(const NetworkFile& file, const std::string& path);

/// {"version": 1, "dim": n, "A": [[...]], "b": [...]} for {x : A x <= b};
/// "Aeq"/"beq" add equalities.
geometry::HPolytope polytope_from_json(const json& doc);
json polytope_to_json(const geometry::HPolytope& p);

/// "box:lo..hi,lo..hi" or the path of a polytope document.
geometry::HPolytope parse_input(const std::string& text);

json to_json(const Vec& v);
json to_json(const relax::BoundReport& r);
json to_json(const verify::VerifierReport& r);
std::string status_name(verify::Status s);

/// Common report envelope: the comparison payload is deterministic, the wall
/// time sits in its own field.
struct Report {
    std::string command;
    json args = json::object();
    json spec;
    json lower;
    json upper;
    json counters = json::object();
    std::string status = "ok";
    json result = json::object();
    double wall_seconds = 0;

    json to_json() const;
};

/// Runs one invocation; writes a single JSON document to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The demos behind `cbar demo NAME`; `confirmed` in the result is the claim check.
Report demo(const std::string& name);
Report complexity_report(std::size_t d_max);
std::string complexity_csv(const std::vector<verify::ComplexityRow>& rows);

}  // namespace cbar::cli
