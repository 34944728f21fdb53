#pragma once

// Axis-based layout schemes: validation, the endpoint graph, the seeded
// typology generator and the scheme wire format.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medbuild/axis.hpp"
#include "medbuild/planning_config.hpp"
#include "medbuild/program.hpp"

namespace medbuild::layout {

class SiteTooSmall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what) : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct SitePolygon {
    std::vector<MmPoint> vertices;  // implicitly closed

    bool operator==(const SitePolygon&) const = default;
};

/// Throws InvalidSite unless the polygon is simple with nonzero area.
void check_site(const SitePolygon& site);
double site_area_m2(const SitePolygon& site);

enum class Typology { MainStreet, Courtyard, PodiumTower, Organic, Dispersed };
std::string_view to_string(Typology t);

enum class BuildingMode { Shared, Independent };
std::string_view to_string(BuildingMode m);

struct AxisScheme {
    std::string id;  // "S1" | "S2"
    BuildingMode building_mode = BuildingMode::Shared;
    std::vector<Axis> axes;
    std::optional<Typology> typology;  // annotation; not part of the wire format

    bool operator==(const AxisScheme&) const = default;
};

struct SchemePair {
    AxisScheme s1;
    AxisScheme s2;

    bool operator==(const SchemePair&) const = default;
};

struct SchemeViolation {
    std::string rule;  // boundary | cycle | degenerate | tower_spacing
    std::vector<std::size_t> axes;
    std::string message;

    bool operator==(const SchemeViolation&) const = default;
};

std::vector<SchemeViolation> validate_scheme(const AxisScheme& scheme, const SitePolygon& site, const LayoutParams& params);

struct AxisGraph {
    std::vector<MmPoint> nodes;                       // first-appearance representative
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // one per axis, same order
    std::size_t components = 0;

    std::vector<std::size_t> degrees() const;
};

/// Endpoints within `snap_tolerance` (Euclidean, transitive) share a node.
AxisGraph axis_graph(const std::vector<Axis>& axes, double snap_tolerance);

/// Axis indices of every independent cycle in the graph, one list per cycle.
std::vector<std::vector<std::size_t>> find_cycles(const AxisGraph& graph);

BuildingMode building_mode_of(const std::vector<Axis>& axes, double snap_tolerance);

/// Length-weighted dominant direction in degrees, in [0, 180).
double dominant_orientation(const std::vector<Axis>& axes);

bool schemes_distinct(const AxisScheme& a, const AxisScheme& b, const LayoutParams& params);

/// Room modules the program needs: Σ quantity·ceil(unit_area / module_area).
long long required_modules(const FunctionalProgram& program, const MassingParams& params);

/// Deterministic scheme pair for (program, site, seed). Both schemes pass
/// validate_scheme and are mutually distinct. Throws SiteTooSmall.
SchemePair generate_schemes(const FunctionalProgram& program, const SitePolygon& site, std::uint64_t seed,
                            const PlanningConfig& config);

// Wire format.
SchemePair parse_scheme_json(std::string_view text);
std::string serialize_scheme_json(const SchemePair& pair);

SitePolygon parse_site_json(std::string_view text);
std::string serialize_site_json(const SitePolygon& site);

/// Text-in / JSON-out client for an out-of-process planner.
class PlannerClient {
public:
    virtual ~PlannerClient() = default;
    virtual std::string complete(const std::string& prompt_payload) = 0;
};

/// Returns a fixed response; used offline and in tests.
class StubPlannerClient : public PlannerClient {
public:
    explicit StubPlannerClient(std::string response) : response_(std::move(response)) {}
    std::string complete(const std::string&) override { return response_; }

private:
    std::string response_;
};

class SchemeRejected : public std::runtime_error {
public:
    SchemeRejected(const std::string& what, std::vector<SchemeViolation> violations)
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<SchemeViolation>& violations() const { return violations_; }

private:
    std::vector<SchemeViolation> violations_;
};

/// Prompt payload (JSON) describing the program and site for an external planner.
std::string planner_payload(const FunctionalProgram& program, const SitePolygon& site, const PlanningConfig& config);

/// Asks the client for a scheme pair and validates it. Invalid or
/// indistinct responses throw SchemeRejected; nothing is repaired.
SchemePair plan_with_external(PlannerClient& client, const FunctionalProgram& program, const SitePolygon& site,
                              const PlanningConfig& config);

}  // namespace medbuild::layout
