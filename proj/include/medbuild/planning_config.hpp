#pragma once

// Planning configuration: every coefficient used by the program engine.
//
// Weights, thresholds, bed rates, surgical parameters, the department catalog,
// the cost table and the trim policy are data. The shipped default lives in
// config/default_config.json and is compiled into the library.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medbuild/dql.hpp"

namespace medbuild {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class HospitalLevel { Clinic = 0, Primary = 1, Secondary = 2, Tertiary = 3 };

std::string_view to_string(HospitalLevel level);
std::optional<HospitalLevel> level_from_string(std::string_view name);

/// Piecewise-linear ramp through (x, y) breakpoints, clamped at both ends.
struct Ramp {
    std::vector<std::pair<double, double>> points;

    double operator()(double x) const;
    bool operator==(const Ramp&) const = default;
};

/// `field op threshold`, e.g. `M.health < 85`.
struct Condition {
    std::string field;
    std::string op;  // one of < <= > >= == !=
    double threshold = 0.0;

    bool operator==(const Condition&) const = default;
};

struct Modifier {
    std::string id;
    std::string field;
    std::optional<Ramp> ramp;  // raw field value when absent

    bool operator==(const Modifier&) const = default;
};

struct LevelModel {
    Ramp population;  // f(P_projected)
    Ramp health;      // f(H_complexity)
    double w_p = 0.0;
    double w_h = 0.0;
    std::vector<Modifier> modifiers;
    std::map<std::string, double> modifier_weights;
    /// Minimum score of each level above Clinic, strictly increasing.
    std::vector<std::pair<HospitalLevel, double>> thresholds;

    bool operator==(const LevelModel&) const = default;
};

struct DemandRule {
    std::string reason;
    std::vector<Condition> when;  // all must hold
    std::string mode;             // fraction_of_base | absolute | per_1000_projected
    double value = 0.0;

    bool operator==(const DemandRule&) const = default;
};

struct LevelExtension {
    HospitalLevel level = HospitalLevel::Primary;
    std::string flag;
    std::vector<Condition> any_of;

    bool operator==(const LevelExtension&) const = default;
};

struct SurgicalSpecialty {
    double surgery_rate = 0.0;  // operations per bed per year
    double avg_duration = 0.0;  // hours

    bool operator==(const SurgicalSpecialty&) const = default;
};

struct SurgicalParams {
    double daily_op_hours = 8.0;
    double annual_op_days = 250.0;
    double or_utilization = 0.75;
    std::map<std::string, SurgicalSpecialty> specialties;  // keyed by department

    bool operator==(const SurgicalParams&) const = default;
};

struct MaternityParams {
    double births_per_capita_per_fertility = 0.012;
    double births_per_delivery_room = 500.0;

    bool operator==(const MaternityParams&) const = default;
};

enum class CountSource { Formula, Ward, OperatingRooms, DeliveryRooms };

/// count = clamp(ceil(fixed + per_department_bed*dept_beds + per_total_bed*beds
///                    + per_kpop*projected/1000), min, max)
/// or a derived quantity when `source` is not Formula.
struct CountRule {
    CountSource source = CountSource::Formula;
    double fixed = 0.0;
    double per_department_bed = 0.0;
    double per_total_bed = 0.0;
    double per_kpop = 0.0;
    double beds_per_room = 1.0;  // Ward
    int min = 0;
    std::optional<int> max;

    bool operator==(const CountRule&) const = default;
};

struct RoomTemplate {
    std::string name;
    double area = 0.0;  // m² per room before the space standard multiplier
    std::string priority;
    CountRule count;
    int min_quantity = 0;  // trim floor
    std::optional<std::string> requires_flag;

    bool operator==(const RoomTemplate&) const = default;
};

struct DepartmentTemplate {
    std::string name;
    double bed_share = 0.0;
    std::optional<std::string> requires_flag;
    std::vector<RoomTemplate> rooms;

    bool operator==(const DepartmentTemplate&) const = default;
};

struct GdpBand {
    std::optional<double> upto_gdp;  // open-ended when absent
    double multiplier = 1.0;

    bool operator==(const GdpBand&) const = default;
};

struct CostTable {
    double base_rate = 0.0;  // USD per m²
    double gross_up = 1.0;   // circulation/services factor on net area
    std::map<std::string, double> material_multipliers;  // keyed by G.mat; "default" fallback
    std::vector<GdpBand> labor_bands;

    bool operator==(const CostTable&) const = default;
};

struct TrimPolicy {
    int quantity_step = 1;
    double area_step_fraction = 0.05;
    double area_floor_fraction = 0.8;

    bool operator==(const TrimPolicy&) const = default;
};

/// Building parameters for floor planning and massing.
struct MassingParams {
    double room_depth = 5000.0;     // mm
    double corridor_width = 2400.0; // mm
    double floor_height = 4000.0;   // mm
    double module_area = 25.0;      // m²
    int floors_podium = 3;
    int floors_tower_mid = 6;
    int floors_tower_high = 12;
    double overprovision = 1.3;
    std::int64_t grid_scale = 100;  // grid units per mm

    /// Cell width along an axis: module_area / room_depth, in mm.
    double module_width() const { return module_area * 1e6 / room_depth; }
    bool operator==(const MassingParams&) const = default;
};

/// Scheme generation and validation parameters.
struct LayoutParams {
    double snap_tolerance = 500.0;       // mm
    double min_axis_length = 5000.0;     // mm
    double tower_spacing = 30000.0;      // mm, between parallel tower_high axes
    double boundary_sample_step = 250.0; // mm
    double distinct_orientation_deg = 30.0;
    double capacity_margin = 1.0;        // on top of the massing overprovision
    double wing_gap = 12000.0;           // mm, clear distance between parallel wings
    double main_street_min_aspect = 1.4;
    double courtyard_min_site_area = 6000.0;   // m²
    double dispersed_min_site_area = 20000.0;  // m²
    double dispersed_max_coverage = 0.35;      // podium footprint / site area
    double organic_min_irregularity = 0.2;     // 1 - area / convex hull area
    int inscribed_raster = 96;

    bool operator==(const LayoutParams&) const = default;
};

struct PlanningConfig {
    int schema_version = 1;
    double planning_years = 15.0;
    std::string defaults_profile;  // DQL text merged under every record
    LevelModel level_model;
    std::map<HospitalLevel, double> bed_rate_per_1000;
    std::vector<DemandRule> additional_demand;
    std::vector<LevelExtension> extensions;
    SurgicalParams surgical;
    MaternityParams maternity;
    std::map<HospitalLevel, std::vector<DepartmentTemplate>> catalog;
    std::vector<GdpBand> space_standard;
    CostTable cost;
    std::vector<std::string> priority_hierarchy;  // highest priority first
    std::vector<std::string> protected_priorities;
    TrimPolicy trim;
    std::map<std::string, std::map<std::string, double>> code_registry;
    MassingParams massing;
    LayoutParams layout;

    bool operator==(const PlanningConfig&) const = default;

    /// Rank of a priority class; 0 is the most critical.
    int priority_rank(const std::string& priority) const;
    bool is_protected(const std::string& priority) const;
};

/// Parses and checks a configuration document. Throws ConfigError.
PlanningConfig load_config_json(std::string_view json_text);
PlanningConfig load_config_file(const std::string& path);

/// The compiled-in default configuration text and its parsed form.
std::string_view default_config_text();
const PlanningConfig& default_config();

/// Checks structural invariants. Throws ConfigError on the first failure.
void check_config(const PlanningConfig& config);

/// Canonical JSON text of a configuration (stable key order).
std::string config_to_json(const PlanningConfig& config);

/// Hex SHA-256 of the canonical JSON text.
std::string config_hash(const PlanningConfig& config);

/// Fills absent dimensions and fields from the configuration's defaults profile.
dql::DqlRecord merge_defaults(const dql::DqlRecord& record, const PlanningConfig& config);

/// Numeric value of a field path such as "M.health", "H.complexity",
/// "S.conflict" (categorical codes go through the code registry).
/// Returns nullopt when the field is absent. Throws ConfigError for unknown
/// paths or unregistered codes.
std::optional<double> resolve_field(const dql::DqlRecord& record, const PlanningConfig& config,
                                    std::string_view path);

bool evaluate(const Condition& condition, const dql::DqlRecord& record, const PlanningConfig& config);

}  // namespace medbuild
