#pragma once

// Functional programming: DQL record -> costed, budget-compliant room program.

#include <set>
#include <string>
#include <vector>

#include "medbuild/dql.hpp"
#include "medbuild/planning_config.hpp"

namespace medbuild {

struct BedAddition {
    std::string reason;
    double beds = 0.0;
    bool operator==(const BedAddition&) const = default;
};

struct BedNeedBreakdown {
    double projected_population = 0.0;
    double theoretical_total = 0.0;
    double effective_existing = 0.0;
    double net_base = 0.0;
    std::vector<BedAddition> additions;
    long long target_total = 0;

    bool operator==(const BedNeedBreakdown&) const = default;
};

struct RoomSpec {
    std::string name;
    std::string department;
    long long quantity = 0;
    double unit_area = 0.0;      // m²
    double template_area = 0.0;  // m², the area before any trim
    std::string priority;
    int min_quantity = 0;

    double total_area() const { return static_cast<double>(quantity) * unit_area; }
    bool operator==(const RoomSpec&) const = default;
};

struct DepartmentSpec {
    std::string name;
    long long beds = 0;
    std::vector<std::string> rooms;  // room names, catalog order

    bool operator==(const DepartmentSpec&) const = default;
};

struct CostEstimate {
    double estimated = 0.0;  // USD
    double budget = 0.0;     // USD
    bool feasible = true;

    bool operator==(const CostEstimate&) const = default;
};

enum class TrimKind { Quantity, Area };

struct TrimAction {
    std::string target;      // "department/room"
    TrimKind kind = TrimKind::Quantity;
    double before = 0.0;     // quantity or unit area
    double after = 0.0;
    double saved = 0.0;      // USD

    bool operator==(const TrimAction&) const = default;
};

struct FunctionalProgram {
    HospitalLevel level = HospitalLevel::Clinic;
    std::set<std::string> flags;  // level extensions, e.g. "plus"
    double score = 0.0;
    BedNeedBreakdown beds;
    long long operating_rooms = 0;
    std::vector<DepartmentSpec> departments;
    std::vector<RoomSpec> rooms;
    CostEstimate cost;
    std::vector<TrimAction> trim_log;

    long long room_count() const;
    double total_area() const;  // net m², Σ quantity·unit_area
    /// "Primary+" style label including extension flags.
    std::string level_label() const;

    bool operator==(const FunctionalProgram&) const = default;
};

struct LevelScore {
    double score = 0.0;
    HospitalLevel level = HospitalLevel::Clinic;
};

/// pop·(1 + growth/100)^years. DomainError if growth_rate <= -100.
double project_population(double pop, double growth_rate, double years);

/// H complexity: Σ incidence·resource_factor over the disease list.
double health_complexity(const dql::DqlRecord& record);

LevelScore score_hospital_level(const dql::DqlRecord& merged, const PlanningConfig& config);

BedNeedBreakdown compute_bed_need(const dql::DqlRecord& merged, const PlanningConfig& config, HospitalLevel level);

struct SpecialtyLoad {
    double beds = 0.0;
    double surgery_rate = 0.0;
    double avg_duration = 0.0;
};

long long required_operating_rooms(const std::vector<SpecialtyLoad>& specialties, double existing_ors,
                                   const SurgicalParams& params);

/// Hamilton (largest remainder) apportionment of `total` over `shares`;
/// ties go to the larger share, then the earlier index.
std::vector<long long> apportion(long long total, const std::vector<double>& shares);

struct CompiledDepartments {
    std::vector<DepartmentSpec> departments;
    std::vector<RoomSpec> rooms;
    long long operating_rooms = 0;
};

CompiledDepartments compile_departments(HospitalLevel level, const std::set<std::string>& flags,
                                        const dql::DqlRecord& merged, const BedNeedBreakdown& beds,
                                        const PlanningConfig& config);

/// Level extension flags (e.g. "plus") whose conditions hold.
std::set<std::string> extension_flags(HospitalLevel level, const dql::DqlRecord& merged, const PlanningConfig& config);

/// Σ(quantity·unit_area)·base·material·labor·gross_up, summed in room order.
double estimate_cost(const std::vector<RoomSpec>& rooms, const dql::DqlRecord& merged, const PlanningConfig& config);

/// Trims the program until its cost fits `budget` (USD) or nothing trimmable remains.
FunctionalProgram optimize_to_budget(FunctionalProgram program, double budget, const dql::DqlRecord& merged,
                                     const PlanningConfig& config);

/// Replays one ledger entry against a room list. Throws std::logic_error when
/// the entry does not match the list.
void apply_trim(std::vector<RoomSpec>& rooms, const TrimAction& action);

/// Full chain: merge defaults, project, score, beds, departments, cost, budget.
FunctionalProgram generate_program(const dql::DqlRecord& record, const PlanningConfig& config);

}  // namespace medbuild
