#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "files.hpp"
#include "fuzz.hpp"
#include "medbuild/program.hpp"
#include "oracles.hpp"

using namespace medbuild;

namespace {

dql::DqlRecord rec(const std::string& text) { return dql::parse_dql(text); }

FunctionalProgram program_of(const std::string& text) { return generate_program(rec(text), default_config()); }

SurgicalParams surgical(double hours, double days, double util) {
    SurgicalParams p;
    p.daily_op_hours = hours;
    p.annual_op_days = days;
    p.or_utilization = util;
    return p;
}

}  // namespace

TEST_CASE("project_population") {
    CHECK(project_population(50000, 0, 15) == 50000);
    CHECK(project_population(50000, 2, 15) == doctest::Approx(67293.4).epsilon(0.1 / 67293.4));
    CHECK(project_population(1, 100, 3) == doctest::Approx(8.0));
    CHECK_THROWS_AS(project_population(100, -100, 5), DomainError);
    fuzz::Rng rng(5);
    std::uniform_real_distribution<double> pop(1, 1e7), g(-10, 15);
    std::uniform_int_distribution<int> years(0, 30);
    for (int i = 0; i < 500; ++i) {
        const double p = pop(rng), gr = g(rng);
        const double y = years(rng);
        const double want = oracle::projected_population(p, gr, y);
        CHECK(std::fabs(project_population(p, gr, y) - want) <= 1e-9 * want);
    }
}

TEST_CASE("required_operating_rooms") {
    const auto sp = surgical(8, 250, 0.75);
    CHECK(required_operating_rooms({{60, 40, 2}}, 0, sp) == 4);
    CHECK(required_operating_rooms({{60, 40, 2}}, 1, sp) == 3);
    CHECK(required_operating_rooms({}, 2, sp) == 0);
    CHECK(required_operating_rooms({{75, 40, 1}}, 0, sp) == 2);  // exactly two rooms of demand
    CHECK_THROWS_AS(required_operating_rooms({{1, 1, 1}}, 0, surgical(0, 250, 0.75)), DomainError);
}

TEST_CASE("bed need") {
    PlanningConfig cfg = default_config();
    cfg.planning_years = 0;
    cfg.additional_demand.clear();
    for (auto& [level, rate] : cfg.bed_rate_per_1000) rate = 2.0;

    const auto merged = merge_defaults(rec("P:pop=10000|E:total_beds=30,quality_factor=1|X:budget=1.") , cfg);
    const BedNeedBreakdown clamp = compute_bed_need(merged, cfg, HospitalLevel::Primary);
    CHECK(clamp.theoretical_total == doctest::Approx(20));
    CHECK(clamp.net_base == 0);
    CHECK(clamp.target_total == 0);

    const BedNeedBreakdown b = compute_bed_need(merge_defaults(rec("P:pop=10000|E:total_beds=10,quality_factor=0.5|X:budget=1."), cfg), cfg,
                                                HospitalLevel::Primary);
    CHECK(b.theoretical_total == doctest::Approx(20));
    CHECK(b.effective_existing == doctest::Approx(5));
    CHECK(b.net_base == doctest::Approx(15));
    CHECK(b.target_total == 15);
}

TEST_CASE("apportion") {
    CHECK(apportion(10, {0.5, 0.3, 0.2}) == std::vector<long long>{5, 3, 2});
    CHECK(apportion(0, {0.5, 0.5}) == std::vector<long long>{0, 0});
    fuzz::Rng rng(9);
    std::uniform_real_distribution<double> share(0.01, 1.0);
    std::uniform_int_distribution<int> total(0, 3000), count(1, 9);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> shares(static_cast<std::size_t>(count(rng)));
        for (double& s : shares) s = share(rng);
        const long long t = total(rng);
        CHECK(apportion(t, shares) == oracle::largest_remainder(t, shares));
    }
}

TEST_CASE("estimate_cost") {
    PlanningConfig cfg = default_config();
    cfg.cost.base_rate = 500;
    cfg.cost.gross_up = 1.0;
    cfg.cost.material_multipliers = {{"default", 1.0}, {"Q", 0.8}};
    cfg.cost.labor_bands = {{std::nullopt, 1.0}};
    const dql::DqlRecord r = rec("P:pop=10|X:gdp=1000,budget=1.");
    CHECK(estimate_cost({}, r, cfg) == 0);
    const std::vector<RoomSpec> rooms{{"Exam", "OPD", 10, 20.0, 20.0, "routine", 0}};
    CHECK(estimate_cost(rooms, r, cfg) == doctest::Approx(100000));
    cfg.cost.labor_bands = {{std::nullopt, 1.1}};
    CHECK(estimate_cost(rooms, rec("P:pop=10|X:gdp=1000,budget=1|G:mat=Q."), cfg) == doctest::Approx(88000));
}

TEST_CASE("calibration case levels") {
    const FunctionalProgram c1 = program_of(fixture("case1.dql"));
    CHECK(c1.level == HospitalLevel::Secondary);
    CHECK(c1.cost.feasible);
    CHECK(c1.trim_log.empty());
    const FunctionalProgram c4 = program_of(fixture("case4.dql"));
    CHECK(c4.level == HospitalLevel::Primary);
    CHECK(c4.flags.count("plus") == 1);
    CHECK(c4.level_label() == "Primary+");
    CHECK(c4.cost.estimated <= 0.8e6);

    const FunctionalProgram tiny = program_of("P:pop=1,growth_rate=0|X:budget=100000.");
    CHECK(tiny.level == HospitalLevel::Clinic);
    CHECK(tiny.beds.target_total == 1);  // ceiling of a tiny positive need
    CHECK(tiny.cost.feasible);
    for (const RoomSpec& r : tiny.rooms) CHECK(r.name.find("Ward") == std::string::npos);
}

TEST_CASE("budget trimming") {
    const dql::DqlRecord r = rec(fixture("case1.dql"));
    const dql::DqlRecord merged = merge_defaults(r, default_config());
    const FunctionalProgram full = generate_program(r, default_config());

    SUBCASE("within budget is a no-op") {
        const FunctionalProgram same = optimize_to_budget(full, full.cost.estimated, merged, default_config());
        CHECK(same.rooms == full.rooms);
        CHECK(same.trim_log.empty());
        CHECK(same.cost.estimated == full.cost.estimated);
    }
    SUBCASE("20% over budget") {
        const double budget = full.cost.estimated / 1.2;
        const FunctionalProgram t = optimize_to_budget(full, budget, merged, default_config());
        CHECK(t.cost.feasible);
        CHECK(t.cost.estimated <= budget);
        REQUIRE_FALSE(t.trim_log.empty());
        std::vector<RoomSpec> rooms = full.rooms;
        double cost = full.cost.estimated;
        for (const TrimAction& a : t.trim_log) {
            apply_trim(rooms, a);
            const double next = estimate_cost(rooms, merged, default_config());
            CHECK(next < cost);
            CHECK(a.saved == doctest::Approx(cost - next));
            cost = next;
        }
        CHECK(rooms == t.rooms);
        for (const TrimAction& a : t.trim_log) {
            const auto it = std::find_if(full.rooms.begin(), full.rooms.end(),
                                         [&](const RoomSpec& s) { return s.department + "/" + s.name == a.target; });
            REQUIRE(it != full.rooms.end());
            CHECK_FALSE(default_config().is_protected(it->priority));
        }
    }
    SUBCASE("only protected rooms") {
        FunctionalProgram p = full;
        std::erase_if(p.rooms, [](const RoomSpec& s) { return !default_config().is_protected(s.priority); });
        REQUIRE_FALSE(p.rooms.empty());
        const FunctionalProgram t = optimize_to_budget(p, 1.0, merged, default_config());
        CHECK_FALSE(t.cost.feasible);
        CHECK(t.rooms == p.rooms);
        CHECK(t.trim_log.empty());
    }
}

TEST_CASE("monotonicity") {
    long long last_beds = -1;
    int last_level = -1;
    for (double pop = 1000; pop <= 4e6; pop *= 1.6) {
        const FunctionalProgram p = program_of("P:pop=" + dql::format_number(std::round(pop)) + ",growth_rate=1|X:budget=100000.");
        CHECK(p.beds.target_total >= last_beds);
        CHECK(static_cast<int>(p.level) >= last_level);
        last_beds = p.beds.target_total;
        last_level = static_cast<int>(p.level);
    }
    const PlanningConfig& cfg = default_config();
    double last_net = 1e300;
    for (int beds = 0; beds <= 400; beds += 25) {
        const auto merged = merge_defaults(rec("P:pop=80000|E:total_beds=" + std::to_string(beds) + ",quality_factor=0.8|X:budget=50."), cfg);
        const BedNeedBreakdown b = compute_bed_need(merged, cfg, HospitalLevel::Secondary);
        CHECK(b.net_base <= last_net);
        CHECK(b.net_base >= 0);
        last_net = b.net_base;
    }
}

TEST_CASE("generate_program is deterministic") {
    fuzz::Rng rng(77);
    for (int i = 0; i < 20; ++i) {
        const dql::DqlRecord r = fuzz::random_planning_record(rng);
        CHECK(generate_program(r, default_config()) == generate_program(r, default_config()));
    }
}
