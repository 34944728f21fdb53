#include "medbuild/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace medbuild {

namespace {

// Absorbs floating noise before a ceiling, e.g. 0.1*30 = 3.0000000000000004.
constexpr double kCeilSlack = 1e-9;

long long ceil_count(double x) { return static_cast<long long>(std::ceil(x - kCeilSlack)); }

double band_multiplier(const std::vector<GdpBand>& bands, double gdp) {
    for (const GdpBand& b : bands) {
        if (!b.upto_gdp || gdp <= *b.upto_gdp) return b.multiplier;
    }
    return bands.back().multiplier;
}

double require_field(const dql::DqlRecord& r, const PlanningConfig& config, const char* path) {
    const auto v = resolve_field(r, config, path);
    if (!v) throw ConfigError(std::string("field ") + path + " is required and has no default");
    return *v;
}

long long clamp_count(long long n, const CountRule& rule) {
    n = std::max<long long>(n, rule.min);
    if (rule.max) n = std::min<long long>(n, *rule.max);
    return std::max<long long>(n, 0);
}

}  // namespace

long long FunctionalProgram::room_count() const {
    long long n = 0;
    for (const RoomSpec& r : rooms) n += r.quantity;
    return n;
}

double FunctionalProgram::total_area() const {
    double a = 0.0;
    for (const RoomSpec& r : rooms) a += r.total_area();
    return a;
}

std::string FunctionalProgram::level_label() const {
    std::string label(to_string(level));
    if (flags.count("plus")) label += "+";
    return label;
}

double project_population(double pop, double growth_rate, double years) {
    if (growth_rate <= -100.0) throw DomainError("growth_rate must exceed -100 %/yr");
    if (!(pop > 0.0)) throw DomainError("population must be positive");
    if (!(years >= 0.0)) throw DomainError("planning horizon must be non-negative");
    return pop * std::pow(1.0 + growth_rate / 100.0, years);
}

double health_complexity(const dql::DqlRecord& record) {
    double total = 0.0;
    if (record.health && record.health->diseases) {
        for (const dql::DiseaseEntry& d : *record.health->diseases) total += d.incidence * d.resource_factor;
    }
    return total;
}

LevelScore score_hospital_level(const dql::DqlRecord& merged, const PlanningConfig& config) {
    const LevelModel& m = config.level_model;
    const double projected = require_field(merged, config, "P.projected");
    double score = m.w_p * m.population(projected) + m.w_h * m.health(health_complexity(merged));
    for (const Modifier& mod : m.modifiers) {
        const auto w = m.modifier_weights.find(mod.id);
        if (w == m.modifier_weights.end()) throw ConfigError("modifier '" + mod.id + "' has no weight");
        const auto raw = resolve_field(merged, config, mod.field);
        if (!raw) continue;
        score += w->second * (mod.ramp ? (*mod.ramp)(*raw) : *raw);
    }
    LevelScore out{score, HospitalLevel::Clinic};
    for (const auto& [level, threshold] : m.thresholds) {
        if (score >= threshold) out.level = level;
    }
    return out;
}

BedNeedBreakdown compute_bed_need(const dql::DqlRecord& merged, const PlanningConfig& config, HospitalLevel level) {
    BedNeedBreakdown b;
    b.projected_population = require_field(merged, config, "P.projected");
    const auto rate = config.bed_rate_per_1000.find(level);
    if (rate == config.bed_rate_per_1000.end()) throw ConfigError("no bed rate for level " + std::string(to_string(level)));
    b.theoretical_total = b.projected_population * rate->second / 1000.0;
    b.effective_existing = resolve_field(merged, config, "E.effective").value_or(0.0);
    b.net_base = std::max(0.0, b.theoretical_total - b.effective_existing);

    double sum = b.net_base;
    for (const DemandRule& rule : config.additional_demand) {
        const bool holds = std::all_of(rule.when.begin(), rule.when.end(),
                                       [&](const Condition& c) { return evaluate(c, merged, config); });
        if (!holds) continue;
        double beds = 0.0;
        if (rule.mode == "fraction_of_base") beds = rule.value * b.net_base;
        else if (rule.mode == "absolute") beds = rule.value;
        else if (rule.mode == "per_1000_projected") beds = rule.value * b.projected_population / 1000.0;
        else throw ConfigError("unknown demand mode '" + rule.mode + "'");
        b.additions.push_back(BedAddition{rule.reason, beds});
        sum += beds;
    }
    b.target_total = std::max<long long>(0, ceil_count(sum));
    return b;
}

long long required_operating_rooms(const std::vector<SpecialtyLoad>& specialties, double existing_ors,
                                   const SurgicalParams& params) {
    const double capacity = params.daily_op_hours * params.annual_op_days * params.or_utilization;
    if (!(params.daily_op_hours > 0.0) || !(params.annual_op_days > 0.0) || !(params.or_utilization > 0.0)) {
        throw DomainError("operating-room capacity inputs must be positive");
    }
    double hours = 0.0;
    for (const SpecialtyLoad& s : specialties) hours += s.beds * s.surgery_rate * s.avg_duration;
    const long long needed = ceil_count(hours / capacity);
    return std::max<long long>(0, needed - static_cast<long long>(std::floor(existing_ors)));
}

std::vector<long long> apportion(long long total, const std::vector<double>& shares) {
    std::vector<long long> out(shares.size(), 0);
    const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (shares.empty() || total <= 0 || !(sum > 0.0)) return out;

    std::vector<double> remainder(shares.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        const double quota = static_cast<double>(total) * shares[i] / sum;
        out[i] = static_cast<long long>(std::floor(quota));
        remainder[i] = quota - static_cast<double>(out[i]);
        assigned += out[i];
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return shares[a] > shares[b];
    });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        ++out[order[k]];
        ++assigned;
    }
    return out;
}

std::set<std::string> extension_flags(HospitalLevel level, const dql::DqlRecord& merged, const PlanningConfig& config) {
    std::set<std::string> flags;
    for (const LevelExtension& e : config.extensions) {
        if (e.level != level) continue;
        if (std::any_of(e.any_of.begin(), e.any_of.end(), [&](const Condition& c) { return evaluate(c, merged, config); })) {
            flags.insert(e.flag);
        }
    }
    return flags;
}

CompiledDepartments compile_departments(HospitalLevel level, const std::set<std::string>& flags,
                                        const dql::DqlRecord& merged, const BedNeedBreakdown& beds,
                                        const PlanningConfig& config) {
    const auto entry = config.catalog.find(level);
    if (entry == config.catalog.end()) throw ConfigError("catalog has no entry for level " + std::string(to_string(level)));

    const auto enabled = [&](const std::optional<std::string>& flag) { return !flag || flags.count(*flag) > 0; };
    std::vector<const DepartmentTemplate*> depts;
    for (const DepartmentTemplate& d : entry->second) {
        if (enabled(d.requires_flag)) depts.push_back(&d);
    }

    std::vector<double> shares;
    for (const DepartmentTemplate* d : depts) shares.push_back(d->bed_share);
    const std::vector<long long> dept_beds = apportion(beds.target_total, shares);

    const double gdp = require_field(merged, config, "X.gdp");
    const double area_multiplier = band_multiplier(config.space_standard, gdp);
    const double projected = beds.projected_population;
    const double total_beds = static_cast<double>(beds.target_total);

    CompiledDepartments out;
    bool or_computed = false;
    long long or_count = 0;
    const auto operating_rooms = [&]() {
        if (!or_computed) {
            std::vector<SpecialtyLoad> loads;
            for (std::size_t i = 0; i < depts.size(); ++i) {
                const auto s = config.surgical.specialties.find(depts[i]->name);
                if (s == config.surgical.specialties.end()) continue;
                loads.push_back(SpecialtyLoad{static_cast<double>(dept_beds[i]), s->second.surgery_rate, s->second.avg_duration});
            }
            or_count = required_operating_rooms(loads, resolve_field(merged, config, "E.or_rooms").value_or(0.0), config.surgical);
            or_computed = true;
        }
        return or_count;
    };

    for (std::size_t i = 0; i < depts.size(); ++i) {
        const DepartmentTemplate& d = *depts[i];
        DepartmentSpec spec{d.name, dept_beds[i], {}};
        for (const RoomTemplate& t : d.rooms) {
            if (!enabled(t.requires_flag)) continue;
            const CountRule& c = t.count;
            long long n = 0;
            switch (c.source) {
                case CountSource::Formula:
                    n = ceil_count(c.fixed + c.per_department_bed * static_cast<double>(dept_beds[i]) +
                                   c.per_total_bed * total_beds + c.per_kpop * projected / 1000.0);
                    break;
                case CountSource::Ward:
                    n = ceil_count(static_cast<double>(dept_beds[i]) / c.beds_per_room);
                    break;
                case CountSource::OperatingRooms:
                    n = operating_rooms();
                    break;
                case CountSource::DeliveryRooms: {
                    const double fert = resolve_field(merged, config, "M.fert").value_or(0.0);
                    const double births = projected * fert * config.maternity.births_per_capita_per_fertility;
                    n = ceil_count(births / config.maternity.births_per_delivery_room);
                    break;
                }
            }
            n = clamp_count(n, c);
            if (c.source == CountSource::OperatingRooms) out.operating_rooms += n;
            if (n == 0) continue;
            spec.rooms.push_back(t.name);
            out.rooms.push_back(RoomSpec{t.name, d.name, n, t.area * area_multiplier, t.area * area_multiplier, t.priority,
                                         t.min_quantity});
        }
        out.departments.push_back(std::move(spec));
    }
    return out;
}

double estimate_cost(const std::vector<RoomSpec>& rooms, const dql::DqlRecord& merged, const PlanningConfig& config) {
    double area = 0.0;
    for (const RoomSpec& r : rooms) area += r.total_area();
    if (rooms.empty()) return 0.0;

    const std::string mat = merged.geoclimate && merged.geoclimate->mat ? *merged.geoclimate->mat : "default";
    auto m = config.cost.material_multipliers.find(mat);
    if (m == config.cost.material_multipliers.end()) m = config.cost.material_multipliers.find("default");
    if (m == config.cost.material_multipliers.end()) throw ConfigError("no material multiplier for code '" + mat + "'");
    const double labor = band_multiplier(config.cost.labor_bands, require_field(merged, config, "X.gdp"));
    return area * config.cost.base_rate * m->second * labor * config.cost.gross_up;
}

void apply_trim(std::vector<RoomSpec>& rooms, const TrimAction& action) {
    for (RoomSpec& r : rooms) {
        if (r.department + "/" + r.name != action.target) continue;
        if (action.kind == TrimKind::Quantity) {
            if (static_cast<double>(r.quantity) != action.before) throw std::logic_error("trim replay: quantity mismatch for " + action.target);
            r.quantity = static_cast<long long>(action.after);
        } else {
            if (r.unit_area != action.before) throw std::logic_error("trim replay: area mismatch for " + action.target);
            r.unit_area = action.after;
        }
        return;
    }
    throw std::logic_error("trim replay: no room " + action.target);
}

namespace {

struct TrimStep {
    TrimKind kind;
    double after;
};

std::optional<TrimStep> next_step(const RoomSpec& r, const TrimPolicy& policy) {
    if (r.quantity <= 0) return std::nullopt;
    if (r.quantity > r.min_quantity) {
        const long long after = std::max<long long>(r.min_quantity, r.quantity - policy.quantity_step);
        return TrimStep{TrimKind::Quantity, static_cast<double>(after)};
    }
    // Areas snap to 0.01 m² so a step always saves a measurable amount.
    const auto centi = [](double a) { return std::round(a * 100.0) / 100.0; };
    const double floor_area = centi(r.template_area * policy.area_floor_fraction);
    const double after = std::max(floor_area, centi(r.unit_area - r.template_area * policy.area_step_fraction));
    if (after <= r.unit_area - 0.005) return TrimStep{TrimKind::Area, after};
    return std::nullopt;
}

}  // namespace

FunctionalProgram optimize_to_budget(FunctionalProgram program, double budget, const dql::DqlRecord& merged,
                                     const PlanningConfig& config) {
    program.cost.budget = budget;
    program.cost.estimated = estimate_cost(program.rooms, merged, config);
    while (program.cost.estimated > budget) {
        std::size_t best = program.rooms.size();
        std::optional<TrimStep> best_step;
        for (std::size_t i = 0; i < program.rooms.size(); ++i) {
            const RoomSpec& r = program.rooms[i];
            if (config.is_protected(r.priority)) continue;
            const auto step = next_step(r, config.trim);
            if (!step) continue;
            if (best == program.rooms.size()) {
                best = i;
                best_step = step;
                continue;
            }
            const RoomSpec& b = program.rooms[best];
            const int rank_r = config.priority_rank(r.priority);
            const int rank_b = config.priority_rank(b.priority);
            bool better = false;
            if (rank_r != rank_b) better = rank_r > rank_b;
            else if (r.total_area() != b.total_area()) better = r.total_area() > b.total_area();
            else better = (r.department + "/" + r.name) < (b.department + "/" + b.name);
            if (better) {
                best = i;
                best_step = step;
            }
        }
        if (!best_step) break;

        RoomSpec& r = program.rooms[best];
        TrimAction action{r.department + "/" + r.name, best_step->kind,
                          best_step->kind == TrimKind::Quantity ? static_cast<double>(r.quantity) : r.unit_area,
                          best_step->after, 0.0};
        apply_trim(program.rooms, action);
        const double cost = estimate_cost(program.rooms, merged, config);
        action.saved = program.cost.estimated - cost;
        program.cost.estimated = cost;
        program.trim_log.push_back(std::move(action));
    }
    program.cost.feasible = program.cost.estimated <= budget;
    return program;
}

FunctionalProgram generate_program(const dql::DqlRecord& record, const PlanningConfig& config) {
    if (!record.population || !record.population->pop) throw dql::InvalidRecord("P.pop is required");
    if (!record.economy || !record.economy->budget) throw dql::InvalidRecord("X.budget is required");
    const dql::DqlRecord merged = merge_defaults(record, config);

    FunctionalProgram program;
    const LevelScore ls = score_hospital_level(merged, config);
    program.score = ls.score;
    program.level = ls.level;
    program.flags = extension_flags(ls.level, merged, config);
    program.beds = compute_bed_need(merged, config, ls.level);

    CompiledDepartments compiled = compile_departments(ls.level, program.flags, merged, program.beds, config);
    program.departments = std::move(compiled.departments);
    program.rooms = std::move(compiled.rooms);
    program.operating_rooms = compiled.operating_rooms;

    return optimize_to_budget(std::move(program), *merged.economy->budget * 1e6, merged, config);
}

}  // namespace medbuild
