#include "documents.hpp"

namespace medbuild::platform {

using detail::json;

dql::DqlRecord parse_stage(std::string_view dql_text) {
    dql::DqlRecord record;
    try {
        record = dql::parse_dql(dql_text);
    } catch (const dql::ParseError& e) {
        throw PipelineError("parse", e.what(),
                            {{"@" + std::to_string(e.position()), std::string(dql::to_string(e.kind())), "hard"}});
    }
    const auto violations = dql::validate(record);
    if (dql::has_hard_violation(violations)) {
        std::vector<StageViolation> list;
        for (const dql::Violation& v : violations) list.push_back({v.path, v.message, std::string(dql::to_string(v.severity))});
        throw PipelineError("parse", "DQL record violates hard range constraints", std::move(list));
    }
    return record;
}

FunctionalProgram program_stage(const dql::DqlRecord& record, const PlanningConfig& config) {
    try {
        return generate_program(record, config);
    } catch (const dql::InvalidRecord& e) {
        throw PipelineError("program", e.what());
    } catch (const DomainError& e) {
        throw PipelineError("program", e.what());
    }
}

PipelineRun run_pipeline(const PipelineInputs& inputs, const PlanningConfig& config) {
    PipelineRun run;
    run.inputs = inputs;
    run.config_hash = medbuild::config_hash(config);
    const dql::DqlRecord record = parse_stage(inputs.dql);
    run.outputs.program = program_stage(record, config);
    try {
        layout::check_site(inputs.site);
        run.outputs.schemes = layout::generate_schemes(run.outputs.program, inputs.site, inputs.seed, config);
    } catch (const layout::InvalidSite& e) {
        throw PipelineError("layout", e.what(), {{"site", e.what(), "hard"}});
    } catch (const layout::SiteTooSmall& e) {
        throw PipelineError("layout", e.what(), {{"site", e.what(), "hard"}});
    }
    try {
        run.outputs.scene_s1 = massing::build_scene(run.outputs.program, run.outputs.schemes.s1, config, inputs.seed, run.config_hash);
        run.outputs.scene_s2 = massing::build_scene(run.outputs.program, run.outputs.schemes.s2, config, inputs.seed, run.config_hash);
    } catch (const massing::ZeroCapacity& e) {
        throw PipelineError("massing", e.what());
    } catch (const geom::OverflowError& e) {
        throw PipelineError("massing", e.what());
    }
    return run;
}

namespace {

json outputs_value(const PipelineRun& run) {
    return json{{"config_hash", run.config_hash},
                {"program", detail::program_value(run.outputs.program)},
                {"schemes", detail::scheme_pair_value(run.outputs.schemes)},
                {"scenes", {{"S1", detail::scene_value(run.outputs.scene_s1)}, {"S2", detail::scene_value(run.outputs.scene_s2)}}}};
}

json inputs_value(const PipelineInputs& in) {
    return json{{"dql", in.dql}, {"site", detail::site_value(in.site)}, {"seed", in.seed}};
}

}  // namespace

std::string outputs_json(const PipelineRun& run) { return outputs_value(run).dump(2) + "\n"; }

std::string inputs_json(const PipelineInputs& inputs) { return inputs_value(inputs).dump(); }

std::string run_json(const PipelineRun& run) {
    return json{{"run_id", run.run_id},
                {"created_at", run.created_at},
                {"config_hash", run.config_hash},
                {"inputs", inputs_value(run.inputs)},
                {"outputs", outputs_value(run)}}
               .dump(2) +
           "\n";
}

PipelineInputs inputs_from_run_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw layout::SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("inputs")) throw layout::SchemaError("$.inputs", "missing required field");
    const json& in = doc["inputs"];
    PipelineInputs out;
    if (!in.contains("dql") || !in["dql"].is_string()) throw layout::SchemaError("$.inputs.dql", "expected a string");
    out.dql = in["dql"].get<std::string>();
    if (!in.contains("site")) throw layout::SchemaError("$.inputs.site", "missing required field");
    out.site = detail::site_from_value(in["site"], "$.inputs.site");
    if (!in.contains("seed") || !in["seed"].is_number_unsigned()) throw layout::SchemaError("$.inputs.seed", "expected an unsigned integer");
    out.seed = in["seed"].get<std::uint64_t>();
    return out;
}

std::string error_json(const PipelineError& error) {
    json list = json::array();
    for (const StageViolation& v : error.violations()) {
        list.push_back(json{{"path", v.path}, {"message", v.message}, {"severity", v.severity}});
    }
    return json{{"error", {{"stage", error.stage()}, {"message", error.what()}, {"violations", std::move(list)}}}}.dump(2) + "\n";
}

}  // namespace medbuild::platform
