#pragma once

// Pipeline composition, JSON documents, run persistence and the HTTP service.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medbuild/dql.hpp"
#include "medbuild/layout.hpp"
#include "medbuild/massing.hpp"
#include "medbuild/planning_config.hpp"
#include "medbuild/program.hpp"

namespace medbuild::platform {

// ---- documents ---------------------------------------------------------------

std::string record_to_json(const dql::DqlRecord& record);
std::string program_to_json(const FunctionalProgram& program);
FunctionalProgram program_from_json(std::string_view text);  // throws layout::SchemaError
/// Fixed-width text rendering with a trim ledger section.
std::string program_table(const FunctionalProgram& program);

// ---- pipeline ----------------------------------------------------------------

struct StageViolation {
    std::string path;
    std::string message;
    std::string severity;  // "hard" | "soft"

    bool operator==(const StageViolation&) const = default;
};

/// First hard failure of a pipeline run, attributed to
/// parse | program | layout | massing.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& message, std::vector<StageViolation> violations = {})
        : std::runtime_error(message), stage_(std::move(stage)), violations_(std::move(violations)) {}
    const std::string& stage() const { return stage_; }
    const std::vector<StageViolation>& violations() const { return violations_; }

private:
    std::string stage_;
    std::vector<StageViolation> violations_;
};

std::string error_json(const PipelineError& error);

struct PipelineInputs {
    std::string dql;
    layout::SitePolygon site;
    std::uint64_t seed = 0;

    bool operator==(const PipelineInputs&) const = default;
};

struct PipelineOutputs {
    FunctionalProgram program;
    layout::SchemePair schemes;
    massing::SceneModel scene_s1;
    massing::SceneModel scene_s2;
};

struct PipelineRun {
    std::string run_id;
    std::string created_at;  // UTC, ISO 8601
    std::string config_hash;
    PipelineInputs inputs;
    PipelineOutputs outputs;
};

/// Parse with validation; hard violations raise a parse-stage PipelineError.
dql::DqlRecord parse_stage(std::string_view dql_text);
FunctionalProgram program_stage(const dql::DqlRecord& record, const PlanningConfig& config);

/// Pure computation of the run outputs; run_id and created_at are left empty.
PipelineRun run_pipeline(const PipelineInputs& inputs, const PlanningConfig& config);

/// Deterministic outputs document: config hash, program, schemes, scenes.
std::string outputs_json(const PipelineRun& run);
/// Full run document: identity, timestamps, inputs and outputs.
std::string run_json(const PipelineRun& run);
PipelineInputs inputs_from_run_json(std::string_view text);
std::string inputs_json(const PipelineInputs& inputs);

// ---- run store ---------------------------------------------------------------

/// Directory of run documents named <run_id>.json. Writes go through a
/// temporary file and a rename, so readers never see partial runs.
class RunStore {
public:
    explicit RunStore(std::filesystem::path dir);

    /// Assigns run_id (input hash prefix + per-store counter) and created_at,
    /// writes the run and returns the stored document.
    std::string save(PipelineRun& run);
    std::optional<std::string> load(const std::string& run_id) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

// ---- service -----------------------------------------------------------------

struct HttpResult {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Request handling independent of the socket layer; `serve` wires it to HTTP.
class Service {
public:
    Service(PlanningConfig config, std::optional<std::filesystem::path> runs_dir);

    HttpResult handle(const std::string& method, const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& query = {}) const;
    const std::string& config_hash() const { return hash_; }

    /// Blocks serving on host:port. Port 0 binds an ephemeral port; `on_bound`
    /// receives the actual port before serving starts.
    void serve(const std::string& host, int port, const std::function<void(int)>& on_bound = {});
    void stop();

private:
    HttpResult program(const std::string& body) const;
    HttpResult schemes(const std::string& body) const;
    HttpResult scene(const std::string& body) const;
    HttpResult pipeline(const std::string& body, const std::map<std::string, std::string>& query) const;
    HttpResult run(const std::string& id) const;

    PlanningConfig config_;
    std::string hash_;
    std::string config_text_;
    std::unique_ptr<RunStore> store_;
    struct Server;
    std::shared_ptr<Server> server_;
};

}  // namespace medbuild::platform
