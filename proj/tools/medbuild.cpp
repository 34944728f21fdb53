// medbuild command-line interface.
//
// Exit codes: 0 success, 2 validation failure, 3 configuration error.

#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "medbuild/platform.hpp"

namespace {

using namespace medbuild;
using json = nlohmann::ordered_json;

constexpr int kValidation = 2;
constexpr int kConfig = 3;

struct Failure {
    int code;
    std::string message;
};

std::string read_input(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kValidation, "cannot read " + path};
    ss << in.rdbuf();
    return ss.str();
}

PlanningConfig load_config(const std::string& flag) {
    std::string path = flag;
    if (path.empty()) {
        if (const char* env = std::getenv("MEDBUILD_CONFIG"); env && *env) path = env;
    }
    if (path.empty()) return default_config();
    try {
        return load_config_file(path);
    } catch (const ConfigError& e) {
        throw Failure{kConfig, std::string("config error: ") + e.what()};
    }
}

layout::SitePolygon load_site(const std::string& path) {
    try {
        return layout::parse_site_json(read_input(path));
    } catch (const layout::SchemaError& e) {
        throw platform::PipelineError("layout", std::string("site: ") + e.what(), {{e.path(), e.what(), "hard"}});
    } catch (const layout::InvalidSite& e) {
        throw platform::PipelineError("layout", std::string("site: ") + e.what(), {{"$", e.what(), "hard"}});
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Failure{kValidation, "cannot write " + path.string()};
}

FunctionalProgram program_for(const std::string& dql_path, const PlanningConfig& config) {
    return platform::program_stage(platform::parse_stage(read_input(dql_path)), config);
}

layout::SchemePair schemes_for(const FunctionalProgram& p, const layout::SitePolygon& site, std::uint64_t seed,
                               const PlanningConfig& config) {
    try {
        return layout::generate_schemes(p, site, seed, config);
    } catch (const layout::SiteTooSmall& e) {
        throw platform::PipelineError("layout", std::string("SiteTooSmall: ") + e.what(), {{"site", e.what(), "hard"}});
    }
}

// Calibration report against a fixtures document:
// {"cases":[{"name","dql","level","beds","area_m2","budget_musd"}], "tolerance":{"beds","area"}}
int calibrate(const std::string& fixtures_path, const PlanningConfig& config) {
    json doc;
    try {
        doc = json::parse(read_input(fixtures_path));
    } catch (const json::parse_error& e) {
        throw Failure{kValidation, std::string("fixtures: ") + e.what()};
    }
    const std::filesystem::path base = std::filesystem::path(fixtures_path).parent_path();
    const double bed_tol = doc.value("/tolerance/beds"_json_pointer, 0.10);
    const double area_tol = doc.value("/tolerance/area"_json_pointer, 0.20);
    bool all_ok = true;
    std::printf("%-22s %-12s %-12s %7s %7s %7s %9s %9s %7s %12s %12s  %s\n", "case", "level", "expected", "beds", "target",
                "delta", "area", "target", "delta", "cost", "budget", "status");
    for (const json& c : doc.at("cases")) {
        const std::string name = c.at("name").get<std::string>();
        const FunctionalProgram p = program_for((base / c.at("dql").get<std::string>()).string(), config);
        const std::string want_level = c.at("level").get<std::string>();
        const double want_beds = c.at("beds").get<double>(), want_area = c.at("area_m2").get<double>();
        const double beds_delta = (static_cast<double>(p.beds.target_total) - want_beds) / want_beds;
        const double area_delta = (p.total_area() - want_area) / want_area;
        const bool ok = p.level_label() == want_level && std::fabs(beds_delta) <= bed_tol && std::fabs(area_delta) <= area_tol &&
                        p.cost.estimated <= p.cost.budget;
        all_ok = all_ok && ok;
        std::printf("%-22s %-12s %-12s %7lld %7.0f %+6.1f%% %9.0f %9.0f %+6.1f%% %12.0f %12.0f  %s\n", name.c_str(),
                    p.level_label().c_str(), want_level.c_str(), p.beds.target_total, want_beds, beds_delta * 100, p.total_area(),
                    want_area, area_delta * 100, p.cost.estimated, p.cost.budget, ok ? "ok" : "MISS");
    }
    return all_ok ? 0 : kValidation;
}

platform::Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"medbuild: healthcare facility pre-design engine"};
    app.require_subcommand(1);
    app.fallthrough();  // --config is accepted after the subcommand too
    std::string config_path;
    app.add_option("--config", config_path, "Planning config JSON (default: MEDBUILD_CONFIG or the built-in config)");

    std::string input, site_path, out_dir, format = "scene-json", scheme_id, runs_dir, fixtures, host = "127.0.0.1";
    std::uint64_t seed = 0;
    int port = 8080;
    bool as_json = false, as_table = false, outputs_only = false;

    auto* parse_cmd = app.add_subcommand("parse", "Parse and validate a DQL string, print it as JSON");
    parse_cmd->add_option("input", input, "DQL file or - for stdin")->required();

    auto* program_cmd = app.add_subcommand("program", "Generate the functional program for a DQL");
    program_cmd->add_option("dql", input, "DQL file or -")->required();
    auto* json_flag = program_cmd->add_flag("--json", as_json, "JSON output (default)");
    program_cmd->add_flag("--table", as_table, "Human-readable table with the trim ledger")->excludes(json_flag);

    auto* schemes_cmd = app.add_subcommand("schemes", "Generate the two axis schemes");
    schemes_cmd->add_option("dql", input, "DQL file or -")->required();
    schemes_cmd->add_option("--site", site_path, "Site polygon JSON {\"vertices\": [[x_mm, y_mm], ...]}")->required();
    schemes_cmd->add_option("--seed", seed, "Generator seed");

    auto* scene_cmd = app.add_subcommand("scene", "Synthesize the massing scenes");
    scene_cmd->add_option("dql", input, "DQL file or -")->required();
    scene_cmd->add_option("--site", site_path, "Site polygon JSON")->required();
    scene_cmd->add_option("--seed", seed, "Generator seed");
    scene_cmd->add_option("--out", out_dir, "Directory for scene_S1/scene_S2 files; stdout when absent");
    scene_cmd->add_option("--scheme", scheme_id, "Only this scheme (S1 or S2)")->check(CLI::IsMember({"S1", "S2"}));
    scene_cmd->add_option("--format", format, "scene-json or obj")->check(CLI::IsMember({"scene-json", "obj"}));

    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run program, schemes and scenes end to end");
    pipeline_cmd->add_option("dql", input, "DQL file or -")->required();
    pipeline_cmd->add_option("--site", site_path, "Site polygon JSON")->required();
    pipeline_cmd->add_option("--seed", seed, "Generator seed");
    pipeline_cmd->add_option("--runs-dir", runs_dir, "Persist the run in this directory");
    pipeline_cmd->add_flag("--outputs-only", outputs_only, "Print only the deterministic outputs document");

    auto* rerun_cmd = app.add_subcommand("rerun", "Re-execute a persisted run and compare its outputs");
    rerun_cmd->add_option("run", input, "Run JSON file")->required();

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
    serve_cmd->add_option("--port", port, "Port (0 picks a free port)");
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--runs-dir", runs_dir, "Run store directory");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Compare programs against calibration fixtures");
    calibrate_cmd->add_option("--fixtures", fixtures, "Fixtures JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const PlanningConfig config = load_config(config_path);
        if (*parse_cmd) {
            const dql::DqlRecord r = platform::parse_stage(read_input(input));
            std::cout << platform::record_to_json(r);
            for (const dql::Violation& v : dql::validate(r)) {
                std::cerr << "warning: " << v.path << ": " << v.message << "\n";
            }
            return 0;
        }
        if (*program_cmd) {
            const FunctionalProgram p = program_for(input, config);
            std::cout << (as_table ? platform::program_table(p) : platform::program_to_json(p));
            return 0;
        }
        if (*schemes_cmd) {
            const layout::SitePolygon site = load_site(site_path);
            const FunctionalProgram p = program_for(input, config);
            std::cout << layout::serialize_scheme_json(schemes_for(p, site, seed, config)) << "\n";
            return 0;
        }
        if (*scene_cmd) {
            const layout::SitePolygon site = load_site(site_path);
            const FunctionalProgram p = program_for(input, config);
            const layout::SchemePair pair = schemes_for(p, site, seed, config);
            const std::string hash = config_hash(config);
            for (const layout::AxisScheme* s : {&pair.s1, &pair.s2}) {
                if (!scheme_id.empty() && s->id != scheme_id) continue;
                massing::SceneModel scene;
                try {
                    scene = massing::build_scene(p, *s, config, seed, hash);
                } catch (const massing::ZeroCapacity& e) {
                    throw platform::PipelineError("massing", e.what());
                }
                const std::string text = massing::export_scene(scene, format);
                if (out_dir.empty()) {
                    std::cout << text;
                } else {
                    std::filesystem::create_directories(out_dir);
                    write_file(std::filesystem::path(out_dir) / ("scene_" + s->id + (format == "obj" ? ".obj" : ".json")), text);
                }
            }
            return 0;
        }
        if (*pipeline_cmd) {
            const platform::PipelineInputs in{read_input(input), load_site(site_path), seed};
            platform::PipelineRun run = platform::run_pipeline(in, config);
            std::string text = platform::run_json(run);
            if (!runs_dir.empty()) {
                platform::RunStore store(runs_dir);
                text = store.save(run);
            }
            std::cout << (outputs_only ? platform::outputs_json(run) : text);
            return 0;
        }
        if (*rerun_cmd) {
            const std::string stored = read_input(input);
            const platform::PipelineRun run = platform::run_pipeline(platform::inputs_from_run_json(stored), config);
            const json doc = json::parse(stored);
            const std::string before = doc.at("outputs").dump(2) + "\n";
            const std::string after = platform::outputs_json(run);
            if (before != after) {
                std::cerr << "outputs differ from the stored run\n";
                return kValidation;
            }
            std::cout << "identical\n";
            return 0;
        }
        if (*serve_cmd) {
            std::optional<std::filesystem::path> dir;
            if (!runs_dir.empty()) dir = runs_dir;
            platform::Service service(config, dir);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            service.serve(host, port, [&](int bound) {
                std::cerr << "medbuild serving on http://" << host << ":" << bound << " (config " << service.config_hash() << ")\n";
            });
            return 0;
        }
        if (*calibrate_cmd) return calibrate(fixtures, config);
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.code;
    } catch (const platform::PipelineError& e) {
        std::cerr << platform::error_json(e);
        return kValidation;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const layout::SchemaError& e) {
        std::cerr << e.what() << "\n";
        return kValidation;
    }
    return 0;
}
