#include "httplib.h"

#include "documents.hpp"

namespace medbuild::platform {

using detail::json;

namespace {

HttpResult error_result(int status, const PipelineError& e) { return {status, error_json(e)}; }

json parse_body(const std::string& body) {
    if (body.empty()) throw PipelineError("parse", "request body is empty", {{"$", "expected a JSON object", "hard"}});
    try {
        json v = json::parse(body);
        if (!v.is_object()) throw PipelineError("parse", "request body must be a JSON object", {{"$", "expected a JSON object", "hard"}});
        return v;
    } catch (const json::parse_error& e) {
        throw PipelineError("parse", "request body is not valid JSON", {{"$", e.what(), "hard"}});
    }
}

std::string dql_of(const json& req) {
    if (!req.contains("dql") || !req["dql"].is_string()) {
        throw PipelineError("parse", "missing DQL text", {{"$.dql", "expected a string", "hard"}});
    }
    return req["dql"].get<std::string>();
}

layout::SitePolygon site_of(const json& req) {
    if (!req.contains("site")) throw PipelineError("layout", "missing site", {{"$.site", "missing required field", "hard"}});
    try {
        return detail::site_from_value(req["site"], "$.site");
    } catch (const layout::SchemaError& e) {
        throw PipelineError("layout", e.what(), {{e.path(), e.what(), "hard"}});
    } catch (const layout::InvalidSite& e) {
        throw PipelineError("layout", e.what(), {{"$.site", e.what(), "hard"}});
    }
}

std::uint64_t seed_of(const json& req) {
    if (!req.contains("seed")) return 0;
    if (!req["seed"].is_number_unsigned()) throw PipelineError("layout", "seed must be a non-negative integer", {{"$.seed", "expected an unsigned integer", "hard"}});
    return req["seed"].get<std::uint64_t>();
}

FunctionalProgram program_of(const json& req, const PlanningConfig& config) {
    if (req.contains("program")) {
        try {
            return detail::program_from_value(req["program"], "$.program");
        } catch (const layout::SchemaError& e) {
            throw PipelineError("program", e.what(), {{e.path(), e.what(), "hard"}});
        }
    }
    return program_stage(parse_stage(dql_of(req)), config);
}

layout::SchemePair generate(const FunctionalProgram& program, const layout::SitePolygon& site, std::uint64_t seed,
                            const PlanningConfig& config) {
    try {
        return layout::generate_schemes(program, site, seed, config);
    } catch (const layout::SiteTooSmall& e) {
        throw PipelineError("layout", e.what(), {{"$.site", e.what(), "hard"}});
    }
}

}  // namespace

struct Service::Server {
    httplib::Server http;
};

Service::Service(PlanningConfig config, std::optional<std::filesystem::path> runs_dir)
    : config_(std::move(config)), hash_(medbuild::config_hash(config_)), config_text_(config_to_json(config_)) {
    if (runs_dir) store_ = std::make_unique<RunStore>(*runs_dir);
    server_ = std::make_shared<Server>();
}

HttpResult Service::handle(const std::string& method, const std::string& path, const std::string& body,
                           const std::map<std::string, std::string>& query) const {
    try {
        if (method == "POST" && path == "/api/program") return program(body);
        if (method == "POST" && path == "/api/schemes") return schemes(body);
        if (method == "POST" && path == "/api/scene") return scene(body);
        if (method == "POST" && path == "/api/pipeline") return pipeline(body, query);
        if (method == "GET" && path == "/api/config") {
            return {200, json{{"config_hash", hash_}, {"config", json::parse(config_text_)}}.dump(2) + "\n"};
        }
        const std::string runs = "/api/runs/";
        if (method == "GET" && path.rfind(runs, 0) == 0) return run(path.substr(runs.size()));
        return error_result(404, PipelineError("request", "no such endpoint: " + method + " " + path));
    } catch (const PipelineError& e) {
        return error_result(400, e);
    } catch (const std::exception& e) {
        return error_result(500, PipelineError("internal", e.what()));
    }
}

HttpResult Service::program(const std::string& body) const {
    const json req = parse_body(body);
    const FunctionalProgram p = program_stage(parse_stage(dql_of(req)), config_);
    return {200, json{{"config_hash", hash_}, {"program", detail::program_value(p)}}.dump(2) + "\n"};
}

HttpResult Service::schemes(const std::string& body) const {
    const json req = parse_body(body);
    const FunctionalProgram p = program_of(req, config_);
    const layout::SchemePair pair = generate(p, site_of(req), seed_of(req), config_);
    // The body is exactly the scheme wire format; the hash travels in a header.
    return {200, layout::serialize_scheme_json(pair) + "\n"};
}

HttpResult Service::scene(const std::string& body) const {
    const json req = parse_body(body);
    const FunctionalProgram p = program_of(req, config_);
    const std::uint64_t seed = seed_of(req);
    layout::SchemePair pair;
    if (req.contains("schemes")) {
        try {
            pair = detail::scheme_pair_from_value(req["schemes"]);
        } catch (const layout::SchemaError& e) {
            throw PipelineError("layout", e.what(), {{"$.schemes" + e.path().substr(1), e.what(), "hard"}});
        }
    } else {
        pair = generate(p, site_of(req), seed, config_);
    }
    const std::string id = req.contains("scheme_id") && req["scheme_id"].is_string() ? req["scheme_id"].get<std::string>() : "S1";
    if (id != "S1" && id != "S2") throw PipelineError("layout", "scheme_id must be S1 or S2", {{"$.scheme_id", "expected S1 or S2", "hard"}});
    const std::string format = req.contains("format") && req["format"].is_string() ? req["format"].get<std::string>() : "scene-json";
    try {
        const massing::SceneModel s = massing::build_scene(p, id == "S1" ? pair.s1 : pair.s2, config_, seed, hash_);
        HttpResult r{200, massing::export_scene(s, format)};
        if (format == "obj") r.content_type = "text/plain";
        return r;
    } catch (const massing::UnsupportedFormat& e) {
        throw PipelineError("massing", e.what(), {{"$.format", e.what(), "hard"}});
    } catch (const massing::ZeroCapacity& e) {
        throw PipelineError("massing", e.what());
    }
}

HttpResult Service::pipeline(const std::string& body, const std::map<std::string, std::string>& query) const {
    const json req = parse_body(body);
    PipelineInputs in{dql_of(req), site_of(req), seed_of(req)};
    PipelineRun r = run_pipeline(in, config_);
    const std::string stored = store_ ? store_->save(r) : run_json(r);
    const auto view = query.find("view");
    if (view != query.end() && view->second == "outputs") return {200, outputs_json(r)};
    return {200, stored};
}

HttpResult Service::run(const std::string& id) const {
    if (!store_) return error_result(404, PipelineError("request", "this service has no run store"));
    const auto text = store_->load(id);
    if (!text) return error_result(404, PipelineError("request", "unknown run '" + id + "'"));
    return {200, *text};
}

void Service::serve(const std::string& host, int port, const std::function<void(int)>& on_bound) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const HttpResult r = handle(req.method, req.path, req.body, query);
        res.status = r.status;
        res.set_header("X-Config-Hash", hash_);
        res.set_content(r.body, r.content_type);
    };
    server_->http.Get(".*", route);
    server_->http.Post(".*", route);
    int bound = port;
    if (port == 0) {
        bound = server_->http.bind_to_any_port(host);
    } else if (!server_->http.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    if (on_bound) on_bound(bound);
    server_->http.listen_after_bind();
}

void Service::stop() {
    server_->http.stop();
}

}  // namespace medbuild::platform
