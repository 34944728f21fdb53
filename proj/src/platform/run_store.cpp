#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "medbuild/hashing.hpp"
#include "medbuild/platform.hpp"

namespace medbuild::platform {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || c == '-')) return false;
    }
    return true;
}

}  // namespace

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

std::string RunStore::save(PipelineRun& run) {
    // Identical inputs share the hash prefix; the counter keeps ids unique.
    const std::string prefix = sha256_hex(inputs_json(run.inputs) + run.config_hash).substr(0, 16);
    std::lock_guard lock(mutex_);
    int counter = 1;
    while (std::filesystem::exists(dir_ / (prefix + "-" + std::to_string(counter) + ".json"))) ++counter;
    run.run_id = prefix + "-" + std::to_string(counter);
    run.created_at = utc_now();
    const std::string text = run_json(run);
    const std::filesystem::path final_path = dir_ / (run.run_id + ".json");
    const std::filesystem::path tmp = dir_ / ("." + run.run_id + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("cannot write run file " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
    return text;
}

std::optional<std::string> RunStore::load(const std::string& run_id) const {
    if (!valid_id(run_id)) return std::nullopt;
    std::ifstream in(dir_ / (run_id + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace medbuild::platform
