#include "spx/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "spx/error.hpp"
#include "spx/rng.hpp"

namespace spx {

std::string file_hash_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot hash missing file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const uint64_t h = fnv1a64(bytes.data(), bytes.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string manifest_path(const std::string& manifest_dir, const std::string& stage) {
    return manifest_dir + "/" + stage + ".json";
}

void save_run_report(const std::string& manifest_dir, const RunReport& report) {
    std::filesystem::create_directories(manifest_dir);
    nlohmann::json j;
    j["stage"] = report.stage;
    j["config_snapshot"] = report.config_snapshot;
    j["elapsed_ms"] = report.elapsed_ms;
    auto refs = [](const std::vector<ArtifactRef>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : v) arr.push_back({{"path", r.path}, {"hash", r.hash}});
        return arr;
    };
    j["inputs"] = refs(report.inputs);
    j["outputs"] = refs(report.outputs);

    std::ofstream f(manifest_path(manifest_dir, report.stage), std::ios::trunc);
    if (!f) throw Error("cannot write manifest for stage " + report.stage);
    f << j.dump(2) << "\n";
}

RunReport load_run_report(const std::string& manifest_dir, const std::string& stage) {
    const std::string path = manifest_path(manifest_dir, stage);
    std::ifstream f(path);
    if (!f)
        throw Error("missing manifest for stage '" + stage + "' (" + path +
                    "); run that stage first");
    nlohmann::json j;
    f >> j;
    RunReport r;
    r.stage = j.at("stage").get<std::string>();
    r.config_snapshot = j.at("config_snapshot").get<std::string>();
    r.elapsed_ms = j.at("elapsed_ms").get<double>();
    for (const auto& key : {"inputs", "outputs"}) {
        auto& dst = std::string(key) == "inputs" ? r.inputs : r.outputs;
        for (const auto& e : j.at(key))
            dst.push_back({e.at("path").get<std::string>(), e.at("hash").get<std::string>()});
    }
    return r;
}

void require_fresh(const RunReport& upstream, const std::string& path) {
    for (const auto& out : upstream.outputs) {
        if (out.path != path) continue;
        if (!std::filesystem::exists(path))
            throw Error("missing artifact " + path + " recorded by stage '" + upstream.stage +
                        "'; rerun it");
        if (file_hash_hex(path) != out.hash)
            throw Error("stale artifact " + path + " (hash mismatch vs stage '" + upstream.stage +
                        "' manifest); rerun upstream stages");
        return;
    }
    throw Error("missing artifact " + path + ": not produced by stage '" + upstream.stage +
                "'; rerun it with the full method/area set");
}

}  // namespace spx
