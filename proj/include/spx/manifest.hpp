#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spx {

// Run report per pipeline stage: hash-chained JSON manifests under
// <output>/manifests/<stage>.json. Downstream stages verify their inputs
// against the upstream manifest hashes before running.
struct ArtifactRef {
    std::string path;  // relative to the output directory's parent (as given)
    std::string hash;  // fnv1a-64 of the file bytes, 16 hex chars
};

struct RunReport {
    std::string stage;
    std::string config_snapshot;  // byte-identical copy of the config text
    std::vector<ArtifactRef> inputs;
    std::vector<ArtifactRef> outputs;
    double elapsed_ms = 0;
};

std::string file_hash_hex(const std::string& path);

void save_run_report(const std::string& manifest_dir, const RunReport& report);
RunReport load_run_report(const std::string& manifest_dir, const std::string& stage);
std::string manifest_path(const std::string& manifest_dir, const std::string& stage);

// Verifies that `path` appears in the report's outputs with a matching hash.
// Throws Error("missing artifact ...") or Error("stale artifact ...") with
// the offending path and stage named.
void require_fresh(const RunReport& upstream, const std::string& path);

}  // namespace spx
