#pragma once

#include <cstdint>
#include <string>

#include "spx/config.hpp"

namespace spx {

// Pipeline stages. Each verifies its upstream artifacts through the
// hash-chained manifests, writes its outputs under config.output_dir, and
// records a RunReport manifest. method/area filters restrict the first two
// stages; empty/-1 means all.
void cmd_segment(const PipelineConfig& config, const std::string& method = "", int area = -1);
void cmd_features(const PipelineConfig& config, const std::string& method = "", int area = -1);
void cmd_dataset(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
void cmd_crosseval(const PipelineConfig& config);
void cmd_diversity(const PipelineConfig& config);
void cmd_ensemble(const PipelineConfig& config);
void cmd_report(const PipelineConfig& config);

// All eight stages in order.
void run_all(const PipelineConfig& config);

// Digest of every artifact under dir (sorted paths), with the measured
// timing fields (sidecar wall_ms lines, manifest elapsed_ms) normalized out:
// they are wall-clock measurements, everything else must be byte-identical
// across reruns.
uint64_t artifact_tree_digest(const std::string& dir);

}  // namespace spx
