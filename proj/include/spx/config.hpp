#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spx/ensemble.hpp"
#include "spx/learners.hpp"
#include "spx/superpixel.hpp"

namespace spx {

// Flat key=value configuration with dotted namespaces and '#' comments.
struct PipelineConfig {
    std::string raw_text;  // byte-exact snapshot of the config file
    std::string path;

    uint64_t seed = 0;
    std::vector<int> areas;

    // path patterns; "{A}" expands to the area id
    std::string raster_pattern;
    std::string labels_pattern;
    std::string mask_pattern;
    std::string output_dir;

    std::vector<std::string> methods;  // superpixel methods to run
    SuperpixelParams superpixel;       // shared; seed is derived per method/area

    std::vector<std::string> feature_bands;
    int feature_levels = 32;

    int64_t dataset_min_pixels = 70;
    double dataset_min_homog = 0.70;
    int dataset_n_pure = 45;
    int dataset_n_mixed = 45;

    int cv_folds = 5;
    int tune_budget = 20;
    int top_k_models = 5;
    std::map<std::string, HyperGrid> grids;  // algo name -> grid overrides

    UmdaParams umda;  // seed derived per target/run
    int ensemble_runs = 5;
    double validation_fraction = 0.25;

    std::string expand_path(const std::string& pattern, int area) const;
};

PipelineConfig parse_config_text(const std::string& text, const std::string& path);
PipelineConfig load_config(const std::string& path);

// Checks that every referenced input file exists and the values are sane.
void validate_config(const PipelineConfig& c);

// The default configuration written by the synth subcommand.
std::string default_config_text(int areas, int k_target, uint64_t seed,
                                const std::string& data_dir, const std::string& out_dir,
                                int n_pure, int n_mixed);

}  // namespace spx
