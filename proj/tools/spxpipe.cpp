#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "spx/config.hpp"
#include "spx/error.hpp"
#include "spx/log.hpp"
#include "spx/parallel.hpp"
#include "spx/pipeline.hpp"
#include "spx/raster_io.hpp"
#include "spx/rng.hpp"
#include "spx/synth.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    int jobs = 1;
    long long seed_override = -1;
};

spx::PipelineConfig load(const CommonArgs& args) {
    spx::PipelineConfig config = spx::load_config(args.config_path);
    if (args.seed_override >= 0) config.seed = static_cast<uint64_t>(args.seed_override);
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config file")->required();
    cmd->add_option("--jobs", args.jobs, "worker threads (1 reproduces any N exactly)");
    cmd->add_option("--seed", args.seed_override, "override the config seed");
}

int run_synth(const std::string& out_dir, int areas, int size, uint64_t seed) {
    namespace fs = std::filesystem;
    const std::string data_dir = out_dir + "/data";
    fs::create_directories(data_dir);
    for (int a = 1; a <= areas; ++a) {
        spx::SynthOptions opt;
        opt.layout = spx::SynthOptions::Layout::blobs;
        opt.width = size;
        opt.height = size;
        opt.seed = spx::derive_seed(seed, static_cast<uint64_t>(a));
        opt.blobs = 2 + a % 3;
        opt.masked = a % 3 == 0;
        const spx::SyntheticScene scene = spx::synth_scene(opt);
        const std::string base = data_dir + "/area" + std::to_string(a);
        spx::save_raster(base + ".hdr", scene.raster);
        spx::save_mask(base + "_mask.hdr", scene.mask);
        spx::save_labelmap(base + "_labels.hdr", scene.labels);
    }
    // k_target scaled to the scene: one segment per ~160 pixels
    const int k_target = std::max(16, size * size / 160);
    const std::string conf = spx::default_config_text(
        areas, k_target, seed, data_dir, out_dir + "/out", 10, 10);
    std::ofstream f(out_dir + "/spxpipe.conf", std::ios::trunc);
    f << conf;
    std::fprintf(stdout, "wrote %d scene(s) under %s and %s/spxpipe.conf\n", areas,
                 data_dir.c_str(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superpixel deforestation classification pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string method_filter;
    int area_filter = -1;

    auto* seg = app.add_subcommand("segment", "segment rasters with the superpixel methods");
    add_common(seg, args);
    seg->add_option("--method", method_filter, "restrict to one method");
    seg->add_option("--area", area_filter, "restrict to one area id");

    auto* feat = app.add_subcommand("features", "per-segment texture features");
    add_common(feat, args);
    feat->add_option("--method", method_filter, "restrict to one method");
    feat->add_option("--area", area_filter, "restrict to one area id");

    auto* data = app.add_subcommand("dataset", "build train/test splits");
    add_common(data, args);
    auto* train = app.add_subcommand("train", "rank, tune and fit the classifier zoo");
    add_common(train, args);
    auto* cross = app.add_subcommand("crosseval", "cross-method evaluation table");
    add_common(cross, args);
    auto* div = app.add_subcommand("diversity", "classifier diversity (COR) matrix");
    add_common(div, args);
    auto* ens = app.add_subcommand("ensemble", "UMDA selection and majority voting");
    add_common(ens, args);
    auto* rep = app.add_subcommand("report", "assemble the text reports and heat map");
    add_common(rep, args);

    auto* synth = app.add_subcommand("synth", "generate demo scenes and a starter config");
    std::string synth_out = "demo";
    int synth_areas = 3, synth_size = 256;
    uint64_t synth_seed = 42;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--areas", synth_areas, "number of scenes");
    synth->add_option("--size", synth_size, "scene width/height");
    synth->add_option("--seed", synth_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return run_synth(synth_out, synth_areas, synth_size, synth_seed);

        spx::set_jobs(args.jobs);
        const spx::PipelineConfig config = load(args);
        if (seg->parsed()) spx::cmd_segment(config, method_filter, area_filter);
        else if (feat->parsed()) spx::cmd_features(config, method_filter, area_filter);
        else if (data->parsed()) spx::cmd_dataset(config);
        else if (train->parsed()) spx::cmd_train(config);
        else if (cross->parsed()) spx::cmd_crosseval(config);
        else if (div->parsed()) spx::cmd_diversity(config);
        else if (ens->parsed()) spx::cmd_ensemble(config);
        else if (rep->parsed()) spx::cmd_report(config);
    } catch (const spx::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
