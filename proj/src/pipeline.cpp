#include "spx/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spx/dataset.hpp"
#include "spx/ensemble.hpp"
#include "spx/error.hpp"
#include "spx/learners.hpp"
#include "spx/log.hpp"
#include "spx/manifest.hpp"
#include "spx/metrics.hpp"
#include "spx/raster_io.hpp"
#include "spx/rng.hpp"
#include "spx/texture.hpp"

namespace fs = std::filesystem;

namespace spx {

namespace {

// ---- path scheme

struct Paths {
    std::string out;
    explicit Paths(const PipelineConfig& c) : out(c.output_dir) {}

    std::string manifests() const { return out + "/manifests"; }
    std::string seg_hdr(const std::string& m, int a) const {
        return out + "/segments/" + m + "_a" + std::to_string(a) + ".hdr";
    }
    std::string seg_bin(const std::string& m, int a) const {
        return out + "/segments/" + m + "_a" + std::to_string(a) + ".bin";
    }
    std::string seg_sidecar(const std::string& m, int a) const {
        return out + "/segments/" + m + "_a" + std::to_string(a) + ".sidecar.txt";
    }
    std::string features_csv(const std::string& m, int a) const {
        return out + "/features/" + m + "_a" + std::to_string(a) + ".csv";
    }
    std::string features_excluded_csv(const std::string& m, int a) const {
        return out + "/features/" + m + "_a" + std::to_string(a) + "_excluded.csv";
    }
    std::string manifest_csv(const std::string& m) const {
        return out + "/dataset/" + m + "_manifest.csv";
    }
    std::string correspondence_csv(const std::string& m, int a) const {
        return out + "/dataset/correspondence_slic_to_" + m + "_a" + std::to_string(a) + ".csv";
    }
    std::string ranking_csv(const std::string& m) const {
        return out + "/train/" + m + "_ranking.csv";
    }
    std::string table1_csv(const std::string& m) const {
        return out + "/train/" + m + "_table1.csv";
    }
    std::string model_base(const std::string& m, int rank, const std::string& algo) const {
        return out + "/train/models/" + m + "_rank" + std::to_string(rank) + "_" + algo;
    }
    std::string cross_csv() const { return out + "/crosseval/cross_method.csv"; }
    std::string cross_txt() const { return out + "/crosseval/cross_method.txt"; }
    std::string diversity_matrix_csv() const {
        return out + "/diversity/prediction_matrix_validation.csv";
    }
    std::string cor_csv() const { return out + "/diversity/cor_matrix.csv"; }
    std::string ensemble_runs_csv(const std::string& m) const {
        return out + "/ensemble/" + m + "_runs.csv";
    }
    std::string ensemble_trace_csv(const std::string& m) const {
        return out + "/ensemble/" + m + "_trace.csv";
    }
    std::string ensemble_table_csv() const { return out + "/ensemble/ensemble_table.csv"; }
    std::string table3_csv() const { return out + "/ensemble/table3.csv"; }
    std::string report_table(int n) const {
        return out + "/report/table" + std::to_string(n) + ".txt";
    }
    std::string report_heatmap() const { return out + "/report/cor_heatmap.ppm"; }
};

void ensure_parent_dir(const std::string& path) {
    fs::create_directories(fs::path(path).parent_path());
}

void write_text_file(const std::string& path, const std::string& text) {
    ensure_parent_dir(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

// ---- stage bookkeeping

struct StageRecorder {
    const PipelineConfig& config;
    RunReport report;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::set<std::string> inputs, outputs;

    StageRecorder(const PipelineConfig& c, std::string stage) : config(c) {
        report.stage = std::move(stage);
        report.config_snapshot = c.raw_text;
    }
    void input(const std::string& path) { inputs.insert(path); }
    void output(const std::string& path) { outputs.insert(path); }

    void finish() {
        for (const auto& p : inputs)
            if (fs::exists(p)) report.inputs.push_back({p, file_hash_hex(p)});
        for (const auto& p : outputs)
            if (fs::exists(p)) report.outputs.push_back({p, file_hash_hex(p)});
        report.elapsed_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        save_run_report(Paths(config).manifests(), report);
        log_info("stage " + report.stage + " done: " + std::to_string(report.outputs.size()) +
                 " artifacts");
    }
};

uint64_t method_tag(const std::string& m) { return fnv1a64(m.data(), m.size()); }

// ---- feature CSV round trip

struct FeatureRow {
    SegmentKey key;
    int label = 0;  // 0 forest, 1 deforestation
    double homogeneity = 0;
    std::array<double, kNumHaralick> values{};
};

std::string feature_csv_header() {
    std::string h = "segment_id,method,class,homogeneity";
    for (int i = 1; i <= kNumHaralick; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, ",f%02d", i);
        h += buf;
    }
    return h;
}

// Map keyed by (area, segment) for one method, loaded from the per-area CSVs.
struct FeatureDataset {
    std::map<SegmentKey, FeatureRow> rows;

    TrainingTable table(const std::vector<SegmentKey>& keys) const {
        TrainingTable t;
        t.d = kNumHaralick;
        for (const auto& k : keys) {
            const auto it = rows.find(k);
            if (it == rows.end())
                throw Error("no feature row for area " + std::to_string(k.area_id) + " segment " +
                            std::to_string(k.segment_id));
            t.features.insert(t.features.end(), it->second.values.begin(),
                              it->second.values.end());
            t.labels.push_back(it->second.label);
            ++t.n;
        }
        return t;
    }
};

FeatureDataset load_feature_csvs(const PipelineConfig& config, const Paths& paths,
                                 const std::string& method, StageRecorder* rec) {
    FeatureDataset ds;
    for (const int a : config.areas) {
        const std::string path = paths.features_csv(method, a);
        if (rec) rec->input(path);
        std::ifstream f(path);
        if (!f) throw Error("missing features for method '" + method + "' area " +
                            std::to_string(a) + " (" + path + "); run the features stage");
        std::string line;
        std::getline(f, line);  // header
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != 4 + kNumHaralick)
                throw Error("bad feature row in " + path + ": " + line);
            FeatureRow row;
            row.key = {a, static_cast<uint32_t>(std::stoul(cells[0]))};
            row.label = cells[2] == "deforestation" ? 1 : 0;
            row.homogeneity = std::stod(cells[3]);
            for (int i = 0; i < kNumHaralick; ++i) row.values[i] = std::stod(cells[4 + i]);
            ds.rows.emplace(row.key, row);
        }
    }
    return ds;
}

// ---- shared loaders with staleness checks

Segmentation load_checked_segmentation(const PipelineConfig& config, const Paths& paths,
                                       const RunReport& seg_manifest, const std::string& method,
                                       int area) {
    const std::string hdr = paths.seg_hdr(method, area);
    const std::string bin = paths.seg_bin(method, area);
    if (!fs::exists(hdr) || !fs::exists(bin))
        throw Error("method '" + method + "' area " + std::to_string(area) +
                    " has no segmentation (" + hdr + "); run the segment stage");
    require_fresh(seg_manifest, hdr);
    require_fresh(seg_manifest, bin);
    (void)config;
    return load_segmentation(hdr);
}

struct TrainedSet {
    // 25 models: per method in config order, the top-k ranked models
    std::vector<std::string> ids;                  // "ALGO/METHOD"
    std::vector<std::string> method_of;            // lowercase method per model
    std::vector<TrainedModel> models;
    std::map<std::string, TrainedModel> top1;      // method -> rank-0 model
};

TrainedSet load_trained_set(const PipelineConfig& config, const Paths& paths,
                            const RunReport& train_manifest, StageRecorder* rec) {
    TrainedSet set;
    for (const auto& m : config.methods) {
        const std::string t1 = paths.table1_csv(m);
        if (!fs::exists(t1))
            throw Error("method '" + m + "' has no trained models (" + t1 +
                        "); run the train stage");
        require_fresh(train_manifest, t1);
        if (rec) rec->input(t1);
        std::ifstream f(t1);
        std::string line;
        std::getline(f, line);  // header
        int rank = 0;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            const std::string algo = cells[2];
            const std::string base = paths.model_base(m, rank, algo);
            require_fresh(train_manifest, base + ".bin");
            if (rec) rec->input(base + ".bin");
            TrainedModel model = load_model(base);
            if (rank == 0) set.top1.emplace(m, model);
            set.ids.push_back(algo + "/" + upper(m));
            set.method_of.push_back(m);
            set.models.push_back(std::move(model));
            ++rank;
        }
        if (rank == 0) throw Error("method '" + m + "' has an empty model table: " + t1);
    }
    return set;
}

// Stratified validation carve from the training manifest: per class, a
// seeded draw of round(fraction * n), at least 1.
std::vector<SegmentKey> carve_validation(const SplitManifest& manifest, double fraction,
                                         uint64_t seed) {
    std::vector<SegmentKey> out;
    uint64_t cls_tag = 0;
    for (const auto* pool : {&manifest.train_forest, &manifest.train_deforestation}) {
        std::vector<SegmentKey> keys = *pool;
        std::sort(keys.begin(), keys.end());
        Rng rng(derive_seed(seed, cls_tag++));
        shuffle(keys, rng);
        const auto take = std::max<size_t>(
            1, static_cast<size_t>(std::llround(fraction * static_cast<double>(keys.size()))));
        keys.resize(std::min(take, keys.size()));
        out.insert(out.end(), keys.begin(), keys.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

PredictionMatrix build_matrix(const TrainedSet& set, const TrainingTable& table) {
    PredictionMatrix pm;
    pm.n_samples = table.n;
    pm.classifiers = set.ids;
    pm.truth = table.labels;
    for (const auto& model : set.models) {
        const Prediction p = predict(model, table);
        pm.predictions.push_back(p.labels);
    }
    pm.validate();
    return pm;
}

}  // namespace

// ---- stages

namespace {

void check_filters(const PipelineConfig& config, const std::string& method, int area) {
    if (!method.empty()) {
        superpixel_variant_note(method);  // throws UsageError on unknown names
        if (std::find(config.methods.begin(), config.methods.end(), method) ==
            config.methods.end())
            throw UsageError("method '" + method + "' is not listed in superpixel.methods");
    }
    if (area >= 0 &&
        std::find(config.areas.begin(), config.areas.end(), area) == config.areas.end())
        throw UsageError("area " + std::to_string(area) + " is not listed in the config");
}

}  // namespace

void cmd_segment(const PipelineConfig& config, const std::string& method, int area) {
    validate_config(config);
    check_filters(config, method, area);
    const Paths paths(config);
    StageRecorder rec(config, "segment");

    for (const int a : config.areas) {
        if (area >= 0 && a != area) continue;
        const std::string raster_path = config.expand_path(config.raster_pattern, a);
        const std::string mask_path = config.expand_path(config.mask_pattern, a);
        rec.input(raster_path);
        rec.input(mask_path);
        const Raster raster = load_raster(raster_path);
        const Mask mask = load_mask(mask_path);
        const GrayImage gray = pca_first_component(raster, mask);

        for (const auto& m : config.methods) {
            if (!method.empty() && m != method) continue;
            SuperpixelParams p = config.superpixel;
            p.seed = derive_seed(config.seed, method_tag(m), static_cast<uint64_t>(a));

            const auto t0 = std::chrono::steady_clock::now();
            const Segmentation seg = run_superpixel(m, gray, mask, p);
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

            const std::string hdr = paths.seg_hdr(m, a);
            ensure_parent_dir(hdr);
            save_segmentation(hdr, seg);

            SegmentationSidecar sc;
            sc.algorithm = m;
            sc.params = p;
            sc.k_actual = seg.k_actual;
            sc.wall_ms = wall_ms;
            sc.variant = superpixel_variant_note(m);
            write_sidecar(paths.seg_sidecar(m, a), sc);
            log_debug(m + " area " + std::to_string(a) + ": k_actual=" +
                      std::to_string(seg.k_actual) + " in " + std::to_string(wall_ms) + " ms");
        }
    }

    for (const int a : config.areas)
        for (const auto& m : config.methods) {
            rec.output(paths.seg_hdr(m, a));
            rec.output(paths.seg_bin(m, a));
            rec.output(paths.seg_sidecar(m, a));
        }
    rec.finish();
}

void cmd_features(const PipelineConfig& config, const std::string& method, int area) {
    validate_config(config);
    check_filters(config, method, area);
    const Paths paths(config);
    StageRecorder rec(config, "features");
    const RunReport seg_manifest = load_run_report(paths.manifests(), "segment");
    rec.input(manifest_path(paths.manifests(), "segment"));

    for (const int a : config.areas) {
        if (area >= 0 && a != area) continue;
        const std::string raster_path = config.expand_path(config.raster_pattern, a);
        const std::string labels_path = config.expand_path(config.labels_pattern, a);
        const std::string mask_path = config.expand_path(config.mask_pattern, a);
        rec.input(raster_path);
        rec.input(labels_path);
        const Raster raster = load_raster(raster_path);
        const LabelMap labelmap = load_labelmap(labels_path);
        const Mask mask = load_mask(mask_path);
        labelmap.validate_against(mask);

        for (const auto& m : config.methods) {
            if (!method.empty() && m != method) continue;
            rec.input(paths.seg_hdr(m, a));
            rec.input(paths.seg_bin(m, a));
            const Segmentation seg = load_checked_segmentation(config, paths, seg_manifest, m, a);
            const auto stats = segment_stats(seg, labelmap);
            const auto extraction =
                segment_features(raster, seg, config.feature_bands, config.feature_levels);

            std::ostringstream csv;
            csv << feature_csv_header() << "\n";
            for (const auto& fr : extraction.features) {
                const auto& st = stats[fr.segment_id];
                if (!st.usable) continue;  // no labeled pixel: report below
                csv << fr.segment_id << "," << m << ","
                    << (st.dominant_class == kLabelDeforestation ? "deforestation" : "forest")
                    << "," << fmt9(st.homogeneity);
                for (const double v : fr.values) csv << "," << fmt9(v);
                csv << "\n";
            }
            write_text_file(paths.features_csv(m, a), csv.str());

            std::ostringstream excl;
            excl << "segment_id,reason\n";
            for (const uint32_t id : extraction.excluded) excl << id << ",no_cooccurring_pair\n";
            for (const auto& fr : extraction.features)
                if (!stats[fr.segment_id].usable) excl << fr.segment_id << ",no_labeled_pixels\n";
            write_text_file(paths.features_excluded_csv(m, a), excl.str());
        }
    }

    for (const int a : config.areas)
        for (const auto& m : config.methods) {
            rec.output(paths.features_csv(m, a));
            rec.output(paths.features_excluded_csv(m, a));
        }
    rec.finish();
}

void cmd_dataset(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "dataset");
    const RunReport seg_manifest = load_run_report(paths.manifests(), "segment");
    const RunReport feat_manifest = load_run_report(paths.manifests(), "features");
    rec.input(manifest_path(paths.manifests(), "segment"));
    rec.input(manifest_path(paths.manifests(), "features"));

    // Records per method, pooled over areas; restricted to segments that
    // actually produced feature rows.
    std::map<std::string, std::vector<SegmentRecord>> records_by_method;
    std::map<std::string, std::map<int, Segmentation>> segs_by_method;
    for (const auto& m : config.methods) {
        for (const int a : config.areas) {
            require_fresh(feat_manifest, paths.features_csv(m, a));
            const Segmentation seg = load_checked_segmentation(config, paths, seg_manifest, m, a);
            const std::string labels_path = config.expand_path(config.labels_pattern, a);
            rec.input(labels_path);
            const LabelMap labelmap = load_labelmap(labels_path);
            auto stats = segment_stats(seg, labelmap);
            for (auto& r : stats) {
                r.method = m;
                r.area_id = a;
            }
            FeatureDataset fd;
            {
                StageRecorder* norec = nullptr;
                PipelineConfig single = config;
                single.areas = {a};
                fd = load_feature_csvs(single, paths, m, norec);
            }
            for (const auto& r : stats)
                if (fd.rows.count({a, r.segment_id})) records_by_method[m].push_back(r);
            segs_by_method[m].emplace(a, std::move(seg));
            rec.input(paths.features_csv(m, a));
        }
    }

    for (const auto& m : config.methods) {
        auto useful =
            filter_useful(records_by_method[m], config.dataset_min_pixels, config.dataset_min_homog);
        SplitManifest manifest = build_training_set(useful, config.dataset_n_pure,
                                                    config.dataset_n_mixed,
                                                    derive_seed(config.seed, 0xDA7A, method_tag(m)));
        manifest.method = m;
        manifest.min_pixels = config.dataset_min_pixels;
        manifest.min_homog = config.dataset_min_homog;
        ensure_parent_dir(paths.manifest_csv(m));
        save_manifest(paths.manifest_csv(m), manifest);
        rec.output(paths.manifest_csv(m));
    }

    // Cross-method correspondence of the reference (slic) training segments.
    const std::string ref = "slic";
    if (segs_by_method.count(ref)) {
        const SplitManifest ref_manifest = load_manifest(paths.manifest_csv(ref));
        for (const auto& m : config.methods) {
            if (m == ref) continue;
            for (const int a : config.areas) {
                std::vector<uint32_t> ids;
                for (const auto* pool : {&ref_manifest.train_forest, &ref_manifest.train_deforestation})
                    for (const auto& k : *pool)
                        if (k.area_id == a) ids.push_back(k.segment_id);
                std::sort(ids.begin(), ids.end());
                const MatchResult match =
                    match_segments(segs_by_method[ref].at(a), segs_by_method[m].at(a), ids);
                std::ostringstream csv;
                csv << "slic_segment_id," << m << "_segment_id,overlap_pixels\n";
                for (size_t i = 0; i < match.ref_ids.size(); ++i) {
                    csv << match.ref_ids[i] << ",";
                    if (match.matched[i] == kInvalidSegment) csv << "unmatched,0\n";
                    else csv << match.matched[i] << "," << match.overlap[i] << "\n";
                }
                csv << "# injective=" << (match.injective ? "yes" : "no") << "\n";
                write_text_file(paths.correspondence_csv(m, a), csv.str());
                rec.output(paths.correspondence_csv(m, a));
            }
        }
    }
    rec.finish();
}

void cmd_train(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "train");
    const RunReport feat_manifest = load_run_report(paths.manifests(), "features");
    const RunReport data_manifest = load_run_report(paths.manifests(), "dataset");
    rec.input(manifest_path(paths.manifests(), "features"));
    rec.input(manifest_path(paths.manifests(), "dataset"));

    for (const auto& m : config.methods) {
        for (const int a : config.areas) require_fresh(feat_manifest, paths.features_csv(m, a));
        require_fresh(data_manifest, paths.manifest_csv(m));
        rec.input(paths.manifest_csv(m));
        const SplitManifest manifest = load_manifest(paths.manifest_csv(m));
        const FeatureDataset features = load_feature_csvs(config, paths, m, &rec);

        std::vector<SegmentKey> train_keys = manifest.train_forest;
        train_keys.insert(train_keys.end(), manifest.train_deforestation.begin(),
                          manifest.train_deforestation.end());
        std::sort(train_keys.begin(), train_keys.end());
        const TrainingTable train_table = features.table(train_keys);
        const TrainingTable test_table = features.table(manifest.test_ids);

        const uint64_t seed_m = derive_seed(config.seed, 0x7EA9, method_tag(m));
        const uint64_t train_hash =
            fnv1a64(train_table.features.data(), train_table.features.size() * sizeof(double),
                    fnv1a64(train_table.labels.data(), train_table.labels.size() * sizeof(int)));

        const auto ranking = rank_models(default_zoo(seed_m), train_table, config.cv_folds, seed_m);

        std::ostringstream rank_csv;
        rank_csv << "rank,algo,ok,cv_accuracy,cv_balanced_accuracy,cv_auc,cv_recall,cv_precision,"
                    "cv_f1,cv_kappa,cv_mcc,error\n";
        for (size_t i = 0; i < ranking.size(); ++i) {
            const auto& e = ranking[i];
            rank_csv << i << "," << algo_name(e.spec.algo) << "," << (e.ok ? 1 : 0);
            const auto& mm = e.report.mean;
            for (const double v : {mm.accuracy, mm.balanced_accuracy, mm.auc, mm.recall,
                                   mm.precision, mm.f1, mm.kappa, mm.mcc})
                rank_csv << "," << (e.ok ? fmt17(v) : "");
            rank_csv << "," << e.error << "\n";
        }
        write_text_file(paths.ranking_csv(m), rank_csv.str());
        rec.output(paths.ranking_csv(m));

        const auto top = top_k(ranking, config.top_k_models);
        std::ostringstream t1_csv;
        t1_csv << "method,rank,algo,balanced_accuracy_test\n";
        for (size_t i = 0; i < top.size(); ++i) {
            if (!top[i].ok)
                throw Error("train: ranked entry " + std::to_string(i) + " for method '" + m +
                            "' failed: " + top[i].error);
            HyperGrid grid = default_grid(top[i].spec.algo);
            const auto it = config.grids.find(algo_name(top[i].spec.algo));
            if (it != config.grids.end())
                for (const auto& [param, range] : it->second) grid[param] = range;

            const ClassifierSpec tuned =
                tune(top[i].spec, train_table, config.tune_budget,
                     derive_seed(seed_m, 0x73E, static_cast<uint64_t>(i)), &grid);
            const TrainedModel model = fit(tuned, train_table);

            const Prediction p = predict(model, test_table);
            const double bacc = balanced_accuracy(confusion_from(test_table.labels, p.labels));

            const std::string base =
                paths.model_base(m, static_cast<int>(i), algo_name(tuned.algo));
            ensure_parent_dir(base);
            save_model(base, model, train_hash);
            rec.output(base + ".bin");
            rec.output(base + ".manifest.txt");

            t1_csv << m << "," << i << "," << algo_name(tuned.algo) << "," << fmt17(bacc) << "\n";
        }
        write_text_file(paths.table1_csv(m), t1_csv.str());
        rec.output(paths.table1_csv(m));
        log_info("train " + m + ": top-1 " + algo_name(top[0].spec.algo));
    }
    rec.finish();
}

void cmd_crosseval(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "crosseval");
    const RunReport train_manifest = load_run_report(paths.manifests(), "train");
    const RunReport data_manifest = load_run_report(paths.manifests(), "dataset");
    rec.input(manifest_path(paths.manifests(), "train"));
    rec.input(manifest_path(paths.manifests(), "dataset"));

    const TrainedSet set = load_trained_set(config, paths, train_manifest, &rec);

    std::vector<std::string> col_ids;
    std::vector<const TrainedModel*> col_models;
    for (const auto& m : config.methods) {
        col_ids.push_back(algo_name(set.top1.at(m).spec.algo) + "/" + upper(m));
        col_models.push_back(&set.top1.at(m));
    }

    std::vector<std::vector<double>> cells;
    for (const auto& target : config.methods) {
        require_fresh(data_manifest, paths.manifest_csv(target));
        const SplitManifest manifest = load_manifest(paths.manifest_csv(target));
        const FeatureDataset features = load_feature_csvs(config, paths, target, &rec);
        const TrainingTable test_table = features.table(manifest.test_ids);
        std::vector<double> row;
        for (const auto* model : col_models) {
            const Prediction p = predict(*model, test_table);
            row.push_back(balanced_accuracy(confusion_from(test_table.labels, p.labels)));
        }
        cells.push_back(std::move(row));
    }

    const CrossMethodTable table = cross_method_table(config.methods, col_ids, cells);
    write_text_file(paths.cross_csv(), cross_method_csv(table));
    write_text_file(paths.cross_txt(), cross_method_text(table));
    rec.output(paths.cross_csv());
    rec.output(paths.cross_txt());
    rec.finish();
}

namespace {

// Validation prediction matrix for one target method.
PredictionMatrix target_validation_matrix(const PipelineConfig& config, const Paths& paths,
                                          const TrainedSet& set, const std::string& target,
                                          StageRecorder* rec) {
    const SplitManifest manifest = load_manifest(paths.manifest_csv(target));
    const FeatureDataset features = load_feature_csvs(config, paths, target, rec);
    const auto carve =
        carve_validation(manifest, config.validation_fraction,
                         derive_seed(config.seed, 0xCA21E, method_tag(target)));
    return build_matrix(set, features.table(carve));
}

}  // namespace

void cmd_diversity(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "diversity");
    const RunReport train_manifest = load_run_report(paths.manifests(), "train");
    const RunReport data_manifest = load_run_report(paths.manifests(), "dataset");
    rec.input(manifest_path(paths.manifests(), "train"));
    rec.input(manifest_path(paths.manifests(), "dataset"));

    const TrainedSet set = load_trained_set(config, paths, train_manifest, &rec);

    // Pool the per-target validation carves into one matrix.
    PredictionMatrix pooled;
    pooled.classifiers = set.ids;
    pooled.predictions.assign(set.ids.size(), {});
    for (const auto& target : config.methods) {
        require_fresh(data_manifest, paths.manifest_csv(target));
        const PredictionMatrix pm = target_validation_matrix(config, paths, set, target, &rec);
        pooled.n_samples += pm.n_samples;
        pooled.truth.insert(pooled.truth.end(), pm.truth.begin(), pm.truth.end());
        for (size_t c = 0; c < pooled.predictions.size(); ++c)
            pooled.predictions[c].insert(pooled.predictions[c].end(), pm.predictions[c].begin(),
                                         pm.predictions[c].end());
    }
    pooled.validate();

    ensure_parent_dir(paths.diversity_matrix_csv());
    save_prediction_matrix(paths.diversity_matrix_csv(), pooled);
    const CorMatrix cm = cor_matrix(pooled);
    write_text_file(paths.cor_csv(), cor_matrix_csv(cm));
    rec.output(paths.diversity_matrix_csv());
    rec.output(paths.cor_csv());
    rec.finish();
}

void cmd_ensemble(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "ensemble");
    const RunReport train_manifest = load_run_report(paths.manifests(), "train");
    const RunReport data_manifest = load_run_report(paths.manifests(), "dataset");
    const RunReport cross_manifest = load_run_report(paths.manifests(), "crosseval");
    rec.input(manifest_path(paths.manifests(), "train"));
    rec.input(manifest_path(paths.manifests(), "dataset"));
    rec.input(manifest_path(paths.manifests(), "crosseval"));
    require_fresh(cross_manifest, paths.cross_csv());
    rec.input(paths.cross_csv());

    const TrainedSet set = load_trained_set(config, paths, train_manifest, &rec);

    // Best single classifier per target row from the crosseval table.
    std::map<std::string, double> best_single;
    {
        std::ifstream f(paths.cross_csv());
        std::string line;
        std::getline(f, line);  // header
        while (std::getline(f, line)) {
            const auto cells = split_csv_line(line);
            if (cells.empty() || cells[0] == "avg" || cells[0] == "stddev") continue;
            double best = 0;
            for (size_t i = 1; i < cells.size(); ++i) best = std::max(best, std::stod(cells[i]));
            best_single[cells[0]] = best;
        }
    }

    std::vector<EnsembleSelection> headline_runs;
    std::ostringstream table_csv;
    table_csv << "target,umda_acc,umda_c,mv_acc,mv_c,best_single,rel_gain\n";

    uint64_t target_idx = 0;
    for (const auto& target : config.methods) {
        require_fresh(data_manifest, paths.manifest_csv(target));
        const SplitManifest manifest = load_manifest(paths.manifest_csv(target));
        const FeatureDataset features = load_feature_csvs(config, paths, target, &rec);
        const PredictionMatrix val = target_validation_matrix(config, paths, set, target, nullptr);
        const PredictionMatrix test = build_matrix(set, features.table(manifest.test_ids));

        std::ostringstream runs_csv, trace_csv;
        runs_csv << "run,val_fitness,n_included,test_acc,include\n";
        trace_csv << "run,iteration,best_fitness\n";

        std::vector<EnsembleSelection> runs;
        for (int r = 0; r < config.ensemble_runs; ++r) {
            UmdaParams params = config.umda;
            params.seed = derive_seed(config.seed, 0xE25, target_idx, static_cast<uint64_t>(r));
            EnsembleSelection sel = umda_select(val, params);
            const double test_acc =
                balanced_accuracy(confusion_from(test.truth, majority_vote(test, sel.include)));
            int nc = 0;
            std::string bits;
            for (const uint8_t b : sel.include) {
                nc += b != 0;
                bits += b ? '1' : '0';
            }
            runs_csv << r << "," << fmt17(sel.fitness) << "," << nc << "," << fmt17(test_acc)
                     << "," << bits << "\n";
            for (size_t it = 0; it < sel.trace.size(); ++it)
                trace_csv << r << "," << it << "," << fmt17(sel.trace[it]) << "\n";
            runs.push_back(std::move(sel));
        }
        write_text_file(paths.ensemble_runs_csv(target), runs_csv.str());
        write_text_file(paths.ensemble_trace_csv(target), trace_csv.str());
        rec.output(paths.ensemble_runs_csv(target));
        rec.output(paths.ensemble_trace_csv(target));

        // Headline row: run 0 against majority voting over all classifiers.
        const EnsembleSelection& headline = runs.front();
        const double umda_acc =
            balanced_accuracy(confusion_from(test.truth, majority_vote(test, headline.include)));
        int umda_c = 0;
        for (const uint8_t b : headline.include) umda_c += b != 0;
        const std::vector<uint8_t> all(set.ids.size(), 1);
        const double mv_acc =
            balanced_accuracy(confusion_from(test.truth, majority_vote(test, all)));
        const double gain = relative_gain(umda_acc, best_single.at(target));
        table_csv << target << "," << fmt17(umda_acc) << "," << umda_c << "," << fmt17(mv_acc)
                  << "," << set.ids.size() << "," << fmt17(best_single.at(target)) << ","
                  << fmt9(gain) << "\n";
        headline_runs.push_back(headline);
        ++target_idx;
    }
    write_text_file(paths.ensemble_table_csv(), table_csv.str());
    rec.output(paths.ensemble_table_csv());

    // Table-3 analytics over the per-target headline selections.
    std::map<std::string, std::string> method_of_id;
    for (size_t i = 0; i < set.ids.size(); ++i) method_of_id[set.ids[i]] = set.method_of[i];
    const SelectionProbabilities sp = selection_probabilities(
        headline_runs, set.ids, method_of_id, static_cast<int>(config.methods.size()));
    std::ostringstream t3;
    t3 << "kind,id,method,value\n";
    for (size_t i = 0; i < sp.ids.size(); ++i)
        t3 << "CI," << sp.ids[i] << "," << set.method_of[i] << "," << fmt9(sp.ci[i]) << "\n";
    for (const auto& [m, v] : sp.cs) t3 << "CS,," << m << "," << fmt9(v) << "\n";
    write_text_file(paths.table3_csv(), t3.str());
    rec.output(paths.table3_csv());
    rec.finish();
}

void cmd_report(const PipelineConfig& config) {
    validate_config(config);
    const Paths paths(config);
    StageRecorder rec(config, "report");
    const RunReport train_manifest = load_run_report(paths.manifests(), "train");
    const RunReport cross_manifest = load_run_report(paths.manifests(), "crosseval");
    const RunReport div_manifest = load_run_report(paths.manifests(), "diversity");
    const RunReport ens_manifest = load_run_report(paths.manifests(), "ensemble");
    for (const auto* name : {"train", "crosseval", "diversity", "ensemble"})
        rec.input(manifest_path(paths.manifests(), name));

    // Table 1: top-k balanced accuracy per method on its own test set.
    {
        std::ostringstream t1;
        t1 << "Balanced accuracy (%) of the top classifiers per superpixel method\n\n";
        for (const auto& m : config.methods) {
            require_fresh(train_manifest, paths.table1_csv(m));
            rec.input(paths.table1_csv(m));
            std::ifstream f(paths.table1_csv(m));
            std::string line;
            std::getline(f, line);
            t1 << upper(m) << ":";
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                const auto cells = split_csv_line(line);
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", round_half_up(std::stod(cells[3]), 2));
                t1 << "  " << cells[2] << " " << buf;
            }
            t1 << "\n";
        }
        write_text_file(paths.report_table(1), t1.str());
        rec.output(paths.report_table(1));
    }

    // Table 2: cross-method cells plus the ensemble columns; the relative
    // gain column is recomputed from the table's own cells and must agree.
    {
        require_fresh(cross_manifest, paths.cross_csv());
        require_fresh(ens_manifest, paths.ensemble_table_csv());
        rec.input(paths.cross_csv());
        rec.input(paths.ensemble_table_csv());

        std::ifstream fc(paths.cross_csv());
        std::string line;
        std::getline(fc, line);
        const auto header = split_csv_line(line);
        std::map<std::string, std::vector<double>> cross_rows;
        std::vector<std::string> row_order;
        while (std::getline(fc, line)) {
            const auto cells = split_csv_line(line);
            if (cells.empty() || cells[0] == "avg" || cells[0] == "stddev") continue;
            std::vector<double> vals;
            for (size_t i = 1; i < cells.size(); ++i) vals.push_back(std::stod(cells[i]));
            cross_rows[cells[0]] = vals;
            row_order.push_back(cells[0]);
        }

        std::map<std::string, std::vector<std::string>> ens_rows;
        std::ifstream fe(paths.ensemble_table_csv());
        std::getline(fe, line);
        while (std::getline(fe, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            ens_rows[cells[0]] = cells;
        }

        std::ostringstream t2;
        t2 << "Balanced accuracy (%), individual classifiers vs ensemble strategies\n\n";
        t2 << "method";
        for (size_t i = 1; i < header.size(); ++i) t2 << "  " << header[i];
        t2 << "  | UMDA_acc  UMDA_#C  MV_acc  MV_#C  RelGain\n";
        char buf[32];
        auto f2 = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.2f", round_half_up(v, 2));
            return std::string(buf);
        };
        for (const auto& row : row_order) {
            const auto& ens = ens_rows.at(row);
            t2 << upper(row);
            double best = 0;
            for (const double v : cross_rows.at(row)) {
                t2 << "  " << f2(v);
                best = std::max(best, v);
            }
            const double umda_acc = std::stod(ens[1]);
            const double stored_gain = std::stod(ens[6]);
            const double recomputed = relative_gain(umda_acc, best);
            if (std::abs(recomputed - stored_gain) > 1e-9)
                throw Error("report: relative gain mismatch for " + row + " (stored " + ens[6] +
                            ", recomputed " + fmt9(recomputed) + ")");
            t2 << "  | " << f2(umda_acc) << "  " << ens[2] << "  " << f2(std::stod(ens[3]))
               << "  " << ens[4];
            std::snprintf(buf, sizeof buf, "%.1f", recomputed);
            t2 << "  " << buf << "\n";
        }
        write_text_file(paths.report_table(2), t2.str());
        rec.output(paths.report_table(2));
    }

    // Table 3: per-method top CI classifiers and the method CS values.
    {
        require_fresh(ens_manifest, paths.table3_csv());
        rec.input(paths.table3_csv());
        std::ifstream f(paths.table3_csv());
        std::string line;
        std::getline(f, line);
        struct CiRow {
            std::string id;
            double ci;
        };
        std::map<std::string, std::vector<CiRow>> ci_by_method;
        std::map<std::string, double> cs_by_method;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells[0] == "CI") ci_by_method[cells[2]].push_back({cells[1], std::stod(cells[3])});
            else if (cells[0] == "CS") cs_by_method[cells[2]] = std::stod(cells[3]);
        }
        std::ostringstream t3;
        t3 << "Selection probabilities (%) from the per-target UMDA ensembles\n\n";
        for (const auto& m : config.methods) {
            auto rows = ci_by_method[m];
            std::stable_sort(rows.begin(), rows.end(),
                             [](const CiRow& a, const CiRow& b) { return a.ci > b.ci; });
            t3 << upper(m) << "  CS=" << cs_by_method[m] << "  top:";
            for (size_t i = 0; i < rows.size() && i < 3; ++i)
                t3 << "  " << rows[i].id << " CI=" << rows[i].ci;
            t3 << "\n";
        }
        write_text_file(paths.report_table(3), t3.str());
        rec.output(paths.report_table(3));
    }

    // COR heat map from the diversity CSV.
    {
        require_fresh(div_manifest, paths.cor_csv());
        rec.input(paths.cor_csv());
        std::ifstream f(paths.cor_csv());
        std::string line;
        std::getline(f, line);
        auto ids = split_csv_line(line);
        ids.erase(ids.begin());
        CorMatrix cm;
        cm.ids = ids;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            std::vector<std::optional<double>> row;
            for (size_t i = 1; i < cells.size(); ++i) {
                if (cells[i] == "NA") row.push_back(std::nullopt);
                else row.push_back(std::stod(cells[i]));
            }
            cm.value.push_back(std::move(row));
        }
        ensure_parent_dir(paths.report_heatmap());
        write_cor_heatmap_ppm(paths.report_heatmap(), cm);
        rec.output(paths.report_heatmap());
    }
    rec.finish();
}

void run_all(const PipelineConfig& config) {
    cmd_segment(config);
    cmd_features(config);
    cmd_dataset(config);
    cmd_train(config);
    cmd_crosseval(config);
    cmd_diversity(config);
    cmd_ensemble(config);
    cmd_report(config);
}

uint64_t artifact_tree_digest(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());

    uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& path : files) {
        const std::string rel = fs::relative(path, dir).string();
        h = fnv1a64(rel.data(), rel.size(), h);
        std::string bytes = read_text_file(path);
        const bool sidecar = rel.size() >= 12 && rel.ends_with(".sidecar.txt");
        const bool manifest = rel.starts_with("manifests/") && rel.ends_with(".json");
        if (sidecar || manifest) {
            std::istringstream in(bytes);
            std::string line, kept;
            while (std::getline(in, line)) {
                if (sidecar && line.rfind("wall_ms=", 0) == 0) continue;
                if (manifest && line.find("\"elapsed_ms\"") != std::string::npos) continue;
                kept += line;
                kept += '\n';
            }
            bytes = std::move(kept);
        }
        h = fnv1a64(bytes.data(), bytes.size(), h);
    }
    return h;
}

}  // namespace spx
