#include "spx/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spx/error.hpp"

namespace spx {

namespace {

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::string PipelineConfig::expand_path(const std::string& pattern, int area) const {
    std::string out = pattern;
    const std::string token = "{A}";
    const auto pos = out.find(token);
    if (pos != std::string::npos) out.replace(pos, token.size(), std::to_string(area));
    return out;
}

PipelineConfig parse_config_text(const std::string& text, const std::string& path) {
    PipelineConfig c;
    c.raw_text = text;
    c.path = path;

    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool seen_seed = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config:" + std::to_string(lineno) + ": expected key=value, got: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (kv.count(key)) throw Error("config: duplicate key " + key);
        kv[key] = value;
        if (key == "seed") seen_seed = true;
    }
    if (!seen_seed) throw Error("config: missing required key 'seed'");

    auto take = [&](const std::string& key, const std::string& fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_required = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw Error("config: missing required key '" + key + "'");
        const std::string v = it->second;
        kv.erase(it);
        return v;
    };

    c.seed = std::stoull(take_required("seed"));
    for (const auto& a : split_list(take_required("areas"))) c.areas.push_back(std::stoi(a));
    c.raster_pattern = take_required("paths.raster");
    c.labels_pattern = take_required("paths.labels");
    c.mask_pattern = take_required("paths.mask");
    c.output_dir = take_required("paths.output");

    c.methods = split_list(take("superpixel.methods", "crs,ergc,etps,rss,slic"));
    c.superpixel.k_target = std::stoi(take("superpixel.k_target", "6000"));
    c.superpixel.compactness = std::stod(take("superpixel.compactness", "0.2"));
    c.superpixel.iterations = std::stoi(take("superpixel.iterations", "10"));
    c.superpixel.min_size = std::stoi(take("superpixel.min_size", "0"));

    c.feature_bands = split_list(take("features.bands", "B6,B4,B3,B1"));
    c.feature_levels = std::stoi(take("features.levels", "64"));

    c.dataset_min_pixels = std::stoll(take("dataset.min_pixels", "70"));
    c.dataset_min_homog = std::stod(take("dataset.min_homog", "0.70"));
    c.dataset_n_pure = std::stoi(take("dataset.n_pure", "45"));
    c.dataset_n_mixed = std::stoi(take("dataset.n_mixed", "45"));

    c.cv_folds = std::stoi(take("learners.cv_folds", "5"));
    c.tune_budget = std::stoi(take("learners.tune_budget", "20"));
    c.top_k_models = std::stoi(take("learners.top_k", "5"));

    c.umda.population = std::stoi(take("ensemble.population", "50"));
    c.umda.elite_fraction = std::stod(take("ensemble.elite_fraction", "0.2"));
    c.umda.iterations = std::stoi(take("ensemble.iterations", "100"));
    c.umda.clamp = std::stod(take("ensemble.clamp", "0.02"));
    c.ensemble_runs = std::stoi(take("ensemble.runs", "5"));
    c.validation_fraction = std::stod(take("ensemble.validation_fraction", "0.25"));

    // Hyperparameter grid lines: "<algo>.<param> = <range>", algo lowercase
    // (lr.C = log-uniform 0.01..100, dt.max_depth = {2..16}, ...).
    for (auto it = kv.begin(); it != kv.end();) {
        const auto dot = it->first.find('.');
        bool consumed = false;
        if (dot != std::string::npos) {
            std::string algo = it->first.substr(0, dot);
            for (auto& ch : algo) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            bool known = false;
            for (const Algo a : all_algos()) known |= algo_name(a) == algo;
            if (known) {
                c.grids[algo][it->first.substr(dot + 1)] = parse_param_range(it->second);
                it = kv.erase(it);
                consumed = true;
            }
        }
        if (!consumed) ++it;
    }
    if (!kv.empty()) throw Error("config: unknown key '" + kv.begin()->first + "'");
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_config_text(text, path);
}

void validate_config(const PipelineConfig& c) {
    if (c.areas.empty()) throw Error("config: no areas listed");
    if (c.methods.empty()) throw Error("config: no superpixel methods listed");
    for (const auto& m : c.methods) superpixel_variant_note(m);  // rejects unknown names
    if (c.feature_levels < 2) throw Error("config: features.levels must be >= 2");
    if (c.feature_bands.empty()) throw Error("config: features.bands empty");
    if (c.cv_folds < 2) throw Error("config: learners.cv_folds must be >= 2");
    if (c.top_k_models < 1) throw Error("config: learners.top_k must be >= 1");
    if (c.tune_budget < 0) throw Error("config: learners.tune_budget must be >= 0");
    if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0))
        throw Error("config: ensemble.validation_fraction must lie in (0,1)");
    if (c.ensemble_runs < 1) throw Error("config: ensemble.runs must be >= 1");
    c.umda.validate();
    for (const int a : c.areas)
        for (const auto* pattern : {&c.raster_pattern, &c.labels_pattern, &c.mask_pattern}) {
            const std::string p = c.expand_path(*pattern, a);
            if (!std::filesystem::exists(p)) throw Error("config: referenced file missing: " + p);
        }
}

std::string default_config_text(int areas, int k_target, uint64_t seed,
                                const std::string& data_dir, const std::string& out_dir,
                                int n_pure, int n_mixed) {
    std::ostringstream out;
    out << "# spxpipe pipeline configuration\n"
        << "seed = " << seed << "\n"
        << "areas = ";
    for (int a = 1; a <= areas; ++a) out << (a > 1 ? "," : "") << a;
    out << "\n"
        << "paths.raster = " << data_dir << "/area{A}.hdr\n"
        << "paths.labels = " << data_dir << "/area{A}_labels.hdr\n"
        << "paths.mask = " << data_dir << "/area{A}_mask.hdr\n"
        << "paths.output = " << out_dir << "\n"
        << "\n"
        << "superpixel.methods = crs,ergc,etps,rss,slic\n"
        << "superpixel.k_target = " << k_target << "\n"
        << "superpixel.compactness = 0.2\n"
        << "superpixel.iterations = 10\n"
        << "superpixel.min_size = 0\n"
        << "\n"
        << "features.bands = B1,B2\n"
        << "features.levels = 32\n"
        << "\n"
        << "dataset.min_pixels = 70\n"
        << "dataset.min_homog = 0.70\n"
        << "dataset.n_pure = " << n_pure << "\n"
        << "dataset.n_mixed = " << n_mixed << "\n"
        << "\n"
        << "learners.cv_folds = 5\n"
        << "learners.tune_budget = 15\n"
        << "learners.top_k = 5\n"
        << "\n"
        << "ensemble.population = 50\n"
        << "ensemble.elite_fraction = 0.2\n"
        << "ensemble.iterations = 100\n"
        << "ensemble.clamp = 0.02\n"
        << "ensemble.runs = 5\n"
        << "ensemble.validation_fraction = 0.25\n"
        << "\n"
        << "rc.alpha = log-uniform 0.01..100\n"
        << "lr.C = log-uniform 0.01..100\n"
        << "sgd.alpha = log-uniform 0.00001..0.01\n"
        << "dt.max_depth = {2..16}\n"
        << "knn.k = {1,3,5,7,9}\n"
        << "rf.n_trees = {50,100,200}\n"
        << "rf.max_depth = {4..16}\n"
        << "et.n_trees = {50,100,200}\n"
        << "et.max_depth = {4..16}\n"
        << "gbc.n_trees = {50,100,200}\n"
        << "gbc.learning_rate = {0.05,0.1,0.3}\n"
        << "gbc.max_depth = {2,3,4}\n";
    return out.str();
}

}  // namespace spx
