#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spx/metrics.hpp"

namespace spx {

// The classifier zoo. Eleven natively implemented algorithms covering the
// families that dominate the ranking tables.
enum class Algo { RC, LR, LDA, QDA, GNB, SGD, DT, KNN, RF, ET, GBC };

const std::vector<Algo>& all_algos();
std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

struct ClassifierSpec {
    Algo algo = Algo::RC;
    std::map<std::string, double> hyper;  // name -> value, within the declared grids
    uint64_t seed = 0;
};

double hyper_or(const ClassifierSpec& spec, const std::string& name, double fallback);

// Feature matrix with binary labels. Standardization statistics are fitted
// on training rows only and travel with every trained model.
struct TrainingTable {
    int n = 0, d = 0;
    std::vector<double> features;  // n x d row-major
    std::vector<int> labels;       // 0/1

    const double* row(int i) const { return features.data() + static_cast<int64_t>(i) * d; }
    void validate() const;  // finite features, both classes present
    TrainingTable subset(const std::vector<int>& rows) const;
};

struct Standardization {
    std::vector<double> mean, stddev;  // stddev floored at 1e-12
};
Standardization fit_standardization(const TrainingTable& t);
std::vector<double> standardize(const Standardization& s, const double* row, int d);

// ---- fitted model payloads

struct LinearModel {
    std::vector<double> w;
    double b = 0;
    bool logistic = false;  // score through a sigmoid
};
struct LdaModel {
    std::vector<double> w;
    double b = 0;
};
struct QdaModel {
    // per class: precision matrix (d x d), mean, log det, log prior
    std::vector<double> prec[2], mean[2];
    double logdet[2] = {0, 0}, logprior[2] = {0, 0};
};
struct GnbModel {
    std::vector<double> mean[2], var[2];
    double logprior[2] = {0, 0};
};
struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0;
    int left = -1, right = -1;
    double value = 0;  // leaf: positive-class fraction (or residual step for GBC)
};
struct TreeModel {
    std::vector<TreeNode> nodes;
    double predict(const double* x) const;
};
struct KnnModel {
    int k = 5;
    int n = 0;
    int d = 0;
    std::vector<double> x;  // standardized exemplars, n x d
    std::vector<int> y;
};
struct ForestModel {
    std::vector<TreeModel> trees;
};
struct GbcModel {
    double f0 = 0;
    double learning_rate = 0.1;
    std::vector<TreeModel> trees;
};

using ModelPayload =
    std::variant<LinearModel, LdaModel, QdaModel, GnbModel, TreeModel, KnnModel, ForestModel,
                 GbcModel>;

struct TrainedModel {
    ClassifierSpec spec;
    int dims = 0;
    Standardization standardization;
    ModelPayload payload;
};

// Algorithm-specific training on the standardized table. Deterministic given
// spec.seed. Throws Error on degenerate inputs (single-class table, singular
// covariance after regularization).
TrainedModel fit(const ClassifierSpec& spec, const TrainingTable& table);

struct Prediction {
    std::vector<int> labels;
    std::vector<double> scores;  // monotone in class-1 confidence
};

// Throws Error when the column count differs from the model's.
Prediction predict(const TrainedModel& model, const std::vector<double>& features, int n, int d);
Prediction predict(const TrainedModel& model, const TrainingTable& table);

// ---- cross-validation, ranking, tuning

struct FoldMetrics {
    MetricSuite metrics;
    double train_seconds = 0;
};
struct CVReport {
    std::vector<FoldMetrics> folds;
    MetricSuite mean;  // arithmetic mean over folds
    double mean_train_seconds = 0;
};

// Stratified fold assignment, the documented shuffle rule: per class, row
// indices ascending are Fisher-Yates-shuffled with Rng(derive_seed(seed,
// class)) and dealt round-robin into folds 0..k-1.
std::vector<int> stratified_folds(const std::vector<int>& labels, int k, uint64_t seed);

CVReport cross_validate(const ClassifierSpec& spec, const TrainingTable& table, int k,
                        uint64_t seed);

struct RankEntry {
    ClassifierSpec spec;
    CVReport report;
    bool ok = true;
    std::string error;  // when ok == false
};
// Descending mean CV accuracy; ties by balanced accuracy, then F1, then
// name. Failed fits rank last. Model fits run in parallel across specs.
std::vector<RankEntry> rank_models(const std::vector<ClassifierSpec>& specs,
                                   const TrainingTable& table, int k, uint64_t seed);

std::vector<RankEntry> top_k(const std::vector<RankEntry>& ranking, int k = 5);

// ---- hyperparameter grids

struct ParamRange {
    enum class Kind { log_uniform, int_range, choice } kind = Kind::choice;
    double lo = 0, hi = 0;             // log_uniform / int_range bounds
    std::vector<double> choices;       // choice
    double sample(uint64_t seed) const;
};
using HyperGrid = std::map<std::string, ParamRange>;

// Declared default grids (also written into the default config):
//   rc.alpha = log-uniform 0.01..100, lr.C = log-uniform 0.01..100,
//   sgd.alpha = log-uniform 0.00001..0.01, dt.max_depth = {2..16},
//   knn.k = {1,3,5,7,9}, rf.n_trees = {50,100,200}, rf.max_depth = {4..16},
//   et.n_trees = {50,100,200}, et.max_depth = {4..16},
//   gbc.n_trees = {50,100,200}, gbc.learning_rate = {0.05,0.1,0.3},
//   gbc.max_depth = {2,3,4}
HyperGrid default_grid(Algo a);
// Parses "log-uniform 0.01..100", "{2..16}", "{1,3,5,7,9}".
ParamRange parse_param_range(const std::string& text);
std::string param_range_to_string(const ParamRange& r);

// Seeded random search over the grid; returns the candidate with the best
// mean CV balanced accuracy on folds shared with the input spec, never worse
// than the input. budget 0 returns the spec unchanged.
ClassifierSpec tune(const ClassifierSpec& spec, const TrainingTable& table, int budget,
                    uint64_t seed, const HyperGrid* grid = nullptr);

// The default eleven-spec zoo with per-algorithm derived seeds.
std::vector<ClassifierSpec> default_zoo(uint64_t seed);

// ---- persistence: versioned binary blob + text manifest

void save_model(const std::string& path_base, const TrainedModel& model,
                uint64_t train_set_hash);
TrainedModel load_model(const std::string& path_base);

}  // namespace spx
