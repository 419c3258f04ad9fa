#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spx {

// Predictions of C classifiers on one sample set, plus the truth.
struct PredictionMatrix {
    int n_samples = 0;
    std::vector<std::string> classifiers;        // unique ids, e.g. "RC/CRS"
    std::vector<std::vector<int>> predictions;   // [classifier][sample], 0/1
    std::vector<int> truth;                      // 0/1

    int n_classifiers() const { return static_cast<int>(classifiers.size()); }
    void validate() const;
};

void save_prediction_matrix(const std::string& path, const PredictionMatrix& p);
PredictionMatrix load_prediction_matrix(const std::string& path);

// Correlation diversity of two prediction columns over the truth:
// (ad - bc) / sqrt((a+b)(c+d)(a+c)(b+d)) with a = both correct, b = only cj
// correct, c = only ci correct, d = both wrong (fractions of samples).
// nullopt when any marginal factor vanishes (a perfect or all-wrong column).
std::optional<double> cor_pair(const std::vector<int>& ci, const std::vector<int>& cj,
                               const std::vector<int>& truth);

struct CorMatrix {
    std::vector<std::string> ids;
    std::vector<std::vector<std::optional<double>>> value;  // symmetric
};

CorMatrix cor_matrix(const PredictionMatrix& p);
std::string cor_matrix_csv(const CorMatrix& m);
// Diverging blue-white-red cells, gray for undefined entries. Plain PPM (P6).
void write_cor_heatmap_ppm(const std::string& path, const CorMatrix& m, int cell_px = 16);

// Per-sample fused label over the included classifiers; ties go to the
// positive (deforestation) class. Throws Error on an empty subset.
std::vector<int> majority_vote(const PredictionMatrix& p, const std::vector<uint8_t>& include);

struct UmdaParams {
    int population = 50;
    double elite_fraction = 0.2;
    int iterations = 100;
    uint64_t seed = 0;
    double clamp = 0.02;  // marginal clamp into [clamp, 1-clamp]

    void validate() const;
};

struct EnsembleSelection {
    std::vector<uint8_t> include;  // at least one set
    double fitness = 0;            // balanced accuracy % of the fused predictions
    std::vector<double> trace;     // best-ever fitness per iteration, nondecreasing
};

// Binary-chromosome UMDA over classifier inclusion. Marginals start at 0.5;
// each generation samples `population` vectors (individual i of generation g
// draws from Rng(derive_seed(seed, g, i)), resampling all-zero vectors),
// scores them by balanced accuracy of the majority vote on this matrix,
// and re-estimates each marginal as the elite inclusion frequency clamped
// into [clamp, 1-clamp]. The best-ever individual is preserved and returned.
// Generation scoring runs in parallel; results are independent of the job
// count. Throws Error when the truth lacks a class.
EnsembleSelection umda_select(const PredictionMatrix& p, const UmdaParams& params);

namespace reference {
// Plain serial re-implementation kept for kernel-equality tests and the
// benchmark.
EnsembleSelection umda_select(const PredictionMatrix& p, const UmdaParams& params);
}  // namespace reference

// Table-3 style analytics over R selection runs. CI: percent of runs
// including each classifier. CS: percent mean over runs of the included
// fraction of each method's classifiers.
struct SelectionProbabilities {
    std::vector<std::string> ids;
    std::vector<double> ci;                 // aligned with ids
    std::map<std::string, double> cs;       // per method
};

SelectionProbabilities selection_probabilities(
    const std::vector<EnsembleSelection>& runs, const std::vector<std::string>& ids,
    const std::map<std::string, std::string>& method_of_id, int runs_count);

}  // namespace spx
