#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spx {

// Class 1 = deforestation = positive throughout.
struct Confusion {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    int64_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion_from(const std::vector<int>& truth, const std::vector<int>& pred);

// Percent: 100 * (sensitivity + specificity) / 2. Throws Error when either
// class is absent from the truth.
double balanced_accuracy(const Confusion& c);

// Fraction-valued suite (1.0 = perfect). Zero-denominator conventions:
// precision and F1 are 0 without positive predictions, MCC is 0 when any
// marginal is zero, kappa is 0 when chance agreement is 1.
struct MetricSuite {
    double accuracy = 0;
    double balanced_accuracy = 0;
    double auc = 0;
    double recall = 0;
    double precision = 0;
    double f1 = 0;
    double kappa = 0;
    double mcc = 0;
    bool has_auc = false;
};

MetricSuite metric_suite(const std::vector<int>& truth, const std::vector<int>& pred,
                         const std::vector<double>* scores = nullptr);

// Rank-statistic AUC with tied scores sharing mid-ranks.
double auc_score(const std::vector<int>& truth, const std::vector<double>& scores);

// Round half toward +infinity at the given decimal count.
double round_half_up(double v, int decimals);

// Percent relative gain of an ensemble over the best single classifier,
// rounded half-up to 1 decimal. Throws Error on a nonpositive baseline.
double relative_gain(double ensemble_acc, double best_single_acc);

// Cross-method evaluation table: rows are test segmentation methods, columns
// trained classifier/method pairs, cells balanced accuracy in percent.
struct CrossMethodTable {
    std::vector<std::string> row_methods;
    std::vector<std::string> col_ids;
    std::vector<std::vector<double>> cells;  // [row][col]
    std::vector<double> col_mean;
    std::vector<double> col_std;  // sample (n-1) standard deviation
};

// Computes the per-column mean and sample standard deviation rows.
CrossMethodTable cross_method_table(const std::vector<std::string>& row_methods,
                                    const std::vector<std::string>& col_ids,
                                    const std::vector<std::vector<double>>& cells);

// Full-precision CSV; the text report rounds cells half-up to 2 decimals.
std::string cross_method_csv(const CrossMethodTable& t);
std::string cross_method_text(const CrossMethodTable& t);

}  // namespace spx
