#pragma once

#include <vector>

#include "spx/learners.hpp"
#include "spx/rng.hpp"

namespace spx::detail {

// Small dense symmetric solvers; dimensions are tiny (feature count + 1).
// Returns false when the matrix is not positive definite.
bool cholesky_factor(std::vector<double>& a, int n, double* logdet);
void cholesky_solve(const std::vector<double>& chol, int n, std::vector<double>& b);
bool spd_solve(std::vector<double> a, int n, std::vector<double> b, std::vector<double>& x);
bool spd_inverse(std::vector<double> a, int n, std::vector<double>& inv, double* logdet);

// Standardized design matrix of a table.
std::vector<double> standardized_matrix(const TrainingTable& t, const Standardization& s);

TrainedModel fit_rc(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_lr(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_lda(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_qda(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_gnb(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_sgd(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_dt(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_knn(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_rf(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_et(const ClassifierSpec&, const TrainingTable&);
TrainedModel fit_gbc(const ClassifierSpec&, const TrainingTable&);

// Variance-reduction CART shared by DT, RF, ET and GBC. For 0/1 targets the
// split ordering matches Gini exactly (gini = 2 * variance).
struct CartOptions {
    int max_depth = 8;
    int min_leaf = 1;
    int min_split = 2;
    int mtry = 0;            // 0: consider all features
    bool random_threshold = false;  // extra-trees style splits
    Rng* rng = nullptr;      // required when mtry > 0 or random_threshold
    const std::vector<double>* hessian = nullptr;  // GBC leaf Newton steps
};

TreeModel build_cart(const std::vector<double>& x, int n, int d, const std::vector<double>& y,
                     const std::vector<int>& rows, const CartOptions& opt);

}  // namespace spx::detail
