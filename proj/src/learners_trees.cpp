#include <algorithm>
#include <cmath>
#include <numeric>

#include "spx/error.hpp"
#include "learners_internal.hpp"

namespace spx::detail {

namespace {

struct SplitResult {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double gain = 0;  // variance reduction, weighted
};

struct BuildCtx {
    const std::vector<double>& x;
    int d;
    const std::vector<double>& y;
    const CartOptions& opt;
    TreeModel* tree;
};

double node_value(const BuildCtx& ctx, const std::vector<int>& rows) {
    if (ctx.opt.hessian) {
        double num = 0, den = 0;
        for (const int r : rows) {
            num += ctx.y[r];
            den += (*ctx.opt.hessian)[r];
        }
        return num / std::max(den, 1e-12);
    }
    double s = 0;
    for (const int r : rows) s += ctx.y[r];
    return s / static_cast<double>(rows.size());
}

// Exhaustive scan over sorted values of one feature; thresholds at midpoints
// between distinct consecutive values.
void best_split_for_feature(const BuildCtx& ctx, const std::vector<int>& rows, int feature,
                            SplitResult& best) {
    std::vector<std::pair<double, int>> vals;
    vals.reserve(rows.size());
    for (const int r : rows)
        vals.emplace_back(ctx.x[static_cast<size_t>(r) * ctx.d + feature], r);
    std::stable_sort(vals.begin(), vals.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    double total = 0, total_sq = 0;
    for (const int r : rows) {
        total += ctx.y[r];
        total_sq += ctx.y[r] * ctx.y[r];
    }
    const auto n = static_cast<double>(rows.size());
    const double parent_ss = total_sq - total * total / n;

    double left = 0, left_sq = 0;
    const int min_leaf = std::max(1, ctx.opt.min_leaf);
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
        const double yv = ctx.y[vals[i].second];
        left += yv;
        left_sq += yv * yv;
        if (vals[i].first == vals[i + 1].first) continue;  // no boundary here
        const auto nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right = total - left, right_sq = total_sq - left_sq;
        const double child_ss =
            (left_sq - left * left / nl) + (right_sq - right * right / nr);
        const double gain = parent_ss - child_ss;
        const double threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        if (gain > best.gain ||
            (gain == best.gain && best.found &&
             (feature < best.feature || (feature == best.feature && threshold < best.threshold)))) {
            if (gain > 1e-12) {
                best.found = true;
                best.feature = feature;
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
}

// Extra-trees style: a single uniformly drawn threshold for the feature.
void random_split_for_feature(const BuildCtx& ctx, const std::vector<int>& rows, int feature,
                              Rng& rng, SplitResult& best) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const int r : rows) {
        const double v = ctx.x[static_cast<size_t>(r) * ctx.d + feature];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) return;
    const double threshold = rng.next_uniform(lo, hi);

    double total = 0, total_sq = 0, left = 0, left_sq = 0;
    double nl = 0;
    for (const int r : rows) {
        const double yv = ctx.y[r];
        total += yv;
        total_sq += yv * yv;
        if (ctx.x[static_cast<size_t>(r) * ctx.d + feature] <= threshold) {
            left += yv;
            left_sq += yv * yv;
            ++nl;
        }
    }
    const auto n = static_cast<double>(rows.size());
    const double nr = n - nl;
    const int min_leaf = std::max(1, ctx.opt.min_leaf);
    if (nl < min_leaf || nr < min_leaf) return;
    const double parent_ss = total_sq - total * total / n;
    const double child_ss = (left_sq - left * left / nl) + (total_sq - left_sq - (total - left) * (total - left) / nr);
    const double gain = parent_ss - child_ss;
    if (gain > best.gain && gain > 1e-12) {
        best.found = true;
        best.feature = feature;
        best.threshold = threshold;
        best.gain = gain;
    }
}

int build_node(const BuildCtx& ctx, const std::vector<int>& rows, int depth) {
    auto& nodes = ctx.tree->nodes;

    bool pure = true;
    for (size_t i = 1; i < rows.size() && pure; ++i) pure = ctx.y[rows[i]] == ctx.y[rows[0]];

    if (pure || depth >= ctx.opt.max_depth ||
        static_cast<int>(rows.size()) < std::max(2, ctx.opt.min_split)) {
        nodes.push_back({-1, 0, -1, -1, node_value(ctx, rows)});
        return static_cast<int>(nodes.size()) - 1;
    }

    SplitResult best;
    if (ctx.opt.mtry > 0 || ctx.opt.random_threshold) {
        // feature subset drawn without replacement
        std::vector<int> feats(ctx.d);
        std::iota(feats.begin(), feats.end(), 0);
        const int mtry = ctx.opt.mtry > 0 ? std::min(ctx.opt.mtry, ctx.d) : ctx.d;
        for (int i = 0; i < mtry; ++i) {
            const auto j = i + static_cast<int>(ctx.opt.rng->next_below(ctx.d - i));
            std::swap(feats[i], feats[j]);
        }
        feats.resize(mtry);
        std::sort(feats.begin(), feats.end());
        for (const int f : feats) {
            if (ctx.opt.random_threshold)
                random_split_for_feature(ctx, rows, f, *ctx.opt.rng, best);
            else
                best_split_for_feature(ctx, rows, f, best);
        }
    } else {
        for (int f = 0; f < ctx.d; ++f) best_split_for_feature(ctx, rows, f, best);
    }

    if (!best.found) {
        nodes.push_back({-1, 0, -1, -1, node_value(ctx, rows)});
        return static_cast<int>(nodes.size()) - 1;
    }

    std::vector<int> left_rows, right_rows;
    for (const int r : rows)
        (ctx.x[static_cast<size_t>(r) * ctx.d + best.feature] <= best.threshold ? left_rows
                                                                                : right_rows)
            .push_back(r);

    const int self = static_cast<int>(nodes.size());
    nodes.push_back({best.feature, best.threshold, -1, -1, 0});
    const int left = build_node(ctx, left_rows, depth + 1);
    const int right = build_node(ctx, right_rows, depth + 1);
    nodes[self].left = left;
    nodes[self].right = right;
    return self;
}

}  // namespace

TreeModel build_cart(const std::vector<double>& x, int n, int d, const std::vector<double>& y,
                     const std::vector<int>& rows, const CartOptions& opt) {
    if (rows.empty()) throw Error("cart: no rows");
    (void)n;
    TreeModel tree;
    BuildCtx ctx{x, d, y, opt, &tree};
    build_node(ctx, rows, 0);
    return tree;
}

TrainedModel fit_dt(const ClassifierSpec& spec, const TrainingTable& t) {
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    std::vector<double> y(t.labels.begin(), t.labels.end());
    std::vector<int> rows(t.n);
    std::iota(rows.begin(), rows.end(), 0);

    CartOptions opt;
    opt.max_depth = static_cast<int>(hyper_or(spec, "max_depth", 8));
    opt.min_leaf = static_cast<int>(hyper_or(spec, "min_leaf", 1));

    TrainedModel m;
    m.spec = spec;
    m.dims = t.d;
    m.standardization = st;
    m.payload = build_cart(x, t.n, t.d, y, rows, opt);
    return m;
}

namespace {

TrainedModel fit_forest(const ClassifierSpec& spec, const TrainingTable& t, bool extra_trees) {
    const int n_trees = static_cast<int>(hyper_or(spec, "n_trees", 100));
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    std::vector<double> y(t.labels.begin(), t.labels.end());

    CartOptions opt;
    opt.max_depth = static_cast<int>(hyper_or(spec, "max_depth", 12));
    opt.min_leaf = static_cast<int>(hyper_or(spec, "min_leaf", 1));
    const int mtry_hyper = static_cast<int>(hyper_or(spec, "mtry", 0));
    opt.mtry = mtry_hyper > 0 ? mtry_hyper
                              : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(t.d))));
    opt.random_threshold = extra_trees;

    ForestModel forest;
    for (int tree = 0; tree < n_trees; ++tree) {
        Rng rng(derive_seed(spec.seed, static_cast<uint64_t>(tree)));
        opt.rng = &rng;
        std::vector<int> rows;
        if (extra_trees) {
            rows.resize(t.n);  // full sample, no bootstrap
            std::iota(rows.begin(), rows.end(), 0);
        } else {
            rows.reserve(t.n);
            for (int i = 0; i < t.n; ++i)
                rows.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(t.n))));
        }
        forest.trees.push_back(build_cart(x, t.n, t.d, y, rows, opt));
    }

    TrainedModel m;
    m.spec = spec;
    m.dims = t.d;
    m.standardization = st;
    m.payload = std::move(forest);
    return m;
}

}  // namespace

TrainedModel fit_rf(const ClassifierSpec& spec, const TrainingTable& t) {
    return fit_forest(spec, t, false);
}

TrainedModel fit_et(const ClassifierSpec& spec, const TrainingTable& t) {
    return fit_forest(spec, t, true);
}

// Gradient boosting on the logistic loss: depth-limited regression trees fit
// the residuals y - p, leaves take the Newton step, shrinkage applied per
// stage.
TrainedModel fit_gbc(const ClassifierSpec& spec, const TrainingTable& t) {
    const int n_trees = static_cast<int>(hyper_or(spec, "n_trees", 100));
    const double lr = hyper_or(spec, "learning_rate", 0.1);
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);

    CartOptions opt;
    opt.max_depth = static_cast<int>(hyper_or(spec, "max_depth", 3));
    opt.min_leaf = static_cast<int>(hyper_or(spec, "min_leaf", 1));

    int64_t npos = 0;
    for (const int l : t.labels) npos += l;
    const double p0 = std::clamp(static_cast<double>(npos) / t.n, 1e-9, 1.0 - 1e-9);

    GbcModel model;
    model.f0 = std::log(p0 / (1.0 - p0));
    model.learning_rate = lr;

    std::vector<double> f(t.n, model.f0);
    std::vector<double> residual(t.n), hess(t.n);
    std::vector<int> rows(t.n);
    std::iota(rows.begin(), rows.end(), 0);
    opt.hessian = &hess;

    for (int stage = 0; stage < n_trees; ++stage) {
        for (int i = 0; i < t.n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-f[i]));
            residual[i] = static_cast<double>(t.labels[i]) - p;
            hess[i] = std::max(p * (1.0 - p), 1e-12);
        }
        TreeModel tree = build_cart(x, t.n, t.d, residual, rows, opt);
        for (int i = 0; i < t.n; ++i)
            f[i] += lr * tree.predict(x.data() + static_cast<size_t>(i) * t.d);
        model.trees.push_back(std::move(tree));
    }

    TrainedModel m;
    m.spec = spec;
    m.dims = t.d;
    m.standardization = st;
    m.payload = std::move(model);
    return m;
}

}  // namespace spx::detail
