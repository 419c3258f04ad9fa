#include "spx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "spx/error.hpp"

namespace spx {

Confusion confusion_from(const std::vector<int>& truth, const std::vector<int>& pred) {
    if (truth.size() != pred.size()) throw Error("confusion: size mismatch");
    if (truth.empty()) throw Error("confusion: empty input");
    Confusion c;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1) {
            ++(pred[i] == 1 ? c.tp : c.fn);
        } else {
            ++(pred[i] == 1 ? c.fp : c.tn);
        }
    }
    return c;
}

double balanced_accuracy(const Confusion& c) {
    if (c.tp + c.fn == 0 || c.tn + c.fp == 0)
        throw Error("balanced_accuracy: a class is absent from the truth");
    const double sens = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double spec = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return 100.0 * (sens + spec) / 2.0;
}

double auc_score(const std::vector<int>& truth, const std::vector<double>& scores) {
    if (truth.size() != scores.size()) throw Error("auc: size mismatch");
    const auto n = truth.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // mid-rank assignment over tied scores
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }

    int64_t npos = 0;
    double rank_sum = 0;
    for (size_t t = 0; t < n; ++t)
        if (truth[t] == 1) {
            ++npos;
            rank_sum += rank[t];
        }
    const int64_t nneg = static_cast<int64_t>(n) - npos;
    if (npos == 0 || nneg == 0) throw Error("auc: a class is absent from the truth");
    return (rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0) /
           (static_cast<double>(npos) * static_cast<double>(nneg));
}

MetricSuite metric_suite(const std::vector<int>& truth, const std::vector<int>& pred,
                         const std::vector<double>* scores) {
    const Confusion c = confusion_from(truth, pred);
    const auto n = static_cast<double>(c.total());
    MetricSuite s;
    s.accuracy = static_cast<double>(c.tp + c.tn) / n;
    s.balanced_accuracy = balanced_accuracy(c) / 100.0;
    s.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    s.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                      : 0.0;

    const double po = s.accuracy;
    const double pe = (static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) +
                       static_cast<double>(c.fn + c.tn) * static_cast<double>(c.fp + c.tn)) /
                      (n * n);
    s.kappa = pe < 1.0 ? (po - pe) / (1.0 - pe) : 0.0;

    const double m1 = static_cast<double>(c.tp + c.fp), m2 = static_cast<double>(c.tp + c.fn);
    const double m3 = static_cast<double>(c.tn + c.fp), m4 = static_cast<double>(c.tn + c.fn);
    if (m1 == 0 || m2 == 0 || m3 == 0 || m4 == 0) {
        s.mcc = 0.0;
    } else {
        s.mcc = (static_cast<double>(c.tp) * static_cast<double>(c.tn) -
                 static_cast<double>(c.fp) * static_cast<double>(c.fn)) /
                std::sqrt(m1 * m2 * m3 * m4);
    }

    if (scores) {
        s.auc = auc_score(truth, *scores);
        s.has_auc = true;
    }
    return s;
}

double round_half_up(double v, int decimals) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    return std::floor(v * scale + 0.5) / scale;
}

double relative_gain(double ensemble_acc, double best_single_acc) {
    if (best_single_acc <= 0) throw Error("relative_gain: nonpositive baseline");
    return round_half_up(100.0 * (ensemble_acc - best_single_acc) / best_single_acc, 1);
}

CrossMethodTable cross_method_table(const std::vector<std::string>& row_methods,
                                    const std::vector<std::string>& col_ids,
                                    const std::vector<std::vector<double>>& cells) {
    if (cells.size() != row_methods.size()) throw Error("cross_method_table: row count mismatch");
    for (const auto& row : cells)
        if (row.size() != col_ids.size()) throw Error("cross_method_table: column count mismatch");
    CrossMethodTable t;
    t.row_methods = row_methods;
    t.col_ids = col_ids;
    t.cells = cells;
    const auto nrow = static_cast<double>(row_methods.size());
    for (size_t c = 0; c < col_ids.size(); ++c) {
        double sum = 0;
        for (const auto& row : cells) sum += row[c];
        const double mean = sum / nrow;
        double ss = 0;
        for (const auto& row : cells) ss += (row[c] - mean) * (row[c] - mean);
        t.col_mean.push_back(mean);
        t.col_std.push_back(nrow > 1 ? std::sqrt(ss / (nrow - 1.0)) : 0.0);
    }
    return t;
}

std::string cross_method_csv(const CrossMethodTable& t) {
    std::ostringstream out;
    out << "method";
    for (const auto& c : t.col_ids) out << "," << c;
    out << "\n";
    char buf[64];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << "," << buf;
    };
    for (size_t r = 0; r < t.row_methods.size(); ++r) {
        out << t.row_methods[r];
        for (const double v : t.cells[r]) cell(v);
        out << "\n";
    }
    out << "avg";
    for (const double v : t.col_mean) cell(v);
    out << "\nstddev";
    for (const double v : t.col_std) cell(v);
    out << "\n";
    return out.str();
}

std::string cross_method_text(const CrossMethodTable& t) {
    std::ostringstream out;
    size_t width = 10;
    for (const auto& c : t.col_ids) width = std::max(width, c.size() + 2);
    auto pad = [&](const std::string& s) {
        out << s;
        for (size_t i = s.size(); i < width; ++i) out << ' ';
    };
    pad("method");
    for (const auto& c : t.col_ids) pad(c);
    out << "\n";
    char buf[64];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", round_half_up(v, 2));
        pad(buf);
    };
    for (size_t r = 0; r < t.row_methods.size(); ++r) {
        pad(t.row_methods[r]);
        for (const double v : t.cells[r]) cell(v);
        out << "\n";
    }
    pad("avg");
    for (const double v : t.col_mean) cell(v);
    out << "\n";
    pad("stddev");
    for (const double v : t.col_std) cell(v);
    out << "\n";
    return out.str();
}

}  // namespace spx
