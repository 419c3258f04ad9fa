#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spx/error.hpp"
#include "spx/parallel.hpp"
#include "learners_internal.hpp"

namespace spx {

const std::vector<Algo>& all_algos() {
    static const std::vector<Algo> algos{Algo::RC, Algo::LR,  Algo::LDA, Algo::QDA,
                                         Algo::GNB, Algo::SGD, Algo::DT,  Algo::KNN,
                                         Algo::RF,  Algo::ET,  Algo::GBC};
    return algos;
}

std::string algo_name(Algo a) {
    switch (a) {
        case Algo::RC: return "RC";
        case Algo::LR: return "LR";
        case Algo::LDA: return "LDA";
        case Algo::QDA: return "QDA";
        case Algo::GNB: return "GNB";
        case Algo::SGD: return "SGD";
        case Algo::DT: return "DT";
        case Algo::KNN: return "KNN";
        case Algo::RF: return "RF";
        case Algo::ET: return "ET";
        case Algo::GBC: return "GBC";
    }
    throw Error("algo_name: bad enum");
}

Algo algo_from_name(const std::string& name) {
    for (const Algo a : all_algos())
        if (algo_name(a) == name) return a;
    throw Error("unknown classifier algorithm: " + name);
}

double hyper_or(const ClassifierSpec& spec, const std::string& name, double fallback) {
    const auto it = spec.hyper.find(name);
    return it == spec.hyper.end() ? fallback : it->second;
}

void TrainingTable::validate() const {
    if (n < 1 || d < 1) throw Error("table: empty");
    if (features.size() != static_cast<size_t>(n) * d || labels.size() != static_cast<size_t>(n))
        throw Error("table: shape mismatch");
    bool has0 = false, has1 = false;
    for (const int l : labels) {
        if (l == 0) has0 = true;
        else if (l == 1) has1 = true;
        else throw Error("table: labels must be 0/1");
    }
    if (!has0 || !has1) throw Error("table: both classes must be present");
    for (const double v : features)
        if (!std::isfinite(v)) throw Error("table: non-finite feature value");
}

TrainingTable TrainingTable::subset(const std::vector<int>& rows) const {
    TrainingTable t;
    t.n = static_cast<int>(rows.size());
    t.d = d;
    t.features.reserve(static_cast<size_t>(t.n) * d);
    t.labels.reserve(rows.size());
    for (const int r : rows) {
        const double* src = row(r);
        t.features.insert(t.features.end(), src, src + d);
        t.labels.push_back(labels[r]);
    }
    return t;
}

Standardization fit_standardization(const TrainingTable& t) {
    Standardization s;
    s.mean.assign(t.d, 0.0);
    s.stddev.assign(t.d, 0.0);
    for (int i = 0; i < t.n; ++i) {
        const double* r = t.row(i);
        for (int j = 0; j < t.d; ++j) s.mean[j] += r[j];
    }
    for (int j = 0; j < t.d; ++j) s.mean[j] /= t.n;
    for (int i = 0; i < t.n; ++i) {
        const double* r = t.row(i);
        for (int j = 0; j < t.d; ++j) {
            const double dv = r[j] - s.mean[j];
            s.stddev[j] += dv * dv;
        }
    }
    for (int j = 0; j < t.d; ++j) s.stddev[j] = std::max(std::sqrt(s.stddev[j] / t.n), 1e-12);
    return s;
}

std::vector<double> standardize(const Standardization& s, const double* row, int d) {
    std::vector<double> z(d);
    for (int j = 0; j < d; ++j) z[j] = (row[j] - s.mean[j]) / s.stddev[j];
    return z;
}

namespace detail {

std::vector<double> standardized_matrix(const TrainingTable& t, const Standardization& s) {
    std::vector<double> x(static_cast<size_t>(t.n) * t.d);
    for (int i = 0; i < t.n; ++i) {
        const double* r = t.row(i);
        for (int j = 0; j < t.d; ++j)
            x[static_cast<size_t>(i) * t.d + j] = (r[j] - s.mean[j]) / s.stddev[j];
    }
    return x;
}

}  // namespace detail

TrainedModel fit(const ClassifierSpec& spec, const TrainingTable& table) {
    table.validate();
    switch (spec.algo) {
        case Algo::RC: return detail::fit_rc(spec, table);
        case Algo::LR: return detail::fit_lr(spec, table);
        case Algo::LDA: return detail::fit_lda(spec, table);
        case Algo::QDA: return detail::fit_qda(spec, table);
        case Algo::GNB: return detail::fit_gnb(spec, table);
        case Algo::SGD: return detail::fit_sgd(spec, table);
        case Algo::DT: return detail::fit_dt(spec, table);
        case Algo::KNN: return detail::fit_knn(spec, table);
        case Algo::RF: return detail::fit_rf(spec, table);
        case Algo::ET: return detail::fit_et(spec, table);
        case Algo::GBC: return detail::fit_gbc(spec, table);
    }
    throw Error("fit: bad enum");
}

double TreeModel::predict(const double* x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

// score plus the label rule; ties on the decision boundary go positive
std::pair<double, int> score_one(const TrainedModel& model, const double* z) {
    struct Visitor {
        const double* z;
        const TrainedModel& model;
        std::pair<double, int> operator()(const LinearModel& m) const {
            double margin = m.b;
            for (size_t j = 0; j < m.w.size(); ++j) margin += m.w[j] * z[j];
            return {m.logistic ? sigmoid(margin) : margin, margin >= 0 ? 1 : 0};
        }
        std::pair<double, int> operator()(const LdaModel& m) const {
            double margin = m.b;
            for (size_t j = 0; j < m.w.size(); ++j) margin += m.w[j] * z[j];
            return {margin, margin >= 0 ? 1 : 0};
        }
        std::pair<double, int> operator()(const QdaModel& m) const {
            const int d = static_cast<int>(m.mean[0].size());
            double delta[2];
            for (int c = 0; c < 2; ++c) {
                double q = 0;
                for (int a = 0; a < d; ++a) {
                    const double da = z[a] - m.mean[c][a];
                    for (int b = 0; b < d; ++b)
                        q += da * m.prec[c][static_cast<size_t>(a) * d + b] * (z[b] - m.mean[c][b]);
                }
                delta[c] = -0.5 * m.logdet[c] - 0.5 * q + m.logprior[c];
            }
            const double margin = delta[1] - delta[0];
            return {margin, margin >= 0 ? 1 : 0};
        }
        std::pair<double, int> operator()(const GnbModel& m) const {
            const int d = static_cast<int>(m.mean[0].size());
            double delta[2];
            for (int c = 0; c < 2; ++c) {
                double ll = m.logprior[c];
                for (int j = 0; j < d; ++j) {
                    const double dv = z[j] - m.mean[c][j];
                    ll -= 0.5 * (std::log(2.0 * M_PI * m.var[c][j]) + dv * dv / m.var[c][j]);
                }
                delta[c] = ll;
            }
            const double margin = delta[1] - delta[0];
            return {margin, margin >= 0 ? 1 : 0};
        }
        std::pair<double, int> operator()(const TreeModel& m) const {
            const double v = m.predict(z);
            return {v, v >= 0.5 ? 1 : 0};
        }
        std::pair<double, int> operator()(const KnnModel& m) const {
            // (distance, index) selection keeps equal-distance order stable
            std::vector<std::pair<double, int>> dist(m.n);
            for (int i = 0; i < m.n; ++i) {
                double s = 0;
                for (int j = 0; j < m.d; ++j) {
                    const double dv = z[j] - m.x[static_cast<size_t>(i) * m.d + j];
                    s += dv * dv;
                }
                dist[i] = {s, i};
            }
            const int k = std::min(m.k, m.n);
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            int pos = 0;
            for (int i = 0; i < k; ++i) pos += m.y[dist[i].second];
            const double frac = static_cast<double>(pos) / k;
            return {frac, frac >= 0.5 ? 1 : 0};
        }
        std::pair<double, int> operator()(const ForestModel& m) const {
            double s = 0;
            for (const auto& t : m.trees) s += t.predict(z);
            const double frac = s / static_cast<double>(m.trees.size());
            return {frac, frac >= 0.5 ? 1 : 0};
        }
        std::pair<double, int> operator()(const GbcModel& m) const {
            double f = m.f0;
            for (const auto& t : m.trees) f += m.learning_rate * t.predict(z);
            return {sigmoid(f), f >= 0 ? 1 : 0};
        }
    };
    return std::visit(Visitor{z, model}, model.payload);
}

}  // namespace

Prediction predict(const TrainedModel& model, const std::vector<double>& features, int n, int d) {
    if (d != model.dims)
        throw Error("predict: expected " + std::to_string(model.dims) + " columns, got " +
                    std::to_string(d));
    if (features.size() != static_cast<size_t>(n) * d) throw Error("predict: shape mismatch");
    Prediction p;
    p.labels.resize(n);
    p.scores.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto z = standardize(model.standardization, features.data() + static_cast<int64_t>(i) * d, d);
        const auto [score, label] = score_one(model, z.data());
        p.scores[i] = score;
        p.labels[i] = label;
    }
    return p;
}

Prediction predict(const TrainedModel& model, const TrainingTable& table) {
    return predict(model, table.features, table.n, table.d);
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int k, uint64_t seed) {
    if (k < 2) throw Error("stratified_folds: k must be >= 2");
    std::vector<int> fold(labels.size(), -1);
    for (const int cls : {0, 1}) {
        std::vector<int> idx;
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(static_cast<int>(i));
        if (static_cast<int>(idx.size()) < k)
            throw Error("stratified_folds: class " + std::to_string(cls) + " has " +
                        std::to_string(idx.size()) + " samples, fewer than k=" + std::to_string(k));
        Rng rng(derive_seed(seed, static_cast<uint64_t>(cls)));
        shuffle(idx, rng);
        for (size_t i = 0; i < idx.size(); ++i) fold[idx[i]] = static_cast<int>(i % k);
    }
    return fold;
}

CVReport cross_validate(const ClassifierSpec& spec, const TrainingTable& table, int k,
                        uint64_t seed) {
    table.validate();
    const auto fold = stratified_folds(table.labels, k, seed);
    CVReport report;
    for (int f = 0; f < k; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int i = 0; i < table.n; ++i)
            (fold[i] == f ? test_rows : train_rows).push_back(i);
        const TrainingTable train = table.subset(train_rows);
        const TrainingTable test = table.subset(test_rows);

        const auto t0 = std::chrono::steady_clock::now();
        const TrainedModel model = fit(spec, train);
        const auto t1 = std::chrono::steady_clock::now();

        const Prediction p = predict(model, test);
        FoldMetrics fm;
        fm.metrics = metric_suite(test.labels, p.labels, &p.scores);
        fm.train_seconds = std::chrono::duration<double>(t1 - t0).count();
        report.folds.push_back(fm);
    }

    auto& m = report.mean;
    for (const auto& fm : report.folds) {
        m.accuracy += fm.metrics.accuracy;
        m.balanced_accuracy += fm.metrics.balanced_accuracy;
        m.auc += fm.metrics.auc;
        m.recall += fm.metrics.recall;
        m.precision += fm.metrics.precision;
        m.f1 += fm.metrics.f1;
        m.kappa += fm.metrics.kappa;
        m.mcc += fm.metrics.mcc;
        report.mean_train_seconds += fm.train_seconds;
    }
    const double nk = static_cast<double>(k);
    m.accuracy /= nk;
    m.balanced_accuracy /= nk;
    m.auc /= nk;
    m.recall /= nk;
    m.precision /= nk;
    m.f1 /= nk;
    m.kappa /= nk;
    m.mcc /= nk;
    m.has_auc = true;
    report.mean_train_seconds /= nk;
    return report;
}

std::vector<RankEntry> rank_models(const std::vector<ClassifierSpec>& specs,
                                   const TrainingTable& table, int k, uint64_t seed) {
    if (specs.empty()) throw Error("rank_models: no specs");
    std::vector<RankEntry> entries(specs.size());
    parallel_for(static_cast<int64_t>(specs.size()), [&](int64_t i) {
        entries[i].spec = specs[i];
        try {
            entries[i].report = cross_validate(specs[i], table, k, seed);
        } catch (const Error& e) {
            entries[i].ok = false;
            entries[i].error = e.what();
        }
    });
    std::stable_sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.ok != b.ok) return a.ok;
        if (!a.ok) return algo_name(a.spec.algo) < algo_name(b.spec.algo);
        const auto& ma = a.report.mean;
        const auto& mb = b.report.mean;
        if (ma.accuracy != mb.accuracy) return ma.accuracy > mb.accuracy;
        if (ma.balanced_accuracy != mb.balanced_accuracy)
            return ma.balanced_accuracy > mb.balanced_accuracy;
        if (ma.f1 != mb.f1) return ma.f1 > mb.f1;
        return algo_name(a.spec.algo) < algo_name(b.spec.algo);
    });
    return entries;
}

std::vector<RankEntry> top_k(const std::vector<RankEntry>& ranking, int k) {
    if (ranking.empty()) throw Error("top_k: empty ranking");
    const auto take = std::min<size_t>(static_cast<size_t>(std::max(0, k)), ranking.size());
    return {ranking.begin(), ranking.begin() + take};
}

double ParamRange::sample(uint64_t seed) const {
    Rng rng(seed);
    switch (kind) {
        case Kind::log_uniform:
            return std::exp(rng.next_uniform(std::log(lo), std::log(hi)));
        case Kind::int_range:
            return lo + static_cast<double>(rng.next_below(static_cast<uint64_t>(hi - lo) + 1));
        case Kind::choice:
            return choices[rng.next_below(choices.size())];
    }
    throw Error("param range: bad kind");
}

HyperGrid default_grid(Algo a) {
    HyperGrid g;
    auto lu = [](double lo, double hi) {
        ParamRange r;
        r.kind = ParamRange::Kind::log_uniform;
        r.lo = lo;
        r.hi = hi;
        return r;
    };
    auto ir = [](int lo, int hi) {
        ParamRange r;
        r.kind = ParamRange::Kind::int_range;
        r.lo = lo;
        r.hi = hi;
        return r;
    };
    auto ch = [](std::vector<double> v) {
        ParamRange r;
        r.kind = ParamRange::Kind::choice;
        r.choices = std::move(v);
        return r;
    };
    switch (a) {
        case Algo::RC: g["alpha"] = lu(0.01, 100); break;
        case Algo::LR: g["C"] = lu(0.01, 100); break;
        case Algo::SGD: g["alpha"] = lu(0.00001, 0.01); break;
        case Algo::DT: g["max_depth"] = ir(2, 16); break;
        case Algo::KNN: g["k"] = ch({1, 3, 5, 7, 9}); break;
        case Algo::RF:
            g["n_trees"] = ch({50, 100, 200});
            g["max_depth"] = ir(4, 16);
            break;
        case Algo::ET:
            g["n_trees"] = ch({50, 100, 200});
            g["max_depth"] = ir(4, 16);
            break;
        case Algo::GBC:
            g["n_trees"] = ch({50, 100, 200});
            g["learning_rate"] = ch({0.05, 0.1, 0.3});
            g["max_depth"] = ch({2, 3, 4});
            break;
        case Algo::LDA:
        case Algo::QDA:
        case Algo::GNB:
            break;  // nothing worth tuning
    }
    return g;
}

ParamRange parse_param_range(const std::string& text) {
    std::string s = text;
    auto trim = [](std::string& v) {
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.erase(v.begin());
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.pop_back();
    };
    trim(s);
    ParamRange r;
    if (s.rfind("log-uniform", 0) == 0) {
        r.kind = ParamRange::Kind::log_uniform;
        std::string rest = s.substr(11);
        trim(rest);
        const auto dots = rest.find("..");
        if (dots == std::string::npos) throw Error("bad log-uniform range: " + text);
        r.lo = std::stod(rest.substr(0, dots));
        r.hi = std::stod(rest.substr(dots + 2));
        if (!(r.lo > 0) || !(r.hi > r.lo)) throw Error("bad log-uniform bounds: " + text);
        return r;
    }
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        const std::string body = s.substr(1, s.size() - 2);
        const auto dots = body.find("..");
        if (dots != std::string::npos && body.find(',') == std::string::npos) {
            r.kind = ParamRange::Kind::int_range;
            r.lo = std::stod(body.substr(0, dots));
            r.hi = std::stod(body.substr(dots + 2));
            if (r.hi < r.lo) throw Error("bad int range: " + text);
            return r;
        }
        r.kind = ParamRange::Kind::choice;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            trim(item);
            if (!item.empty()) r.choices.push_back(std::stod(item));
        }
        if (r.choices.empty()) throw Error("empty choice set: " + text);
        return r;
    }
    throw Error("unparseable parameter range: " + text);
}

std::string param_range_to_string(const ParamRange& r) {
    std::ostringstream out;
    auto num = [](double v) {
        std::ostringstream o;
        o << v;
        return o.str();
    };
    switch (r.kind) {
        case ParamRange::Kind::log_uniform:
            out << "log-uniform " << num(r.lo) << ".." << num(r.hi);
            break;
        case ParamRange::Kind::int_range:
            out << "{" << num(r.lo) << ".." << num(r.hi) << "}";
            break;
        case ParamRange::Kind::choice: {
            out << "{";
            for (size_t i = 0; i < r.choices.size(); ++i) out << (i ? "," : "") << num(r.choices[i]);
            out << "}";
            break;
        }
    }
    return out.str();
}

ClassifierSpec tune(const ClassifierSpec& spec, const TrainingTable& table, int budget,
                    uint64_t seed, const HyperGrid* grid_in) {
    if (budget < 0) throw Error("tune: negative budget");
    if (budget == 0) return spec;
    const HyperGrid grid = grid_in ? *grid_in : default_grid(spec.algo);
    if (grid.empty()) return spec;

    const uint64_t fold_seed = derive_seed(seed, 0xF01D5);
    const int k = 5;
    double best_score = cross_validate(spec, table, k, fold_seed).mean.balanced_accuracy;
    ClassifierSpec best = spec;

    for (int i = 0; i < budget; ++i) {
        ClassifierSpec cand = spec;
        for (const auto& [name, range] : grid)
            cand.hyper[name] = range.sample(derive_seed(seed, static_cast<uint64_t>(i),
                                                        fnv1a64(name.data(), name.size())));
        double score;
        try {
            score = cross_validate(cand, table, k, fold_seed).mean.balanced_accuracy;
        } catch (const Error&) {
            continue;  // degenerate candidate, skip
        }
        if (score > best_score) {
            best_score = score;
            best = cand;
        }
    }
    return best;
}

std::vector<ClassifierSpec> default_zoo(uint64_t seed) {
    std::vector<ClassifierSpec> specs;
    uint64_t i = 0;
    for (const Algo a : all_algos()) {
        ClassifierSpec s;
        s.algo = a;
        s.seed = derive_seed(seed, i++);
        switch (a) {
            case Algo::RC: s.hyper["alpha"] = 1.0; break;
            case Algo::LR: s.hyper["C"] = 1.0; break;
            case Algo::SGD:
                s.hyper["alpha"] = 1e-4;
                s.hyper["eta0"] = 0.1;
                s.hyper["epochs"] = 30;
                break;
            case Algo::DT: s.hyper["max_depth"] = 8; break;
            case Algo::KNN: s.hyper["k"] = 5; break;
            case Algo::RF:
                s.hyper["n_trees"] = 100;
                s.hyper["max_depth"] = 12;
                break;
            case Algo::ET:
                s.hyper["n_trees"] = 100;
                s.hyper["max_depth"] = 12;
                break;
            case Algo::GBC:
                s.hyper["n_trees"] = 100;
                s.hyper["learning_rate"] = 0.1;
                s.hyper["max_depth"] = 3;
                break;
            default: break;
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

// ---- persistence

namespace {

constexpr uint32_t kModelMagic = 0x4D585053;  // "SPXM"
constexpr uint32_t kModelVersion = 1;

void put_u32(std::string& out, uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::string& out, uint64_t v) { out.append(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::string& out, double v) { out.append(reinterpret_cast<const char*>(&v), 8); }
void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<uint32_t>(s.size()));
    out.append(s);
}
void put_vec(std::string& out, const std::vector<double>& v) {
    put_u32(out, static_cast<uint32_t>(v.size()));
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * 8);
}
void put_ivec(std::string& out, const std::vector<int>& v) {
    put_u32(out, static_cast<uint32_t>(v.size()));
    for (const int x : v) put_u32(out, static_cast<uint32_t>(x));
}
void put_tree(std::string& out, const TreeModel& t) {
    put_u32(out, static_cast<uint32_t>(t.nodes.size()));
    for (const auto& n : t.nodes) {
        put_u32(out, static_cast<uint32_t>(n.feature));
        put_f64(out, n.threshold);
        put_u32(out, static_cast<uint32_t>(n.left));
        put_u32(out, static_cast<uint32_t>(n.right));
        put_f64(out, n.value);
    }
}

struct Reader {
    const char* p;
    const char* end;
    void need(size_t n) const {
        if (p + n > end) throw Error("model blob truncated");
    }
    uint32_t u32() {
        need(4);
        uint32_t v;
        std::memcpy(&v, p, 4);
        p += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v;
        std::memcpy(&v, p, 8);
        p += 8;
        return v;
    }
    double f64() {
        need(8);
        double v;
        std::memcpy(&v, p, 8);
        p += 8;
        return v;
    }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s(p, p + n);
        p += n;
        return s;
    }
    std::vector<double> vec() {
        const uint32_t n = u32();
        need(static_cast<size_t>(n) * 8);
        std::vector<double> v(n);
        std::memcpy(v.data(), p, static_cast<size_t>(n) * 8);
        p += static_cast<size_t>(n) * 8;
        return v;
    }
    std::vector<int> ivec() {
        const uint32_t n = u32();
        std::vector<int> v(n);
        for (auto& x : v) x = static_cast<int>(u32());
        return v;
    }
    TreeModel tree() {
        TreeModel t;
        const uint32_t n = u32();
        t.nodes.resize(n);
        for (auto& node : t.nodes) {
            node.feature = static_cast<int>(u32());
            node.threshold = f64();
            node.left = static_cast<int>(u32());
            node.right = static_cast<int>(u32());
            node.value = f64();
        }
        return t;
    }
};

}  // namespace

void save_model(const std::string& path_base, const TrainedModel& model, uint64_t train_set_hash) {
    std::string blob;
    put_u32(blob, kModelMagic);
    put_u32(blob, kModelVersion);
    put_str(blob, algo_name(model.spec.algo));
    put_u64(blob, model.spec.seed);
    put_u32(blob, static_cast<uint32_t>(model.spec.hyper.size()));
    for (const auto& [name, value] : model.spec.hyper) {
        put_str(blob, name);
        put_f64(blob, value);
    }
    put_u32(blob, static_cast<uint32_t>(model.dims));
    put_vec(blob, model.standardization.mean);
    put_vec(blob, model.standardization.stddev);

    put_u32(blob, static_cast<uint32_t>(model.payload.index()));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                put_vec(blob, m.w);
                put_f64(blob, m.b);
                put_u32(blob, m.logistic ? 1 : 0);
            } else if constexpr (std::is_same_v<T, LdaModel>) {
                put_vec(blob, m.w);
                put_f64(blob, m.b);
            } else if constexpr (std::is_same_v<T, QdaModel>) {
                for (int c = 0; c < 2; ++c) {
                    put_vec(blob, m.prec[c]);
                    put_vec(blob, m.mean[c]);
                    put_f64(blob, m.logdet[c]);
                    put_f64(blob, m.logprior[c]);
                }
            } else if constexpr (std::is_same_v<T, GnbModel>) {
                for (int c = 0; c < 2; ++c) {
                    put_vec(blob, m.mean[c]);
                    put_vec(blob, m.var[c]);
                    put_f64(blob, m.logprior[c]);
                }
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                put_tree(blob, m);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                put_u32(blob, static_cast<uint32_t>(m.k));
                put_u32(blob, static_cast<uint32_t>(m.n));
                put_u32(blob, static_cast<uint32_t>(m.d));
                put_vec(blob, m.x);
                put_ivec(blob, m.y);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                put_u32(blob, static_cast<uint32_t>(m.trees.size()));
                for (const auto& t : m.trees) put_tree(blob, t);
            } else if constexpr (std::is_same_v<T, GbcModel>) {
                put_f64(blob, m.f0);
                put_f64(blob, m.learning_rate);
                put_u32(blob, static_cast<uint32_t>(m.trees.size()));
                for (const auto& t : m.trees) put_tree(blob, t);
            }
        },
        model.payload);

    std::ofstream bin(path_base + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw Error("cannot write model: " + path_base + ".bin");
    bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));

    std::ostringstream manifest;
    manifest << "algorithm=" << algo_name(model.spec.algo) << "\n"
             << "seed=" << model.spec.seed << "\n"
             << "dims=" << model.dims << "\n"
             << "train_set_hash=" << train_set_hash << "\n";
    for (const auto& [name, value] : model.spec.hyper) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        manifest << "hyper." << name << "=" << buf << "\n";
    }
    std::ofstream mf(path_base + ".manifest.txt", std::ios::trunc);
    if (!mf) throw Error("cannot write model manifest: " + path_base + ".manifest.txt");
    mf << manifest.str();
}

TrainedModel load_model(const std::string& path_base) {
    std::ifstream bin(path_base + ".bin", std::ios::binary);
    if (!bin) throw Error("cannot open model: " + path_base + ".bin");
    std::string blob((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    Reader r{blob.data(), blob.data() + blob.size()};
    if (r.u32() != kModelMagic) throw Error("bad model magic: " + path_base);
    if (r.u32() != kModelVersion) throw Error("unsupported model version: " + path_base);

    TrainedModel model;
    model.spec.algo = algo_from_name(r.str());
    model.spec.seed = r.u64();
    const uint32_t nh = r.u32();
    for (uint32_t i = 0; i < nh; ++i) {
        const std::string name = r.str();
        model.spec.hyper[name] = r.f64();
    }
    model.dims = static_cast<int>(r.u32());
    model.standardization.mean = r.vec();
    model.standardization.stddev = r.vec();

    const uint32_t tag = r.u32();
    switch (tag) {
        case 0: {
            LinearModel m;
            m.w = r.vec();
            m.b = r.f64();
            m.logistic = r.u32() != 0;
            model.payload = std::move(m);
            break;
        }
        case 1: {
            LdaModel m;
            m.w = r.vec();
            m.b = r.f64();
            model.payload = std::move(m);
            break;
        }
        case 2: {
            QdaModel m;
            for (int c = 0; c < 2; ++c) {
                m.prec[c] = r.vec();
                m.mean[c] = r.vec();
                m.logdet[c] = r.f64();
                m.logprior[c] = r.f64();
            }
            model.payload = std::move(m);
            break;
        }
        case 3: {
            GnbModel m;
            for (int c = 0; c < 2; ++c) {
                m.mean[c] = r.vec();
                m.var[c] = r.vec();
                m.logprior[c] = r.f64();
            }
            model.payload = std::move(m);
            break;
        }
        case 4: model.payload = r.tree(); break;
        case 5: {
            KnnModel m;
            m.k = static_cast<int>(r.u32());
            m.n = static_cast<int>(r.u32());
            m.d = static_cast<int>(r.u32());
            m.x = r.vec();
            m.y = r.ivec();
            model.payload = std::move(m);
            break;
        }
        case 6: {
            ForestModel m;
            const uint32_t nt = r.u32();
            for (uint32_t i = 0; i < nt; ++i) m.trees.push_back(r.tree());
            model.payload = std::move(m);
            break;
        }
        case 7: {
            GbcModel m;
            m.f0 = r.f64();
            m.learning_rate = r.f64();
            const uint32_t nt = r.u32();
            for (uint32_t i = 0; i < nt; ++i) m.trees.push_back(r.tree());
            model.payload = std::move(m);
            break;
        }
        default: throw Error("unknown model payload tag in " + path_base);
    }
    return model;
}

}  // namespace spx
