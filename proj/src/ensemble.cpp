#include "spx/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spx/error.hpp"
#include "spx/metrics.hpp"
#include "spx/parallel.hpp"
#include "spx/rng.hpp"

namespace spx {

void PredictionMatrix::validate() const {
    if (n_samples < 1) throw Error("prediction matrix: empty");
    if (classifiers.empty()) throw Error("prediction matrix: no classifiers");
    if (predictions.size() != classifiers.size())
        throw Error("prediction matrix: column count mismatch");
    if (truth.size() != static_cast<size_t>(n_samples))
        throw Error("prediction matrix: truth length mismatch");
    for (size_t c = 0; c < classifiers.size(); ++c) {
        if (predictions[c].size() != static_cast<size_t>(n_samples))
            throw Error("prediction matrix: column " + classifiers[c] + " length mismatch");
        for (size_t d = c + 1; d < classifiers.size(); ++d)
            if (classifiers[c] == classifiers[d])
                throw Error("prediction matrix: duplicate id " + classifiers[c]);
    }
}

void save_prediction_matrix(const std::string& path, const PredictionMatrix& p) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write prediction matrix: " + path);
    f << "sample_id,truth";
    for (const auto& id : p.classifiers) f << ",pred_" << id;
    f << "\n";
    for (int i = 0; i < p.n_samples; ++i) {
        f << i << "," << p.truth[i];
        for (const auto& col : p.predictions) f << "," << col[i];
        f << "\n";
    }
}

PredictionMatrix load_prediction_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open prediction matrix: " + path);
    PredictionMatrix p;
    std::string line;
    if (!std::getline(f, line)) throw Error("empty prediction matrix: " + path);
    {
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= 2) {
                if (cell.rfind("pred_", 0) != 0)
                    throw Error("bad prediction matrix header cell: " + cell);
                p.classifiers.push_back(cell.substr(5));
            }
            ++col;
        }
    }
    p.predictions.assign(p.classifiers.size(), {});
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // sample_id
        std::getline(ss, cell, ',');
        p.truth.push_back(std::stoi(cell));
        for (auto& col : p.predictions) {
            std::getline(ss, cell, ',');
            col.push_back(std::stoi(cell));
        }
        ++p.n_samples;
    }
    p.validate();
    return p;
}

std::optional<double> cor_pair(const std::vector<int>& ci, const std::vector<int>& cj,
                               const std::vector<int>& truth) {
    if (ci.size() != truth.size() || cj.size() != truth.size())
        throw Error("cor_pair: size mismatch");
    if (truth.empty()) throw Error("cor_pair: empty input");
    const auto n = static_cast<double>(truth.size());
    double a = 0, b = 0, c = 0, d = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        const bool hit_i = ci[i] == truth[i];
        const bool hit_j = cj[i] == truth[i];
        if (hit_i && hit_j) ++a;
        else if (hit_j) ++b;  // only cj correct
        else if (hit_i) ++c;  // only ci correct
        else ++d;
    }
    a /= n;
    b /= n;
    c /= n;
    d /= n;
    const double f1 = a + b, f2 = c + d, f3 = a + c, f4 = b + d;
    if (f1 == 0 || f2 == 0 || f3 == 0 || f4 == 0) return std::nullopt;
    return (a * d - b * c) / std::sqrt(f1 * f2 * f3 * f4);
}

CorMatrix cor_matrix(const PredictionMatrix& p) {
    p.validate();
    const int c = p.n_classifiers();
    CorMatrix m;
    m.ids = p.classifiers;
    m.value.assign(c, std::vector<std::optional<double>>(c));
    for (int i = 0; i < c; ++i)
        for (int j = i; j < c; ++j) {
            const auto v = cor_pair(p.predictions[i], p.predictions[j], p.truth);
            m.value[i][j] = v;
            m.value[j][i] = v;
        }
    return m;
}

std::string cor_matrix_csv(const CorMatrix& m) {
    std::ostringstream out;
    out << "classifier";
    for (const auto& id : m.ids) out << "," << id;
    out << "\n";
    char buf[64];
    for (size_t i = 0; i < m.ids.size(); ++i) {
        out << m.ids[i];
        for (size_t j = 0; j < m.ids.size(); ++j) {
            if (m.value[i][j].has_value()) {
                std::snprintf(buf, sizeof buf, "%.17g", *m.value[i][j]);
                out << "," << buf;
            } else {
                out << ",NA";
            }
        }
        out << "\n";
    }
    return out.str();
}

void write_cor_heatmap_ppm(const std::string& path, const CorMatrix& m, int cell_px) {
    const int c = static_cast<int>(m.ids.size());
    const int side = c * cell_px;
    std::string pixels(static_cast<size_t>(side) * side * 3, '\0');
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            unsigned char r = 128, g = 128, b = 128;  // undefined: gray
            if (m.value[i][j].has_value()) {
                const double v = std::clamp(*m.value[i][j], -1.0, 1.0);
                if (v >= 0) {  // white -> red
                    r = 255;
                    g = b = static_cast<unsigned char>(255.0 * (1.0 - v));
                } else {  // white -> blue
                    b = 255;
                    r = g = static_cast<unsigned char>(255.0 * (1.0 + v));
                }
            }
            for (int py = 0; py < cell_px; ++py)
                for (int px = 0; px < cell_px; ++px) {
                    const size_t o =
                        ((static_cast<size_t>(i) * cell_px + py) * side + j * cell_px + px) * 3;
                    pixels[o] = static_cast<char>(r);
                    pixels[o + 1] = static_cast<char>(g);
                    pixels[o + 2] = static_cast<char>(b);
                }
        }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write heat map: " + path);
    f << "P6\n" << side << " " << side << "\n255\n";
    f.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
}

std::vector<int> majority_vote(const PredictionMatrix& p, const std::vector<uint8_t>& include) {
    if (include.size() != p.classifiers.size())
        throw Error("majority_vote: include vector length mismatch");
    int included = 0;
    for (const uint8_t v : include) included += v != 0;
    if (included == 0) throw Error("majority_vote: empty subset");

    std::vector<int> fused(p.n_samples, 0);
    for (int s = 0; s < p.n_samples; ++s) {
        int votes1 = 0;
        for (size_t c = 0; c < include.size(); ++c)
            if (include[c]) votes1 += p.predictions[c][s];
        // ties resolve to the positive class
        fused[s] = 2 * votes1 >= included ? 1 : 0;
    }
    return fused;
}

void UmdaParams::validate() const {
    if (population < 2) throw Error("umda: population must be >= 2");
    if (iterations < 1) throw Error("umda: iterations must be >= 1");
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
        throw Error("umda: elite_fraction must lie in (0,1)");
    if (!(clamp > 0.0 && clamp < 0.5)) throw Error("umda: clamp must lie in (0, 0.5)");
    if (std::max(1, static_cast<int>(population * elite_fraction)) < 1)
        throw Error("umda: elite must hold at least one individual");
}

namespace {

double fused_fitness(const PredictionMatrix& p, const std::vector<uint8_t>& include) {
    return balanced_accuracy(confusion_from(p.truth, majority_vote(p, include)));
}

std::vector<uint8_t> sample_individual(const std::vector<double>& marginals, Rng& rng) {
    std::vector<uint8_t> v(marginals.size());
    for (;;) {
        bool any = false;
        for (size_t c = 0; c < marginals.size(); ++c) {
            v[c] = rng.next_bernoulli(marginals[c]) ? 1 : 0;
            any |= v[c] != 0;
        }
        if (any) return v;  // all-zero vectors are resampled
    }
}

void check_truth(const PredictionMatrix& p) {
    bool has0 = false, has1 = false;
    for (const int t : p.truth) (t == 1 ? has1 : has0) = true;
    if (!has0 || !has1) throw Error("umda: validation split lacks a class");
}

template <typename EvalFn>
EnsembleSelection umda_run(const PredictionMatrix& p, const UmdaParams& params, EvalFn&& evaluate) {
    p.validate();
    params.validate();
    check_truth(p);
    const int c = p.n_classifiers();
    const int elite_count = std::max(1, static_cast<int>(params.population * params.elite_fraction));

    std::vector<double> marginals(c, 0.5);
    EnsembleSelection best;
    best.fitness = -1;

    std::vector<std::vector<uint8_t>> population(params.population);
    std::vector<double> fitness(params.population);
    for (int gen = 0; gen < params.iterations; ++gen) {
        for (int i = 0; i < params.population; ++i) {
            Rng rng(derive_seed(params.seed, static_cast<uint64_t>(gen), static_cast<uint64_t>(i)));
            population[i] = sample_individual(marginals, rng);
        }
        evaluate(population, fitness);

        std::vector<int> order(params.population);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (fitness[a] != fitness[b]) return fitness[a] > fitness[b];
            return a < b;
        });

        for (int r = 0; r < params.population; ++r) {
            const int i = order[r];
            if (fitness[i] > best.fitness) {
                best.fitness = fitness[i];
                best.include = population[i];
            }
        }

        for (int col = 0; col < c; ++col) {
            int count = 0;
            for (int r = 0; r < elite_count; ++r) count += population[order[r]][col];
            const double freq = static_cast<double>(count) / elite_count;
            marginals[col] = std::clamp(freq, params.clamp, 1.0 - params.clamp);
        }
        best.trace.push_back(best.fitness);
    }
    return best;
}

}  // namespace

EnsembleSelection umda_select(const PredictionMatrix& p, const UmdaParams& params) {
    return umda_run(p, params,
                    [&](const std::vector<std::vector<uint8_t>>& pop, std::vector<double>& fit) {
                        parallel_for(static_cast<int64_t>(pop.size()), [&](int64_t i) {
                            fit[i] = fused_fitness(p, pop[i]);
                        });
                    });
}

namespace reference {

EnsembleSelection umda_select(const PredictionMatrix& p, const UmdaParams& params) {
    return umda_run(p, params,
                    [&](const std::vector<std::vector<uint8_t>>& pop, std::vector<double>& fit) {
                        for (size_t i = 0; i < pop.size(); ++i) fit[i] = fused_fitness(p, pop[i]);
                    });
}

}  // namespace reference

SelectionProbabilities selection_probabilities(
    const std::vector<EnsembleSelection>& runs, const std::vector<std::string>& ids,
    const std::map<std::string, std::string>& method_of_id, int runs_count) {
    if (runs_count < 1) throw Error("selection_probabilities: runs_count must be >= 1");
    if (static_cast<int>(runs.size()) != runs_count)
        throw Error("selection_probabilities: run list length does not match runs_count");
    for (const auto& r : runs)
        if (r.include.size() != ids.size())
            throw Error("selection_probabilities: selection length mismatch");

    SelectionProbabilities sp;
    sp.ids = ids;
    sp.ci.assign(ids.size(), 0.0);
    for (size_t c = 0; c < ids.size(); ++c) {
        int count = 0;
        for (const auto& r : runs) count += r.include[c] != 0;
        sp.ci[c] = 100.0 * count / runs_count;
    }

    std::map<std::string, std::vector<size_t>> cols_of_method;
    for (size_t c = 0; c < ids.size(); ++c) {
        const auto it = method_of_id.find(ids[c]);
        if (it == method_of_id.end())
            throw Error("selection_probabilities: no method for id " + ids[c]);
        cols_of_method[it->second].push_back(c);
    }
    for (const auto& [method, cols] : cols_of_method) {
        double acc = 0;
        for (const auto& r : runs) {
            int included = 0;
            for (const size_t c : cols) included += r.include[c] != 0;
            acc += static_cast<double>(included) / static_cast<double>(cols.size());
        }
        sp.cs[method] = 100.0 * acc / runs_count;
    }
    return sp;
}

}  // namespace spx
