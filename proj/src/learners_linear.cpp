#include <algorithm>
#include <cmath>

#include "spx/error.hpp"
#include "learners_internal.hpp"

namespace spx::detail {

bool cholesky_factor(std::vector<double>& a, int n, double* logdet) {
    double ld = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<size_t>(i) * n + k] * a[static_cast<size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0) return false;
                a[static_cast<size_t>(i) * n + i] = std::sqrt(s);
                ld += std::log(s);
            } else {
                a[static_cast<size_t>(i) * n + j] = s / a[static_cast<size_t>(j) * n + j];
            }
        }
    }
    if (logdet) *logdet = ld;
    return true;
}

void cholesky_solve(const std::vector<double>& chol, int n, std::vector<double>& b) {
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= chol[static_cast<size_t>(i) * n + k] * b[k];
        b[i] = s / chol[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= chol[static_cast<size_t>(k) * n + i] * b[k];
        b[i] = s / chol[static_cast<size_t>(i) * n + i];
    }
}

bool spd_solve(std::vector<double> a, int n, std::vector<double> b, std::vector<double>& x) {
    if (!cholesky_factor(a, n, nullptr)) return false;
    cholesky_solve(a, n, b);
    x = std::move(b);
    return true;
}

bool spd_inverse(std::vector<double> a, int n, std::vector<double>& inv, double* logdet) {
    if (!cholesky_factor(a, n, logdet)) return false;
    inv.assign(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> e(n);
    for (int c = 0; c < n; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        cholesky_solve(a, n, e);
        for (int r = 0; r < n; ++r) inv[static_cast<size_t>(r) * n + c] = e[r];
    }
    return true;
}

namespace {

TrainedModel make_model(const ClassifierSpec& spec, const TrainingTable& t,
                        Standardization std_, ModelPayload payload) {
    TrainedModel m;
    m.spec = spec;
    m.dims = t.d;
    m.standardization = std::move(std_);
    m.payload = std::move(payload);
    return m;
}

void class_stats(const std::vector<double>& x, int n, int d, const std::vector<int>& labels,
                 int cls, std::vector<double>& mean, int64_t& count) {
    mean.assign(d, 0.0);
    count = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != cls) continue;
        ++count;
        for (int j = 0; j < d; ++j) mean[j] += x[static_cast<size_t>(i) * d + j];
    }
    for (auto& v : mean) v /= static_cast<double>(count);
}

}  // namespace

// Ridge classifier: targets +-1, w solves (Z'Z + alpha I) w = Z'y on the
// standardized design, intercept = mean target (columns are centered by the
// standardization). Decision by the sign of the margin.
TrainedModel fit_rc(const ClassifierSpec& spec, const TrainingTable& t) {
    const double alpha = hyper_or(spec, "alpha", 1.0);
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d;

    std::vector<double> gram(static_cast<size_t>(d) * d, 0.0), rhs(d, 0.0);
    double ymean = 0;
    for (int i = 0; i < t.n; ++i) {
        const double yi = t.labels[i] == 1 ? 1.0 : -1.0;
        ymean += yi;
        const double* xi = x.data() + static_cast<size_t>(i) * d;
        for (int a = 0; a < d; ++a) {
            rhs[a] += xi[a] * yi;
            for (int b = a; b < d; ++b) gram[static_cast<size_t>(a) * d + b] += xi[a] * xi[b];
        }
    }
    ymean /= t.n;
    for (int a = 0; a < d; ++a) {
        gram[static_cast<size_t>(a) * d + a] += alpha;
        for (int b = 0; b < a; ++b)
            gram[static_cast<size_t>(a) * d + b] = gram[static_cast<size_t>(b) * d + a];
    }
    std::vector<double> w;
    if (!spd_solve(std::move(gram), d, std::move(rhs), w))
        throw Error("RC: gram matrix not positive definite");
    LinearModel m;
    m.w = std::move(w);
    m.b = ymean;
    return make_model(spec, t, st, std::move(m));
}

// L2-regularized logistic regression by gradient descent with Armijo
// backtracking, run to gradient norm <= 1e-8 or the iteration cap.
// Objective: 0.5 ||w||^2 + C * sum_i c_i log(1 + exp(-y_i f_i)).
TrainedModel fit_lr(const ClassifierSpec& spec, const TrainingTable& t) {
    const double C = hyper_or(spec, "C", 1.0);
    const int max_iter = static_cast<int>(hyper_or(spec, "max_iter", 2000));
    const bool balanced = hyper_or(spec, "balanced", 0.0) != 0.0;
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d, n = t.n;

    int64_t npos = 0;
    for (const int l : t.labels) npos += l;
    std::vector<double> cw(n, 1.0);
    if (balanced) {
        const double w1 = static_cast<double>(n) / (2.0 * static_cast<double>(npos));
        const double w0 = static_cast<double>(n) / (2.0 * static_cast<double>(n - npos));
        for (int i = 0; i < n; ++i) cw[i] = t.labels[i] == 1 ? w1 : w0;
    }

    std::vector<double> w(d, 0.0);
    double b = 0;
    auto objective = [&](const std::vector<double>& wv, double bv) {
        double obj = 0;
        for (int j = 0; j < d; ++j) obj += 0.5 * wv[j] * wv[j];
        for (int i = 0; i < n; ++i) {
            double f = bv;
            const double* xi = x.data() + static_cast<size_t>(i) * d;
            for (int j = 0; j < d; ++j) f += wv[j] * xi[j];
            const double yf = (t.labels[i] == 1 ? 1.0 : -1.0) * f;
            // log1p(exp(-yf)) computed stably
            obj += C * cw[i] * (yf > 0 ? std::log1p(std::exp(-yf)) : -yf + std::log1p(std::exp(yf)));
        }
        return obj;
    };

    std::vector<double> gw(d), trial_w(d);
    double step = 1.0;
    double obj = objective(w, b);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0;
        for (int i = 0; i < n; ++i) {
            double f = b;
            const double* xi = x.data() + static_cast<size_t>(i) * d;
            for (int j = 0; j < d; ++j) f += w[j] * xi[j];
            const double y = t.labels[i] == 1 ? 1.0 : -1.0;
            const double s = 1.0 / (1.0 + std::exp(y * f));  // sigma(-yf)
            const double coeff = -C * cw[i] * y * s;
            for (int j = 0; j < d; ++j) gw[j] += coeff * xi[j];
            gb += coeff;
        }
        for (int j = 0; j < d; ++j) gw[j] += w[j];

        double gnorm2 = gb * gb;
        for (int j = 0; j < d; ++j) gnorm2 += gw[j] * gw[j];
        if (std::sqrt(gnorm2) <= 1e-8) break;

        step = std::min(step * 2.0, 1e6);
        double trial_b;
        double trial_obj;
        for (;;) {
            for (int j = 0; j < d; ++j) trial_w[j] = w[j] - step * gw[j];
            trial_b = b - step * gb;
            trial_obj = objective(trial_w, trial_b);
            if (trial_obj <= obj - 0.5 * step * gnorm2 || step < 1e-18) break;
            step *= 0.5;
        }
        w.swap(trial_w);
        b = trial_b;
        obj = trial_obj;
    }

    LinearModel m;
    m.w = std::move(w);
    m.b = b;
    m.logistic = true;
    return make_model(spec, t, st, std::move(m));
}

// Pooled-covariance Gaussian classes; binary LDA reduces to a linear margin.
TrainedModel fit_lda(const ClassifierSpec& spec, const TrainingTable& t) {
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d, n = t.n;

    std::vector<double> mean[2];
    int64_t count[2];
    for (int c = 0; c < 2; ++c) class_stats(x, n, d, t.labels, c, mean[c], count[c]);

    std::vector<double> cov(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* xi = x.data() + static_cast<size_t>(i) * d;
        const auto& mu = mean[t.labels[i]];
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b)
                cov[static_cast<size_t>(a) * d + b] += (xi[a] - mu[a]) * (xi[b] - mu[b]);
    }
    double trace = 0;
    for (int a = 0; a < d; ++a) trace += cov[static_cast<size_t>(a) * d + a] / n;
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            cov[static_cast<size_t>(a) * d + b] /= n;
            cov[static_cast<size_t>(b) * d + a] = cov[static_cast<size_t>(a) * d + b];
        }
        cov[static_cast<size_t>(a) * d + a] += 1e-6 * trace;
    }

    std::vector<double> diff(d);
    for (int j = 0; j < d; ++j) diff[j] = mean[1][j] - mean[0][j];
    std::vector<double> w;
    if (!spd_solve(cov, d, diff, w))
        throw Error("LDA: singular pooled covariance after regularization");

    double b = std::log(static_cast<double>(count[1]) / static_cast<double>(count[0]));
    for (int j = 0; j < d; ++j) b -= 0.5 * (mean[1][j] + mean[0][j]) * w[j];

    LdaModel m;
    m.w = std::move(w);
    m.b = b;
    return make_model(spec, t, st, std::move(m));
}

TrainedModel fit_qda(const ClassifierSpec& spec, const TrainingTable& t) {
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d, n = t.n;

    QdaModel m;
    for (int c = 0; c < 2; ++c) {
        int64_t count;
        class_stats(x, n, d, t.labels, c, m.mean[c], count);
        if (count < 2) throw Error("QDA: class with fewer than 2 samples");
        std::vector<double> cov(static_cast<size_t>(d) * d, 0.0);
        for (int i = 0; i < n; ++i) {
            if (t.labels[i] != c) continue;
            const double* xi = x.data() + static_cast<size_t>(i) * d;
            for (int a = 0; a < d; ++a)
                for (int b = a; b < d; ++b)
                    cov[static_cast<size_t>(a) * d + b] +=
                        (xi[a] - m.mean[c][a]) * (xi[b] - m.mean[c][b]);
        }
        double trace = 0;
        for (int a = 0; a < d; ++a) trace += cov[static_cast<size_t>(a) * d + a] / count;
        for (int a = 0; a < d; ++a) {
            for (int b = a; b < d; ++b) {
                cov[static_cast<size_t>(a) * d + b] /= count;
                cov[static_cast<size_t>(b) * d + a] = cov[static_cast<size_t>(a) * d + b];
            }
            cov[static_cast<size_t>(a) * d + a] += 1e-6 * trace;
        }
        if (!spd_inverse(std::move(cov), d, m.prec[c], &m.logdet[c]))
            throw Error("QDA: singular class covariance after regularization");
        m.logprior[c] = std::log(static_cast<double>(count) / n);
    }
    return make_model(spec, t, st, std::move(m));
}

TrainedModel fit_gnb(const ClassifierSpec& spec, const TrainingTable& t) {
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d, n = t.n;

    // var smoothing scaled by the largest overall feature variance
    std::vector<double> overall_mean(d, 0.0), overall_var(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) overall_mean[j] += x[static_cast<size_t>(i) * d + j];
    for (auto& v : overall_mean) v /= n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double dv = x[static_cast<size_t>(i) * d + j] - overall_mean[j];
            overall_var[j] += dv * dv / n;
        }
    const double smoothing = 1e-9 * *std::max_element(overall_var.begin(), overall_var.end());

    GnbModel m;
    for (int c = 0; c < 2; ++c) {
        int64_t count;
        class_stats(x, n, d, t.labels, c, m.mean[c], count);
        m.var[c].assign(d, 0.0);
        for (int i = 0; i < n; ++i) {
            if (t.labels[i] != c) continue;
            for (int j = 0; j < d; ++j) {
                const double dv = x[static_cast<size_t>(i) * d + j] - m.mean[c][j];
                m.var[c][j] += dv * dv;
            }
        }
        for (auto& v : m.var[c]) v = v / static_cast<double>(count) + std::max(smoothing, 1e-12);
        m.logprior[c] = std::log(static_cast<double>(count) / n);
    }
    return make_model(spec, t, st, std::move(m));
}

// Linear SGD with hinge (loss=0) or logistic (loss=1) loss, seeded
// per-epoch shuffling, eta_t = eta0 / (1 + eta0 * alpha * t).
TrainedModel fit_sgd(const ClassifierSpec& spec, const TrainingTable& t) {
    const double alpha = hyper_or(spec, "alpha", 1e-4);
    const double eta0 = hyper_or(spec, "eta0", 0.1);
    const int epochs = static_cast<int>(hyper_or(spec, "epochs", 30));
    const bool logloss = hyper_or(spec, "loss", 0.0) != 0.0;
    const Standardization st = fit_standardization(t);
    const auto x = standardized_matrix(t, st);
    const int d = t.d, n = t.n;

    std::vector<double> w(d, 0.0);
    double b = 0;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    int64_t step_count = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng rng(derive_seed(spec.seed, static_cast<uint64_t>(epoch)));
        shuffle(order, rng);
        for (const int i : order) {
            const double eta = eta0 / (1.0 + eta0 * alpha * static_cast<double>(step_count++));
            const double* xi = x.data() + static_cast<size_t>(i) * d;
            const double y = t.labels[i] == 1 ? 1.0 : -1.0;
            double f = b;
            for (int j = 0; j < d; ++j) f += w[j] * xi[j];
            double coeff = 0;
            if (logloss) {
                coeff = -y / (1.0 + std::exp(y * f));
            } else if (y * f < 1.0) {
                coeff = -y;
            }
            for (int j = 0; j < d; ++j) w[j] -= eta * (alpha * w[j] + coeff * xi[j]);
            b -= eta * coeff;
        }
    }

    LinearModel m;
    m.w = std::move(w);
    m.b = b;
    m.logistic = logloss;
    return make_model(spec, t, st, std::move(m));
}

TrainedModel fit_knn(const ClassifierSpec& spec, const TrainingTable& t) {
    const int k = std::max(1, static_cast<int>(hyper_or(spec, "k", 5)));
    const Standardization st = fit_standardization(t);
    KnnModel m;
    m.k = k;
    m.n = t.n;
    m.d = t.d;
    m.x = standardized_matrix(t, st);
    m.y = t.labels;
    return make_model(spec, t, st, std::move(m));
}

}  // namespace spx::detail
