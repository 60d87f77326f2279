#include "twinzyg/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "twinzyg/parallel.hpp"

namespace twinzyg::models {

namespace {

constexpr std::uint64_t kStageSplit = 0x53504c4954ULL;
constexpr std::uint64_t kStageInit = 0x494e4954ULL;

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double cross_entropy(const Eigen::VectorXd& outputs, const Eigen::VectorXi& labels) {
    const Eigen::Index n = outputs.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = outputs(i);
        total -= labels(i) == 1 ? std::log(std::max(y, 1e-12))
                                : std::log(std::max(1.0 - y, 1e-12));
    }
    return total / static_cast<double>(n);
}

}  // namespace

// ---------------------------------------------------------------- metrics

bool metrics_better(const Metrics& a, const Metrics& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    const double afpr = a.fpr_defined ? a.fpr : 2.0;
    const double bfpr = b.fpr_defined ? b.fpr : 2.0;
    if (afpr != bfpr) return afpr < bfpr;
    const double afnr = a.fnr_defined ? a.fnr : 2.0;
    const double bfnr = b.fnr_defined ? b.fnr : 2.0;
    return afnr < bfnr;
}

Metrics compute_metrics(const Eigen::VectorXi& predicted, const Eigen::VectorXi& actual) {
    if (predicted.size() != actual.size() || predicted.size() == 0)
        throw std::invalid_argument("prediction/label size mismatch or empty test set");
    Metrics m;
    for (Eigen::Index i = 0; i < predicted.size(); ++i) {
        if (actual(i) == 1)
            (predicted(i) == 1 ? m.tp : m.fn)++;
        else
            (predicted(i) == 1 ? m.fp : m.tn)++;
    }
    const double n = static_cast<double>(predicted.size());
    m.accuracy = 1.0 - static_cast<double>(m.fp + m.fn) / n;
    m.fpr_defined = (m.fp + m.tn) > 0;
    m.fnr_defined = (m.fn + m.tp) > 0;
    m.fpr = m.fpr_defined ? static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn) : 0.0;
    m.fnr = m.fnr_defined ? static_cast<double>(m.fn) / static_cast<double>(m.fn + m.tp) : 0.0;
    return m;
}

// ------------------------------------------------------------------ split

SplitResult split(const PairedDataset& data, const SplitSpec& spec, RngStream& rng) {
    const int n = static_cast<int>(data.size());
    if (n < 3) throw std::invalid_argument("need at least 3 samples to split");
    const double ratios[3] = {spec.train, spec.validation, spec.test};
    double total = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0)) throw std::invalid_argument("split ratios must be positive");
        total += r;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");

    // largest-remainder rounding; remainder ties resolved in
    // (train, validation, test) order
    int sizes[3];
    double remainders[3];
    int assigned = 0;
    for (int j = 0; j < 3; ++j) {
        const double exact = ratios[j] * n;
        sizes[j] = static_cast<int>(std::floor(exact));
        remainders[j] = exact - sizes[j];
        assigned += sizes[j];
    }
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3,
                     [&](int a, int b) { return remainders[a] > remainders[b]; });
    for (int j = 0; assigned < n; ++j, ++assigned) sizes[order[j % 3]]++;
    for (int s : sizes)
        if (s == 0) throw std::invalid_argument("a split subset rounded to empty");

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[rng.below(static_cast<std::uint64_t>(i + 1))]);

    SplitResult out;
    auto it = perm.begin();
    out.train_idx.assign(it, it + sizes[0]);
    it += sizes[0];
    out.validation_idx.assign(it, it + sizes[1]);
    it += sizes[1];
    out.test_idx.assign(it, it + sizes[2]);
    out.train = data.rows(out.train_idx);
    out.validation = data.rows(out.validation_idx);
    out.test = data.rows(out.test_idx);
    return out;
}

// -------------------------------------------------------------------- ANN

double ann_forward(const AnnModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.w1.cols()) throw std::invalid_argument("input dimension mismatch");
    Eigen::VectorXd h = model.w1 * x + model.b1;
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = sigmoid(h(i));
    return sigmoid(model.w2.dot(h) + model.b2);
}

Eigen::VectorXd ann_outputs(const AnnModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.w1.cols()) throw std::invalid_argument("input dimension mismatch");
    Eigen::MatrixXd h = (model.w1 * x.transpose()).colwise() + model.b1;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = sigmoid(h(i, j));
    Eigen::VectorXd o = h.transpose() * model.w2;
    for (Eigen::Index i = 0; i < o.size(); ++i) o(i) = sigmoid(o(i) + model.b2);
    return o;
}

double ann_loss(const AnnModel& model, const PairedDataset& data, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
    if (data.size() == 0) throw std::invalid_argument("empty batch");
    return cross_entropy(ann_outputs(model, data.features), data.labels) +
           lambda * model.w1.cwiseAbs().sum();
}

AnnGradient ann_gradient(const AnnModel& model, const PairedDataset& data, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
    const Eigen::Index n = data.size();
    if (n == 0) throw std::invalid_argument("empty batch");

    Eigen::MatrixXd h = (model.w1 * data.features.transpose()).colwise() + model.b1;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = sigmoid(h(i, j));
    Eigen::VectorXd o = h.transpose() * model.w2;
    for (Eigen::Index i = 0; i < o.size(); ++i) o(i) = sigmoid(o(i) + model.b2);

    // output-layer error for sigmoid + cross-entropy
    Eigen::VectorXd delta_out = (o - data.labels.cast<double>()) / static_cast<double>(n);

    AnnGradient g;
    g.w2 = h * delta_out;
    g.b2 = delta_out.sum();
    Eigen::MatrixXd delta_hidden =
        (model.w2 * delta_out.transpose()).cwiseProduct(h).cwiseProduct(
            (1.0 - h.array()).matrix());
    g.w1 = delta_hidden * data.features;
    g.b1 = delta_hidden.rowwise().sum();
    g.w1 += lambda * model.w1.unaryExpr([](double w) {
        return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
    });
    return g;
}

namespace {

// flattened-parameter view used by the SCG loop
struct ParamVec {
    static Eigen::VectorXd pack(const AnnModel& m) {
        const Eigen::Index nw1 = m.w1.size(), nb1 = m.b1.size(), nw2 = m.w2.size();
        Eigen::VectorXd v(nw1 + nb1 + nw2 + 1);
        v.head(nw1) = Eigen::Map<const Eigen::VectorXd>(m.w1.data(), nw1);
        v.segment(nw1, nb1) = m.b1;
        v.segment(nw1 + nb1, nw2) = m.w2;
        v(nw1 + nb1 + nw2) = m.b2;
        return v;
    }
    static Eigen::VectorXd pack(const AnnGradient& g) {
        const Eigen::Index nw1 = g.w1.size(), nb1 = g.b1.size(), nw2 = g.w2.size();
        Eigen::VectorXd v(nw1 + nb1 + nw2 + 1);
        v.head(nw1) = Eigen::Map<const Eigen::VectorXd>(g.w1.data(), nw1);
        v.segment(nw1, nb1) = g.b1;
        v.segment(nw1 + nb1, nw2) = g.w2;
        v(nw1 + nb1 + nw2) = g.b2;
        return v;
    }
    static void unpack(const Eigen::VectorXd& v, AnnModel& m) {
        const Eigen::Index nw1 = m.w1.size(), nb1 = m.b1.size(), nw2 = m.w2.size();
        Eigen::Map<Eigen::VectorXd>(m.w1.data(), nw1) = v.head(nw1);
        m.b1 = v.segment(nw1, nb1);
        m.w2 = v.segment(nw1 + nb1, nw2);
        m.b2 = v(nw1 + nb1 + nw2);
    }
};

}  // namespace

AnnModel train_ann(const PairedDataset& train, const PairedDataset& validation,
                   const TrainingConfig& cfg, RngStream& rng) {
    if (train.size() == 0 || validation.size() == 0)
        throw std::invalid_argument("train and validation sets must be non-empty");
    if (cfg.hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
    const int m = static_cast<int>(train.num_features());

    AnnModel model;
    model.w1.resize(cfg.hidden, m);
    model.b1.resize(cfg.hidden);
    model.w2.resize(cfg.hidden);
    const double scale1 = 1.0 / std::sqrt(static_cast<double>(m));
    const double scale2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
    for (Eigen::Index i = 0; i < model.w1.size(); ++i)
        model.w1.data()[i] = scale1 * rng.gaussian();
    for (Eigen::Index i = 0; i < model.b1.size(); ++i) model.b1(i) = scale1 * rng.gaussian();
    for (Eigen::Index i = 0; i < model.w2.size(); ++i) model.w2(i) = scale2 * rng.gaussian();
    model.b2 = scale2 * rng.gaussian();

    Eigen::VectorXd w = ParamVec::pack(model);
    auto loss_at = [&](const Eigen::VectorXd& v) {
        ParamVec::unpack(v, model);
        return ann_loss(model, train, cfg.lambda);
    };
    auto grad_at = [&](const Eigen::VectorXd& v) {
        ParamVec::unpack(v, model);
        return ParamVec::pack(ann_gradient(model, train, cfg.lambda));
    };
    auto validation_ce = [&](const Eigen::VectorXd& v) {
        ParamVec::unpack(v, model);
        return cross_entropy(ann_outputs(model, validation.features), validation.labels);
    };

    // scaled conjugate gradient (Moller 1993)
    const Eigen::Index dim = w.size();
    double f = loss_at(w);
    if (!std::isfinite(f)) throw std::runtime_error("non-finite loss at initialization");
    Eigen::VectorXd r = -grad_at(w);
    Eigen::VectorXd p = r;
    double lambda_scg = 1e-6, lambda_bar = 0.0;
    bool success = true;
    double delta = 0.0;

    Eigen::VectorXd best_w = w;
    double best_val = validation_ce(w);
    int stall = 0;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        const double p_norm2 = p.squaredNorm();
        if (p_norm2 == 0.0) break;
        if (success) {
            const double sigma = 1e-4 / std::sqrt(p_norm2);
            const Eigen::VectorXd s = (grad_at(w + sigma * p) + r) / sigma;  // r = -grad(w)
            delta = p.dot(s);
        }
        delta += (lambda_scg - lambda_bar) * p_norm2;
        if (delta <= 0.0) {
            lambda_bar = 2.0 * (lambda_scg - delta / p_norm2);
            delta = -delta + lambda_scg * p_norm2;
            lambda_scg = lambda_bar;
        }
        const double mu = p.dot(r);
        const double alpha = mu / delta;
        const Eigen::VectorXd w_new = w + alpha * p;
        const double f_new = loss_at(w_new);
        if (!std::isfinite(f_new))
            throw std::runtime_error("training diverged (non-finite loss) at iteration " +
                                     std::to_string(iter));
        const double comparison = 2.0 * delta * (f - f_new) / (mu * mu);
        if (comparison >= 0.0) {
            w = w_new;
            f = f_new;
            const Eigen::VectorXd r_new = -grad_at(w);
            lambda_bar = 0.0;
            success = true;
            if (iter % static_cast<int>(dim) == 0) {
                p = r_new;
            } else {
                const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
                p = r_new + beta * p;
            }
            r = r_new;
            if (comparison >= 0.75) lambda_scg *= 0.25;

            const double val = validation_ce(w);
            if (val < best_val) {
                best_val = val;
                best_w = w;
                stall = 0;
            } else if (++stall >= cfg.patience) {
                break;
            }
            if (r.norm() < cfg.tolerance) break;
        } else {
            lambda_bar = lambda_scg;
            success = false;
        }
        if (comparison < 0.25) lambda_scg += delta * (1.0 - comparison) / p_norm2;
        if (lambda_scg > 1e20) break;
    }

    ParamVec::unpack(best_w, model);
    model.theta = 0.5;
    return model;
}

ThresholdChoice tune_threshold(const AnnModel& model, const PairedDataset& validation) {
    if (validation.size() == 0) throw std::invalid_argument("empty validation set");
    ThresholdChoice choice;
    const int pos = (validation.labels.array() == 1).count();
    if (pos == 0 || pos == validation.size()) {
        choice.degenerate = true;   // accuracy constant in theta
        return choice;
    }
    const Eigen::VectorXd outputs = ann_outputs(model, validation.features);
    double best_acc = -1.0;
    for (int g = 1; g <= 19; ++g) {
        const double theta = 0.05 * g;
        int correct = 0;
        for (Eigen::Index i = 0; i < outputs.size(); ++i)
            correct += ((outputs(i) >= theta ? 1 : 0) == validation.labels(i));
        const double acc = static_cast<double>(correct) / static_cast<double>(outputs.size());
        const bool better =
            acc > best_acc ||
            (acc == best_acc &&
             (std::abs(theta - 0.5) < std::abs(choice.theta - 0.5) - 1e-12));
        if (better) {
            best_acc = acc;
            choice.theta = theta;
        }
    }
    return choice;
}

int classify(const AnnModel& model, const Eigen::VectorXd& x) {
    return ann_forward(model, x) >= model.theta ? 1 : 0;
}

Metrics evaluate(const AnnModel& model, const PairedDataset& test) {
    if (test.size() == 0) throw std::invalid_argument("empty test set");
    const Eigen::VectorXd outputs = ann_outputs(model, test.features);
    Eigen::VectorXi predicted(test.size());
    for (Eigen::Index i = 0; i < test.size(); ++i)
        predicted(i) = outputs(i) >= model.theta ? 1 : 0;
    return compute_metrics(predicted, test.labels);
}

// ---------------------------------------------------- logistic regression

LogRegModel train_logreg(const Eigen::MatrixXd& x, const Eigen::VectorXi& t) {
    if (x.rows() != t.size() || x.rows() == 0)
        throw std::invalid_argument("feature/label size mismatch or empty data");
    if (!x.allFinite()) throw std::invalid_argument("non-finite features");
    const Eigen::Index n = x.rows(), m = x.cols();
    Eigen::MatrixXd xa(n, m + 1);   // intercept column appended
    xa.leftCols(m) = x;
    xa.col(m).setOnes();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m + 1);
    LogRegModel model;
    for (int iter = 1; iter <= 100; ++iter) {
        model.iterations = iter;
        Eigen::VectorXd eta = xa * w;
        Eigen::VectorXd y(n), s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = sigmoid(eta(i));
            s(i) = y(i) * (1.0 - y(i));
        }
        Eigen::MatrixXd hess = xa.transpose() * s.asDiagonal() * xa;
        hess.diagonal().array() += 1e-8;
        const Eigen::VectorXd rhs =
            xa.transpose() * (s.asDiagonal() * (xa * w) + t.cast<double>() - y);
        const Eigen::VectorXd w_new = hess.ldlt().solve(rhs);
        const double step = (w_new - w).cwiseAbs().maxCoeff();
        w = w_new;
        if (w.cwiseAbs().maxCoeff() > 1e4) {
            model.separation_flag = true;
            break;
        }
        if (step < 1e-8) {
            model.converged = true;
            break;
        }
    }
    model.weights = w.head(m);
    model.intercept = w(m);
    if (!model.separation_flag) {
        // separated data can also stall with saturated probabilities while
        // the ridge keeps the weights finite; catch that case by the
        // residuals rather than the weight norm
        Eigen::VectorXd eta = xa * w;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(t(i) - sigmoid(eta(i))));
        if (worst < 1e-6) model.separation_flag = true;
    }
    return model;
}

Eigen::VectorXd logreg_outputs(const LogRegModel& model, const Eigen::MatrixXd& x) {
    Eigen::VectorXd eta = x * model.weights;
    eta.array() += model.intercept;
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = sigmoid(eta(i));
    return eta;
}

Metrics evaluate_logreg(const LogRegModel& model, const PairedDataset& test, double theta) {
    const Eigen::VectorXd outputs = logreg_outputs(model, test.features);
    Eigen::VectorXi predicted(test.size());
    for (Eigen::Index i = 0; i < test.size(); ++i)
        predicted(i) = outputs(i) >= theta ? 1 : 0;
    return compute_metrics(predicted, test.labels);
}

// ----------------------------------------------------------------- ensemble

EnsembleSummary ensemble_run(const PairedDataset& data, const EnsembleConfig& cfg) {
    if (cfg.num_models < 1) throw std::invalid_argument("ensemble needs at least one model");
    std::vector<std::optional<Metrics>> slots(static_cast<std::size_t>(cfg.num_models));
    parallel_for(static_cast<std::size_t>(cfg.num_models), cfg.jobs, [&](std::size_t i) {
        try {
            RngStream split_rng(substream_seed(cfg.seed, kStageSplit, i));
            RngStream init_rng(substream_seed(cfg.seed, kStageInit, i));
            SplitResult parts = split(data, cfg.split, split_rng);
            AnnModel model = train_ann(parts.train, parts.validation, cfg.trainer, init_rng);
            model.theta = tune_threshold(model, parts.validation).theta;
            slots[i] = evaluate(model, parts.test);
        } catch (const std::exception&) {
            slots[i] = std::nullopt;
        }
    });

    EnsembleSummary out;
    for (const auto& slot : slots) {
        if (slot)
            out.per_repeat.push_back(*slot);
        else
            ++out.failures;
    }
    if (out.per_repeat.empty()) throw std::runtime_error("all ensemble repeats failed");

    auto summarize = [&](auto getter, double& mean, double& stddev) {
        const double n = static_cast<double>(out.per_repeat.size());
        double sum = 0.0;
        for (const auto& m : out.per_repeat) sum += getter(m);
        mean = sum / n;
        if (out.per_repeat.size() < 2) {
            stddev = 0.0;
            return;
        }
        double ss = 0.0;
        for (const auto& m : out.per_repeat) {
            const double d = getter(m) - mean;
            ss += d * d;
        }
        stddev = std::sqrt(ss / (n - 1.0));
    };
    summarize([](const Metrics& m) { return m.accuracy; }, out.mean_accuracy, out.std_accuracy);
    summarize([](const Metrics& m) { return m.fpr; }, out.mean_fpr, out.std_fpr);
    summarize([](const Metrics& m) { return m.fnr; }, out.mean_fnr, out.std_fnr);
    return out;
}

}  // namespace twinzyg::models
