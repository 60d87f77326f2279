#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "twinzyg/dataset.hpp"
#include "twinzyg/rng.hpp"

namespace twinzyg::models {

// ---------------------------------------------------------------- metrics

struct Metrics {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double fpr = 0.0;   // FP / (FP + TN)
    double fnr = 0.0;   // FN / (FN + TP)
    bool fpr_defined = true;
    bool fnr_defined = true;
};

// Lexicographic quality order: higher accuracy, then lower FPR, then
// lower FNR. Undefined rates compare as worst.
bool metrics_better(const Metrics& a, const Metrics& b);

Metrics compute_metrics(const Eigen::VectorXi& predicted, const Eigen::VectorXi& actual);

// ------------------------------------------------------------------ split

struct SplitSpec {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct SplitResult {
    PairedDataset train, validation, test;
    std::vector<int> train_idx, validation_idx, test_idx;
};

// Uniform random permutation (no stratification); subset sizes by
// largest-remainder rounding of the ratios. Throws if any subset rounds
// to empty.
SplitResult split(const PairedDataset& data, const SplitSpec& spec, RngStream& rng);

// -------------------------------------------------------------------- ANN

struct AnnModel {
    Eigen::MatrixXd w1;   // hidden x inputs
    Eigen::VectorXd b1;   // hidden
    Eigen::VectorXd w2;   // hidden
    double b2 = 0.0;
    double theta = 0.5;   // discrimination threshold

    int input_dim() const { return static_cast<int>(w1.cols()); }
    int hidden_dim() const { return static_cast<int>(w1.rows()); }
};

struct AnnGradient {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;
    double b2 = 0.0;
};

struct TrainingConfig {
    int hidden = 200;
    double lambda = 0.01;       // L1 strength on first-layer weights
    int max_iterations = 1000;
    int patience = 6;           // early-stopping patience on validation CE
    double tolerance = 1e-8;    // gradient-norm stopping tolerance
};

// o = sigmoid(w2 . sigmoid(W1 x + b1) + b2)
double ann_forward(const AnnModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd ann_outputs(const AnnModel& model, const Eigen::MatrixXd& x);

// Mean cross-entropy (log arguments floored at 1e-12) plus
// lambda * ||W1||_1. Second-layer weights and biases are unpenalized.
double ann_loss(const AnnModel& model, const PairedDataset& data, double lambda);

// Exact gradient of the smooth term plus lambda * sign(W1), sign(0) = 0.
AnnGradient ann_gradient(const AnnModel& model, const PairedDataset& data, double lambda);

// Full-batch scaled-conjugate-gradient minimization of ann_loss with
// early stopping on validation cross-entropy; returns the parameters at
// the best recorded validation loss. Throws on a non-finite loss.
AnnModel train_ann(const PairedDataset& train, const PairedDataset& validation,
                   const TrainingConfig& cfg, RngStream& rng);

struct ThresholdChoice {
    double theta = 0.5;
    bool degenerate = false;   // single-class validation set
};

// Best threshold on the grid {0.05, 0.10, ..., 0.95} by validation
// accuracy; ties broken toward 0.5.
ThresholdChoice tune_threshold(const AnnModel& model, const PairedDataset& validation);

// Threshold rule: output >= theta maps to class 1.
int classify(const AnnModel& model, const Eigen::VectorXd& x);

Metrics evaluate(const AnnModel& model, const PairedDataset& test);

// ---------------------------------------------------- logistic regression

struct LogRegModel {
    Eigen::VectorXd weights;   // per feature
    double intercept = 0.0;
    bool converged = false;
    bool separation_flag = false;   // ||w||_inf exceeded 1e4
    int iterations = 0;
};

// IRLS with w started at 0, stopping at ||dw||_inf < 1e-8 or 100
// iterations; X'SX stabilized with a 1e-8 ridge.
LogRegModel train_logreg(const Eigen::MatrixXd& x, const Eigen::VectorXi& t);

Eigen::VectorXd logreg_outputs(const LogRegModel& model, const Eigen::MatrixXd& x);
Metrics evaluate_logreg(const LogRegModel& model, const PairedDataset& test, double theta = 0.5);

// ----------------------------------------------------------------- ensemble

struct EnsembleConfig {
    TrainingConfig trainer;
    SplitSpec split;
    int num_models = 200;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct EnsembleSummary {
    double mean_accuracy = 0.0, std_accuracy = 0.0;
    double mean_fpr = 0.0, std_fpr = 0.0;
    double mean_fnr = 0.0, std_fnr = 0.0;
    std::vector<Metrics> per_repeat;
    int failures = 0;
};

// Repeats split -> train -> tune threshold -> evaluate with independent
// seed substreams per repeat; deterministic for a given seed regardless
// of the number of jobs.
EnsembleSummary ensemble_run(const PairedDataset& data, const EnsembleConfig& cfg);

}  // namespace twinzyg::models
