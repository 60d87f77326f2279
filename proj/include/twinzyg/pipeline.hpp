#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "twinzyg/models.hpp"
#include "twinzyg/selection.hpp"
#include "twinzyg/simulate.hpp"

namespace twinzyg::cli {

// Invalid configuration / invalid input; mapped to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // pipeline
    std::vector<std::string> stages;   // executed in canonical stage order
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    // simulate
    int study = 2;
    int pairs_mz = 50;
    int pairs_dz = 50;
    std::string sharing = "independent";
    std::string simulate_out = "data.csv";
    // encode
    std::string encode_in;
    std::string encode_out = "coefficients.txt";
    int degree = 119;
    int block = 1024;
    // correlate
    std::string correlate_pairs;        // manifest: "fileA fileB label" per line
    std::string parcellation;
    std::string correlate_out = "features.csv";
    // train
    std::string train_in;
    int hidden = 200;
    double lambda = 0.01;
    int num_models = 200;
    double split_train = 0.70, split_validation = 0.15, split_test = 0.15;
    std::string train_report = "train_report.json";
    // hillclimb
    std::string hillclimb_in;
    int runs = 100;
    int hc_hidden = 20;
    int final_hidden = 200;
    std::string trace_out = "trace.json";
    // report
    std::string report_trace;
    std::string report_csv = "gamma.csv";

    // INI-style file: [section] headers, key = value lines, '#' comments.
    // Unknown sections or keys are rejected.
    static ExperimentConfig load(const std::string& path);
    void validate() const;

    sim::SimulationConfig simulation_config() const;
    models::EnsembleConfig ensemble_config() const;
};

// ----------------------------------------------------------- subcommands

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path);

// Fit CSR coefficients for a time-series matrix file, streaming column
// blocks through the solver. Throws ConfigError when degree+1 > p.
void cmd_encode(const std::string& in_path, const std::string& out_path, int degree,
                int block);

void cmd_correlate(const std::string& manifest_path, const std::string& parcellation_path,
                   const std::string& out_path);

struct TrainOutcome {
    models::EnsembleSummary summary;
    bool any_failures = false;
};

TrainOutcome cmd_train(const ExperimentConfig& cfg, const std::string& in_path,
                       const std::string& report_path);

struct HillClimbOutcome {
    std::vector<selection::SelectionTrace> traces;
    selection::FrequencyMatrix gamma;
    selection::ImportanceRanking ranking;
    std::vector<std::vector<int>> optimal_subsets;      // per run, pick order
    std::vector<models::Metrics> optimal_test_metrics;  // full-size retrain on subset
    std::vector<models::Metrics> full_test_metrics;     // full-size, all features
    double mean_optimal_accuracy = 0.0;
    double mean_full_accuracy = 0.0;
};

HillClimbOutcome run_hill_climb_ensemble(const PairedDataset& data,
                                         const ExperimentConfig& cfg);

HillClimbOutcome cmd_hillclimb(const ExperimentConfig& cfg, const std::string& in_path,
                               const std::string& trace_path);

void cmd_report(const std::string& trace_path, const std::string& csv_path);

// ------------------------------------------------------------- pipeline

// Executes the configured stages in order simulate -> encode -> correlate
// -> train -> hillclimb -> report, writing each stage's outputs (and a
// run_report.json) under cfg.out_dir. Returns the process exit code:
// 0 success, 1 stage failure (a partial report is still written),
// 2 config validation failure (nothing written).
int run_pipeline(const ExperimentConfig& cfg);

}  // namespace twinzyg::cli
