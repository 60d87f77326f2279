#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "twinzyg/dataset.hpp"
#include "twinzyg/models.hpp"

namespace twinzyg::selection {

struct CandidateScore {
    int variable = 0;
    models::Metrics metrics;
    bool failed = false;   // trainer failure, scored as accuracy 0
};

struct SelectionStep {
    int chosen = 0;                           // 0-based variable index
    models::Metrics metrics;                  // best candidate's metrics
    std::vector<CandidateScore> candidates;   // all candidates this step
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;   // one per variable, in pick order
    std::vector<int> order() const;
};

// Scores a variable subset (0-based indices, ascending). The candidate
// seed keys the trainer's RNG substream so parallel evaluation stays
// deterministic.
using SubsetEvaluator =
    std::function<models::Metrics(const std::vector<int>& subset, std::uint64_t candidate_seed)>;

// Greedy forward selection: start empty, each iteration score every
// remaining variable on (current set + candidate) and append the winner
// under (accuracy desc, FPR asc, FNR asc, lowest index). Continues until
// all variables are chosen. Candidate evaluations may run in parallel.
SelectionTrace hill_climb(int num_variables, const SubsetEvaluator& evaluate,
                          std::uint64_t seed, unsigned jobs = 1);

struct DatasetRun {
    SelectionTrace trace;
    models::SplitResult split;   // the run's fixed split, for final retraining
};

// Production evaluator: one split per run (shared by every candidate so
// comparisons are paired); candidates are trained at the reduced config
// and scored on the validation set.
DatasetRun hill_climb_run(const PairedDataset& data,
                          const models::TrainingConfig& trainer_cfg,
                          const models::SplitSpec& split_spec,
                          std::uint64_t seed, unsigned jobs = 1);

SelectionTrace hill_climb_dataset(const PairedDataset& data,
                                  const models::TrainingConfig& trainer_cfg,
                                  const models::SplitSpec& split_spec,
                                  std::uint64_t seed, unsigned jobs = 1);

struct FrequencyMatrix {
    Eigen::MatrixXi gamma;   // gamma(variable, iteration), both 0-based
    int run_count = 0;
};

FrequencyMatrix accumulate(const std::vector<SelectionTrace>& traces);

struct ImportanceRanking {
    Eigen::VectorXd j;          // harmonic-weighted importance per variable
    std::vector<int> ranking;   // variable indices, descending J, index tie-break
};

// J(variable) = sum_i gamma(variable, i) / (i + 1) over 0-based i.
ImportanceRanking importance(const FrequencyMatrix& freq);

struct OptimalSubset {
    std::vector<int> variables;   // the winning prefix, in pick order
    models::Metrics metrics;
};

// Best prefix of the trace under the metric order; earliest prefix wins
// ties.
OptimalSubset optimal_subset(const SelectionTrace& trace);

}  // namespace twinzyg::selection
