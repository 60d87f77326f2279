#include "twinzyg/selection.hpp"

#include <algorithm>
#include <stdexcept>

#include "twinzyg/parallel.hpp"

namespace twinzyg::selection {

namespace {
constexpr std::uint64_t kStageCandidate = 0x43414e44ULL;
constexpr std::uint64_t kStageRunSplit = 0x52554e53ULL;
}  // namespace

std::vector<int> SelectionTrace::order() const {
    std::vector<int> out;
    out.reserve(steps.size());
    for (const auto& step : steps) out.push_back(step.chosen);
    return out;
}

SelectionTrace hill_climb(int num_variables, const SubsetEvaluator& evaluate,
                          std::uint64_t seed, unsigned jobs) {
    if (num_variables < 1) throw std::invalid_argument("need at least one variable");
    SelectionTrace trace;
    std::vector<int> chosen;
    std::vector<int> remaining(static_cast<std::size_t>(num_variables));
    for (int v = 0; v < num_variables; ++v) remaining[static_cast<std::size_t>(v)] = v;

    int iteration = 0;
    while (!remaining.empty()) {
        std::vector<CandidateScore> scores(remaining.size());
        parallel_for(remaining.size(), jobs, [&](std::size_t c) {
            CandidateScore& score = scores[c];
            score.variable = remaining[c];
            std::vector<int> subset = chosen;
            subset.push_back(score.variable);
            std::sort(subset.begin(), subset.end());
            const std::uint64_t candidate_seed = substream_seed(
                seed, kStageCandidate,
                static_cast<std::uint64_t>(iteration) * static_cast<std::uint64_t>(num_variables) +
                    static_cast<std::uint64_t>(score.variable));
            try {
                score.metrics = evaluate(subset, candidate_seed);
            } catch (const std::exception&) {
                score.failed = true;
                score.metrics = models::Metrics{};   // accuracy 0
            }
        });

        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c) {
            if (models::metrics_better(scores[c].metrics, scores[best].metrics)) best = c;
            // equal metrics: keep the lower variable index (remaining is ascending)
        }
        SelectionStep step;
        step.chosen = scores[best].variable;
        step.metrics = scores[best].metrics;
        step.candidates = std::move(scores);
        chosen.push_back(step.chosen);
        remaining.erase(std::find(remaining.begin(), remaining.end(), step.chosen));
        trace.steps.push_back(std::move(step));
        ++iteration;
    }
    return trace;
}

DatasetRun hill_climb_run(const PairedDataset& data,
                          const models::TrainingConfig& trainer_cfg,
                          const models::SplitSpec& split_spec,
                          std::uint64_t seed, unsigned jobs) {
    DatasetRun run;
    // the split is fixed once per run so candidate comparisons are paired
    RngStream split_rng(substream_seed(seed, kStageRunSplit, 0));
    run.split = models::split(data, split_spec, split_rng);

    const models::SplitResult& parts = run.split;
    SubsetEvaluator evaluate = [&parts, &trainer_cfg](const std::vector<int>& subset,
                                                      std::uint64_t candidate_seed) {
        const PairedDataset train = parts.train.select_features(subset);
        const PairedDataset validation = parts.validation.select_features(subset);
        RngStream rng(candidate_seed);
        models::AnnModel model = models::train_ann(train, validation, trainer_cfg, rng);
        model.theta = models::tune_threshold(model, validation).theta;
        return models::evaluate(model, validation);
    };
    run.trace = hill_climb(static_cast<int>(data.num_features()), evaluate, seed, jobs);
    return run;
}

SelectionTrace hill_climb_dataset(const PairedDataset& data,
                                  const models::TrainingConfig& trainer_cfg,
                                  const models::SplitSpec& split_spec,
                                  std::uint64_t seed, unsigned jobs) {
    return hill_climb_run(data, trainer_cfg, split_spec, seed, jobs).trace;
}

FrequencyMatrix accumulate(const std::vector<SelectionTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("no traces to accumulate");
    const auto m = static_cast<int>(traces.front().steps.size());
    FrequencyMatrix freq;
    freq.gamma = Eigen::MatrixXi::Zero(m, m);
    freq.run_count = static_cast<int>(traces.size());
    for (const auto& trace : traces) {
        if (static_cast<int>(trace.steps.size()) != m)
            throw std::invalid_argument("traces cover different variable counts");
        for (int i = 0; i < m; ++i)
            ++freq.gamma(trace.steps[static_cast<std::size_t>(i)].chosen, i);
    }
    return freq;
}

ImportanceRanking importance(const FrequencyMatrix& freq) {
    const auto m = static_cast<int>(freq.gamma.rows());
    ImportanceRanking out;
    out.j.resize(m);
    for (int v = 0; v < m; ++v) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
            sum += static_cast<double>(freq.gamma(v, i)) / static_cast<double>(i + 1);
        out.j(v) = sum;
    }
    out.ranking.resize(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v) out.ranking[static_cast<std::size_t>(v)] = v;
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [&](int a, int b) { return out.j(a) > out.j(b); });
    return out;
}

OptimalSubset optimal_subset(const SelectionTrace& trace) {
    if (trace.steps.empty()) throw std::invalid_argument("empty selection trace");
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.steps.size(); ++i)
        if (models::metrics_better(trace.steps[i].metrics, trace.steps[best].metrics)) best = i;
    OptimalSubset out;
    for (std::size_t i = 0; i <= best; ++i) out.variables.push_back(trace.steps[i].chosen);
    out.metrics = trace.steps[best].metrics;
    return out;
}

}  // namespace twinzyg::selection
