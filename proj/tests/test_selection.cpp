#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "twinzyg/selection.hpp"
#include "twinzyg/simulate.hpp"

using namespace twinzyg;
using namespace twinzyg::selection;

namespace {

models::Metrics metrics_with(double acc, double fpr = 0.0, double fnr = 0.0) {
    models::Metrics m;
    m.accuracy = acc;
    m.fpr = fpr;
    m.fnr = fnr;
    return m;
}

// deterministic metric table keyed by sorted subset
using StubTable = std::map<std::vector<int>, models::Metrics>;

SubsetEvaluator stub(const StubTable& table) {
    return [&table](const std::vector<int>& subset, std::uint64_t) {
        const auto it = table.find(subset);
        if (it == table.end()) throw std::runtime_error("subset missing from stub table");
        return it->second;
    };
}

}  // namespace

TEST_CASE("hill_climb: single variable trivial trace") {
    StubTable table;
    table[{0}] = metrics_with(0.8);
    const auto trace = hill_climb(1, stub(table), 0);
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.steps[0].chosen == 0);
    CHECK(trace.steps[0].metrics.accuracy == 0.8);
}

TEST_CASE("hill_climb: reproduces brute-force greedy selection on a stub") {
    // 3 variables, full metric table
    StubTable table;
    table[{0}] = metrics_with(0.6);
    table[{1}] = metrics_with(0.7);
    table[{2}] = metrics_with(0.65);
    table[{0, 1}] = metrics_with(0.72);
    table[{1, 2}] = metrics_with(0.75);
    table[{0, 2}] = metrics_with(0.5);
    table[{0, 1, 2}] = metrics_with(0.74);
    const auto trace = hill_climb(3, stub(table), 0);
    // greedy: pick 1 (0.7); then {1,2}=0.75 beats {0,1}=0.72; then all
    CHECK(trace.order() == std::vector<int>{1, 2, 0});
    CHECK(trace.steps[1].metrics.accuracy == 0.75);

    // brute-force equivalence at every step
    std::vector<int> current;
    std::set<int> remaining{0, 1, 2};
    for (const auto& step : trace.steps) {
        int best = -1;
        models::Metrics best_m;
        for (int cand : remaining) {
            auto sub = current;
            sub.push_back(cand);
            std::sort(sub.begin(), sub.end());
            const auto m = table.at(sub);
            if (best < 0 || models::metrics_better(m, best_m)) {
                best = cand;
                best_m = m;
            }
        }
        CHECK(step.chosen == best);
        current.push_back(best);
        remaining.erase(best);
    }
}

TEST_CASE("hill_climb: tie-break falls through FPR, FNR, then lowest index") {
    StubTable table;
    table[{0}] = metrics_with(0.7, 0.3, 0.1);
    table[{1}] = metrics_with(0.7, 0.2, 0.3);   // wins on FPR
    table[{2}] = metrics_with(0.7, 0.3, 0.1);
    table[{0, 1}] = metrics_with(0.7, 0.1, 0.2);
    table[{1, 2}] = metrics_with(0.7, 0.1, 0.2);   // ties 0 on all -> lower index wins
    table[{0, 1, 2}] = metrics_with(0.7);
    const auto trace = hill_climb(3, stub(table), 0);
    CHECK(trace.steps[0].chosen == 1);
    CHECK(trace.steps[1].chosen == 0);   // index tie-break
}

TEST_CASE("hill_climb: failing candidates are scored as zero accuracy") {
    StubTable table;
    table[{1}] = metrics_with(0.6);
    table[{0, 1}] = metrics_with(0.7);
    table[{0, 1, 2}] = metrics_with(0.7);
    // {0}, {2}, {1,2} missing -> evaluator throws
    const auto trace = hill_climb(3, stub(table), 0);
    CHECK(trace.steps[0].chosen == 1);
    CHECK(trace.steps[0].candidates.size() == 3);
    int failed = 0;
    for (const auto& c : trace.steps[0].candidates) failed += c.failed;
    CHECK(failed == 2);
}

TEST_CASE("hill_climb: every trace is a permutation") {
    auto cfg = sim::study_preset(3);
    cfg.seed = 4;
    const auto data = sim::generate_dataset(cfg);
    models::TrainingConfig tcfg;
    tcfg.hidden = 20;
    const auto trace = hill_climb_dataset(data, tcfg, models::SplitSpec{}, 9, 4);
    auto order = trace.order();
    std::sort(order.begin(), order.end());
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("hill_climb: planted informative feature is found first") {
    // feature 0 is the label plus tiny noise; features 1..4 pure noise
    RngStream rng(123);
    int hits = 0;
    const int runs = 40;
    for (int run = 0; run < runs; ++run) {
        PairedDataset d;
        d.features.resize(60, 5);
        d.labels.resize(60);
        for (int i = 0; i < 60; ++i) {
            d.labels(i) = i % 2;
            d.features(i, 0) = 0.8 * d.labels(i) + 0.1 + 0.02 * rng.gaussian();
            for (int j = 1; j < 5; ++j) d.features(i, j) = std::tanh(rng.gaussian());
        }
        models::TrainingConfig tcfg;
        tcfg.hidden = 10;
        const auto trace = hill_climb_dataset(d, tcfg, models::SplitSpec{},
                                              substream_seed(5, 0, run), 4);
        hits += trace.steps[0].chosen == 0;
    }
    CHECK(hits >= static_cast<int>(0.95 * runs));
}

TEST_CASE("accumulate: single trace is a permutation matrix") {
    SelectionTrace t;
    for (int chosen : {2, 0, 1}) {
        SelectionStep s;
        s.chosen = chosen;
        t.steps.push_back(s);
    }
    const auto freq = accumulate({t});
    CHECK(freq.run_count == 1);
    CHECK(freq.gamma.sum() == 3);
    CHECK(freq.gamma(2, 0) == 1);
    CHECK(freq.gamma(0, 1) == 1);
    CHECK(freq.gamma(1, 2) == 1);
}

TEST_CASE("accumulate: doubling traces doubles the matrix") {
    SelectionTrace t;
    for (int chosen : {1, 0}) {
        SelectionStep s;
        s.chosen = chosen;
        t.steps.push_back(s);
    }
    const auto freq = accumulate({t, t});
    CHECK(freq.gamma(1, 0) == 2);
    CHECK(freq.gamma(0, 1) == 2);
}

TEST_CASE("accumulate: row and column sums equal the run count") {
    RngStream rng(8);
    std::vector<SelectionTrace> traces;
    const int m = 6, runs = 100;
    for (int run = 0; run < runs; ++run) {
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = m - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
        SelectionTrace t;
        for (int v : perm) {
            SelectionStep s;
            s.chosen = v;
            t.steps.push_back(s);
        }
        traces.push_back(t);
    }
    const auto freq = accumulate(traces);
    for (int i = 0; i < m; ++i) {
        CHECK(freq.gamma.row(i).sum() == runs);
        CHECK(freq.gamma.col(i).sum() == runs);
    }
}

TEST_CASE("accumulate: mismatched sizes rejected") {
    SelectionTrace a, b;
    a.steps.resize(2);
    b.steps.resize(3);
    CHECK_THROWS(accumulate({a, b}));
}

TEST_CASE("importance: hand-computed cases") {
    FrequencyMatrix freq;
    freq.gamma = Eigen::MatrixXi::Zero(3, 3);
    freq.run_count = 10;
    freq.gamma(0, 0) = 10;               // always chosen first -> J = 10
    freq.gamma(1, 0) = 1;
    freq.gamma(1, 1) = 1;                // J = 1 + 1/2
    // variable 2 never chosen -> J = 0
    const auto rank = importance(freq);
    CHECK(rank.j(0) == doctest::Approx(10.0));
    CHECK(rank.j(1) == doctest::Approx(1.5));
    CHECK(rank.j(2) == 0.0);
    CHECK(rank.ranking == std::vector<int>{0, 1, 2});
}

TEST_CASE("importance: moving a count earlier strictly increases J") {
    FrequencyMatrix freq;
    freq.gamma = Eigen::MatrixXi::Zero(4, 4);
    freq.gamma(2, 3) = 5;
    const double before = importance(freq).j(2);
    freq.gamma(2, 3) = 4;
    freq.gamma(2, 1) = 1;
    CHECK(importance(freq).j(2) > before);
}

TEST_CASE("optimal_subset: strictly improving trace keeps everything") {
    SelectionTrace t;
    for (int i = 0; i < 4; ++i) {
        SelectionStep s;
        s.chosen = i;
        s.metrics = metrics_with(0.6 + 0.05 * i);
        t.steps.push_back(s);
    }
    const auto best = optimal_subset(t);
    CHECK(best.variables.size() == 4);
    CHECK(best.metrics.accuracy == doctest::Approx(0.75));
}

TEST_CASE("optimal_subset: peak at step 3 keeps the first three variables") {
    SelectionTrace t;
    const double accs[5] = {0.6, 0.7, 0.8, 0.75, 0.72};
    for (int i = 0; i < 5; ++i) {
        SelectionStep s;
        s.chosen = 4 - i;
        s.metrics = metrics_with(accs[i]);
        t.steps.push_back(s);
    }
    const auto best = optimal_subset(t);
    CHECK(best.variables == std::vector<int>{4, 3, 2});
}

TEST_CASE("optimal_subset: earliest prefix wins ties") {
    SelectionTrace t;
    for (int i = 0; i < 3; ++i) {
        SelectionStep s;
        s.chosen = i;
        s.metrics = metrics_with(0.7, 0.1, 0.1);
        t.steps.push_back(s);
    }
    const auto best = optimal_subset(t);
    CHECK(best.variables == std::vector<int>{0});
}

TEST_CASE("optimal_subset: single step") {
    SelectionTrace t;
    SelectionStep s;
    s.chosen = 0;
    s.metrics = metrics_with(0.9);
    t.steps.push_back(s);
    const auto best = optimal_subset(t);
    CHECK(best.variables == std::vector<int>{0});
}
