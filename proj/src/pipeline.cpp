#include "twinzyg/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "twinzyg/basis.hpp"
#include "twinzyg/matrix_io.hpp"
#include "twinzyg/pairing.hpp"
#include "twinzyg/parallel.hpp"

namespace twinzyg::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatVersion = "1";
constexpr std::uint64_t kStageHillRun = 0x48494c4cULL;
constexpr std::uint64_t kStageFinalSplitless = 0x46494e414cULL;
constexpr std::uint64_t kStageFullModel = 0x46554c4cULL;

const std::vector<std::string> kStageOrder = {"simulate", "encode",    "correlate",
                                              "train",    "hillclimb", "report"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

json metrics_json(const models::Metrics& m) {
    json j;
    j["accuracy"] = m.accuracy;
    j["fpr"] = m.fpr;
    j["fnr"] = m.fnr;
    j["fpr_defined"] = m.fpr_defined;
    j["fnr_defined"] = m.fnr_defined;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    return j;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["stages"] = c.stages;
    j["out_dir"] = c.out_dir;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["simulate"] = {{"study", c.study},
                     {"pairs_mz", c.pairs_mz},
                     {"pairs_dz", c.pairs_dz},
                     {"sharing", c.sharing},
                     {"out", c.simulate_out}};
    j["encode"] = {{"in", c.encode_in},
                   {"out", c.encode_out},
                   {"degree", c.degree},
                   {"block", c.block}};
    j["correlate"] = {{"pairs", c.correlate_pairs},
                      {"parcellation", c.parcellation},
                      {"out", c.correlate_out}};
    j["train"] = {{"in", c.train_in},
                  {"hidden", c.hidden},
                  {"lambda", c.lambda},
                  {"models", c.num_models},
                  {"split", {c.split_train, c.split_validation, c.split_test}},
                  {"report", c.train_report}};
    j["hillclimb"] = {{"in", c.hillclimb_in},
                      {"runs", c.runs},
                      {"hidden", c.hc_hidden},
                      {"final_hidden", c.final_hidden},
                      {"out", c.trace_out}};
    j["report"] = {{"trace", c.report_trace}, {"csv", c.report_csv}};
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace

// ------------------------------------------------------------ config file

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line, section;
    int lineno = 0;
    auto bad = [&](const std::string& what) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') bad("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"pipeline", "simulate",  "encode",
                                                        "correlate", "train",    "hillclimb",
                                                        "report"};
            if (!known.count(section)) bad("unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qualified = section + "." + key;
        try {
            if (qualified == "pipeline.stages") {
                cfg.stages.clear();
                std::stringstream ss(value);
                std::string stage;
                while (std::getline(ss, stage, ',')) {
                    stage = trim(stage);
                    if (std::find(kStageOrder.begin(), kStageOrder.end(), stage) ==
                        kStageOrder.end())
                        bad("unknown stage '" + stage + "'");
                    cfg.stages.push_back(stage);
                }
            } else if (qualified == "pipeline.out_dir") cfg.out_dir = value;
            else if (qualified == "pipeline.seed") cfg.seed = std::stoull(value);
            else if (qualified == "pipeline.jobs") cfg.jobs = static_cast<unsigned>(std::stoul(value));
            else if (qualified == "simulate.study") cfg.study = std::stoi(value);
            else if (qualified == "simulate.pairs_mz") cfg.pairs_mz = std::stoi(value);
            else if (qualified == "simulate.pairs_dz") cfg.pairs_dz = std::stoi(value);
            else if (qualified == "simulate.sharing") cfg.sharing = value;
            else if (qualified == "simulate.out") cfg.simulate_out = value;
            else if (qualified == "encode.in") cfg.encode_in = value;
            else if (qualified == "encode.out") cfg.encode_out = value;
            else if (qualified == "encode.degree") cfg.degree = std::stoi(value);
            else if (qualified == "encode.block") cfg.block = std::stoi(value);
            else if (qualified == "correlate.pairs") cfg.correlate_pairs = value;
            else if (qualified == "correlate.parcellation") cfg.parcellation = value;
            else if (qualified == "correlate.out") cfg.correlate_out = value;
            else if (qualified == "train.in") cfg.train_in = value;
            else if (qualified == "train.hidden") cfg.hidden = std::stoi(value);
            else if (qualified == "train.lambda") cfg.lambda = std::stod(value);
            else if (qualified == "train.models") cfg.num_models = std::stoi(value);
            else if (qualified == "train.split") {
                std::stringstream ss(value);
                char comma;
                if (!(ss >> cfg.split_train >> comma >> cfg.split_validation >> comma >>
                      cfg.split_test))
                    bad("split must be 'train,validation,test'");
            } else if (qualified == "train.report") cfg.train_report = value;
            else if (qualified == "hillclimb.in") cfg.hillclimb_in = value;
            else if (qualified == "hillclimb.runs") cfg.runs = std::stoi(value);
            else if (qualified == "hillclimb.hidden") cfg.hc_hidden = std::stoi(value);
            else if (qualified == "hillclimb.final_hidden") cfg.final_hidden = std::stoi(value);
            else if (qualified == "hillclimb.out") cfg.trace_out = value;
            else if (qualified == "report.trace") cfg.report_trace = value;
            else if (qualified == "report.csv") cfg.report_csv = value;
            else bad("unknown key '" + qualified + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            bad("invalid value for '" + qualified + "'");
        }
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (study < 1 || study > 3) throw ConfigError("study must be 1, 2 or 3");
    if (pairs_mz < 1 || pairs_dz < 1) throw ConfigError("pair counts must be >= 1");
    if (sharing != "shared" && sharing != "independent")
        throw ConfigError("sharing must be 'shared' or 'independent'");
    if (degree < 0) throw ConfigError("degree must be non-negative");
    if (block < 1) throw ConfigError("block size must be >= 1");
    if (hidden < 1 || hc_hidden < 1 || final_hidden < 1)
        throw ConfigError("hidden widths must be >= 1");
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (num_models < 1) throw ConfigError("ensemble size must be >= 1");
    if (runs < 1) throw ConfigError("hill-climbing run count must be >= 1");
    if (!(split_train > 0.0 && split_validation > 0.0 && split_test > 0.0))
        throw ConfigError("split ratios must be positive");
    if (std::abs(split_train + split_validation + split_test - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

sim::SimulationConfig ExperimentConfig::simulation_config() const {
    auto scfg = sim::study_preset(study);
    scfg.n_mz = pairs_mz;
    scfg.n_dz = pairs_dz;
    scfg.sharing =
        sharing == "shared" ? sim::SharingMode::Shared : sim::SharingMode::Independent;
    scfg.seed = seed;
    return scfg;
}

models::EnsembleConfig ExperimentConfig::ensemble_config() const {
    models::EnsembleConfig ecfg;
    ecfg.trainer.hidden = hidden;
    ecfg.trainer.lambda = lambda;
    ecfg.split = {split_train, split_validation, split_test};
    ecfg.num_models = num_models;
    ecfg.seed = seed;
    ecfg.jobs = jobs;
    return ecfg;
}

// ----------------------------------------------------------- subcommands

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path) {
    cfg.validate();
    const auto data = sim::generate_dataset(cfg.simulation_config());
    data.save_csv(out_path);
}

void cmd_encode(const std::string& in_path, const std::string& out_path, int degree,
                int block) {
    const Eigen::MatrixXd raw = io::read_matrix(in_path);
    if (degree + 1 > raw.rows())
        throw ConfigError("degree " + std::to_string(degree) + " needs at least " +
                          std::to_string(degree + 1) + " time samples, input has " +
                          std::to_string(raw.rows()));
    const auto grid = basis::TimeGrid::uniform(raw.rows());
    const auto design = basis::build_design(grid, degree);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.matrix);
    if (qr.rank() < design.matrix.cols()) throw ConfigError("rank-deficient design");

    // column blocks keep the working set at O(p * block)
    const Eigen::Index n = raw.cols();
    Eigen::MatrixXd coeffs(degree + 1, n);
    for (Eigen::Index start = 0; start < n; start += block) {
        const Eigen::Index width = std::min<Eigen::Index>(block, n - start);
        Eigen::MatrixXd chunk = raw.middleCols(start, width);
        chunk.rowwise() -= chunk.colwise().mean().eval();
        coeffs.middleCols(start, width) = qr.solve(chunk);
    }
    io::write_matrix(out_path, coeffs);
}

void cmd_correlate(const std::string& manifest_path, const std::string& parcellation_path,
                   const std::string& out_path) {
    const auto parc = pairing::Parcellation::load(parcellation_path);
    std::ifstream manifest(manifest_path);
    if (!manifest) throw ConfigError("cannot open pair manifest '" + manifest_path + "'");

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out.precision(17);

    std::string line;
    int lineno = 0, pairs = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::stringstream ss(line);
        std::string path_a, path_b;
        int label;
        if (!(ss >> path_a >> path_b >> label) || (label != 0 && label != 1))
            throw ConfigError(manifest_path + ":" + std::to_string(lineno) +
                              ": expected 'fileA fileB label(0|1)'");
        basis::CsrCoefficients a, b;
        a.values = io::read_matrix(path_a);
        b.values = io::read_matrix(path_b);
        a.degree = static_cast<int>(a.values.rows()) - 1;
        b.degree = static_cast<int>(b.values.rows()) - 1;
        const Eigen::VectorXd features = pairing::pair_to_features(a, b, parc);
        for (Eigen::Index i = 0; i < features.size(); ++i) out << features(i) << ',';
        out << label << '\n';
        ++pairs;
    }
    if (pairs == 0) throw ConfigError("pair manifest '" + manifest_path + "' is empty");
}

TrainOutcome cmd_train(const ExperimentConfig& cfg, const std::string& in_path,
                       const std::string& report_path) {
    cfg.validate();
    const auto data = PairedDataset::load_csv(in_path);
    TrainOutcome outcome;
    outcome.summary = models::ensemble_run(data, cfg.ensemble_config());
    outcome.any_failures = outcome.summary.failures > 0;

    json j;
    j["format_version"] = kFormatVersion;
    j["config"] = config_json(cfg);
    j["dataset"] = {{"path", in_path},
                    {"pairs", data.size()},
                    {"features", data.num_features()}};
    j["metrics"] = {{"accuracy", {{"mean", outcome.summary.mean_accuracy},
                                  {"std", outcome.summary.std_accuracy}}},
                    {"fpr", {{"mean", outcome.summary.mean_fpr},
                             {"std", outcome.summary.std_fpr}}},
                    {"fnr", {{"mean", outcome.summary.mean_fnr},
                             {"std", outcome.summary.std_fnr}}}};
    j["failures"] = outcome.summary.failures;
    json repeats = json::array();
    for (const auto& m : outcome.summary.per_repeat) repeats.push_back(metrics_json(m));
    j["per_repeat"] = repeats;
    write_json(report_path, j);
    return outcome;
}

HillClimbOutcome run_hill_climb_ensemble(const PairedDataset& data,
                                         const ExperimentConfig& cfg) {
    cfg.validate();
    const models::SplitSpec split_spec{cfg.split_train, cfg.split_validation, cfg.split_test};
    models::TrainingConfig reduced;
    reduced.hidden = cfg.hc_hidden;
    reduced.lambda = cfg.lambda;
    models::TrainingConfig full;
    full.hidden = cfg.final_hidden;
    full.lambda = cfg.lambda;

    HillClimbOutcome out;
    out.traces.resize(static_cast<std::size_t>(cfg.runs));
    out.optimal_subsets.resize(static_cast<std::size_t>(cfg.runs));
    out.optimal_test_metrics.resize(static_cast<std::size_t>(cfg.runs));
    out.full_test_metrics.resize(static_cast<std::size_t>(cfg.runs));

    parallel_for(static_cast<std::size_t>(cfg.runs), cfg.jobs, [&](std::size_t r) {
        const std::uint64_t run_seed = substream_seed(cfg.seed, kStageHillRun, r);
        const auto run = selection::hill_climb_run(data, reduced, split_spec, run_seed, 1);
        const auto best = selection::optimal_subset(run.trace);

        auto retrain = [&](std::vector<int> subset, std::uint64_t tag) {
            std::sort(subset.begin(), subset.end());
            const PairedDataset train = run.split.train.select_features(subset);
            const PairedDataset validation = run.split.validation.select_features(subset);
            const PairedDataset test = run.split.test.select_features(subset);
            RngStream rng(substream_seed(run_seed, tag, 0));
            models::AnnModel model = models::train_ann(train, validation, full, rng);
            model.theta = models::tune_threshold(model, validation).theta;
            return models::evaluate(model, test);
        };
        out.optimal_test_metrics[r] = retrain(best.variables, kStageFinalSplitless);
        std::vector<int> all(static_cast<std::size_t>(data.num_features()));
        std::iota(all.begin(), all.end(), 0);
        out.full_test_metrics[r] = retrain(all, kStageFullModel);

        out.traces[r] = run.trace;
        out.optimal_subsets[r] = best.variables;
    });

    out.gamma = selection::accumulate(out.traces);
    out.ranking = selection::importance(out.gamma);
    for (const auto& m : out.optimal_test_metrics) out.mean_optimal_accuracy += m.accuracy;
    for (const auto& m : out.full_test_metrics) out.mean_full_accuracy += m.accuracy;
    out.mean_optimal_accuracy /= static_cast<double>(cfg.runs);
    out.mean_full_accuracy /= static_cast<double>(cfg.runs);
    return out;
}

HillClimbOutcome cmd_hillclimb(const ExperimentConfig& cfg, const std::string& in_path,
                               const std::string& trace_path) {
    const auto data = PairedDataset::load_csv(in_path);
    auto out = run_hill_climb_ensemble(data, cfg);

    json j;
    j["format_version"] = kFormatVersion;
    j["config"] = config_json(cfg);
    j["dataset"] = {{"path", in_path},
                    {"pairs", data.size()},
                    {"features", data.num_features()}};
    json runs = json::array();
    for (std::size_t r = 0; r < out.traces.size(); ++r) {
        json run;
        run["sequence"] = out.traces[r].order();
        json steps = json::array();
        for (const auto& step : out.traces[r].steps) {
            json s;
            s["chosen"] = step.chosen;
            s["metrics"] = metrics_json(step.metrics);
            steps.push_back(s);
        }
        run["steps"] = steps;
        run["optimal_subset"] = out.optimal_subsets[r];
        run["optimal_test_metrics"] = metrics_json(out.optimal_test_metrics[r]);
        run["full_test_metrics"] = metrics_json(out.full_test_metrics[r]);
        runs.push_back(run);
    }
    j["runs"] = runs;
    const int m = static_cast<int>(out.gamma.gamma.rows());
    json gamma = json::array();
    for (int v = 0; v < m; ++v) {
        json row = json::array();
        for (int i = 0; i < m; ++i) row.push_back(out.gamma.gamma(v, i));
        gamma.push_back(row);
    }
    j["gamma"] = gamma;   // gamma[variable][iteration]
    json importance = json::array();
    for (int v = 0; v < m; ++v) importance.push_back(out.ranking.j(v));
    j["importance"] = importance;
    j["ranking"] = out.ranking.ranking;
    j["mean_optimal_accuracy"] = out.mean_optimal_accuracy;
    j["mean_full_accuracy"] = out.mean_full_accuracy;
    write_json(trace_path, j);
    return out;
}

void cmd_report(const std::string& trace_path, const std::string& csv_path) {
    std::ifstream in(trace_path);
    if (!in) throw ConfigError("cannot open trace file '" + trace_path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("malformed trace JSON: " + std::string(e.what()));
    }
    if (!j.contains("gamma")) throw ConfigError("trace file has no gamma matrix");
    const auto& gamma = j["gamma"];
    const std::size_t m = gamma.size();
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write '" + csv_path + "'");
    // rows = iterations, columns = variables
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t v = 0; v < m; ++v) {
            if (v) out << ',';
            out << gamma[v][i].get<long>();
        }
        out << '\n';
    }
}

// ------------------------------------------------------------- pipeline

int run_pipeline(const ExperimentConfig& cfg) {
    json report;
    report["format_version"] = kFormatVersion;
    report["config"] = config_json(cfg);
    json stage_results = json::array();
    json flags = json::array();
    json artifacts = json::array();

    try {
        cfg.validate();
        if (cfg.stages.empty()) throw ConfigError("no pipeline stages configured");

        // resolve stage order and validate inputs before touching outputs
        std::vector<std::string> ordered;
        for (const auto& stage : kStageOrder)
            if (std::find(cfg.stages.begin(), cfg.stages.end(), stage) != cfg.stages.end())
                ordered.push_back(stage);

        const fs::path out_dir(cfg.out_dir);
        std::set<std::string> produced;
        auto out_path = [&](const std::string& name) { return (out_dir / name).string(); };
        auto resolve_input = [&](const std::string& name, const std::string& stage) {
            if (name.empty())
                throw ConfigError("stage '" + stage + "' has no input configured");
            if (produced.count(name)) return out_path(name);
            if (fs::exists(name)) return name;
            if (fs::exists(out_path(name))) return out_path(name);
            throw ConfigError("stage '" + stage + "' input '" + name + "' does not exist");
        };

        // dry validation pass: every stage input must exist or be produced
        // by an earlier stage in this run
        for (const auto& stage : ordered) {
            if (stage == "simulate") produced.insert(cfg.simulate_out);
            else if (stage == "encode") {
                resolve_input(cfg.encode_in, stage);
                produced.insert(cfg.encode_out);
            } else if (stage == "correlate") {
                resolve_input(cfg.correlate_pairs, stage);
                resolve_input(cfg.parcellation, stage);
                produced.insert(cfg.correlate_out);
            } else if (stage == "train") {
                resolve_input(cfg.train_in, stage);
                produced.insert(cfg.train_report);
            } else if (stage == "hillclimb") {
                resolve_input(cfg.hillclimb_in, stage);
                produced.insert(cfg.trace_out);
            } else if (stage == "report") {
                resolve_input(cfg.report_trace, stage);
                produced.insert(cfg.report_csv);
            }
        }

        fs::create_directories(out_dir);
        produced.clear();
        bool failed = false;
        for (const auto& stage : ordered) {
            json entry;
            entry["stage"] = stage;
            const auto start = std::chrono::steady_clock::now();
            try {
                if (stage == "simulate") {
                    cmd_simulate(cfg, out_path(cfg.simulate_out));
                    produced.insert(cfg.simulate_out);
                    artifacts.push_back(out_path(cfg.simulate_out));
                } else if (stage == "encode") {
                    cmd_encode(resolve_input(cfg.encode_in, stage), out_path(cfg.encode_out),
                               cfg.degree, cfg.block);
                    produced.insert(cfg.encode_out);
                    artifacts.push_back(out_path(cfg.encode_out));
                } else if (stage == "correlate") {
                    cmd_correlate(resolve_input(cfg.correlate_pairs, stage),
                                  resolve_input(cfg.parcellation, stage),
                                  out_path(cfg.correlate_out));
                    produced.insert(cfg.correlate_out);
                    artifacts.push_back(out_path(cfg.correlate_out));
                } else if (stage == "train") {
                    const auto outcome = cmd_train(cfg, resolve_input(cfg.train_in, stage),
                                                   out_path(cfg.train_report));
                    produced.insert(cfg.train_report);
                    artifacts.push_back(out_path(cfg.train_report));
                    entry["metrics"] = {{"mean_accuracy", outcome.summary.mean_accuracy},
                                        {"std_accuracy", outcome.summary.std_accuracy},
                                        {"mean_fpr", outcome.summary.mean_fpr},
                                        {"mean_fnr", outcome.summary.mean_fnr}};
                    if (outcome.any_failures) {
                        flags.push_back("train: " +
                                        std::to_string(outcome.summary.failures) +
                                        " repeats failed");
                        failed = true;
                    }
                } else if (stage == "hillclimb") {
                    const auto outcome = cmd_hillclimb(
                        cfg, resolve_input(cfg.hillclimb_in, stage), out_path(cfg.trace_out));
                    produced.insert(cfg.trace_out);
                    artifacts.push_back(out_path(cfg.trace_out));
                    entry["metrics"] = {{"mean_optimal_accuracy", outcome.mean_optimal_accuracy},
                                        {"mean_full_accuracy", outcome.mean_full_accuracy}};
                } else if (stage == "report") {
                    cmd_report(resolve_input(cfg.report_trace, stage),
                               out_path(cfg.report_csv));
                    produced.insert(cfg.report_csv);
                    artifacts.push_back(out_path(cfg.report_csv));
                }
                entry["status"] = "ok";
            } catch (const std::exception& e) {
                entry["status"] = "failed";
                entry["error"] = e.what();
                failed = true;
            }
            const auto stop = std::chrono::steady_clock::now();
            entry["seconds"] =
                std::chrono::duration_cast<std::chrono::duration<double>>(stop - start).count();
            stage_results.push_back(entry);
            if (entry["status"] == "failed") break;   // abort with a partial report
        }

        report["stages"] = stage_results;
        report["flags"] = flags;
        report["artifacts"] = artifacts;
        report["status"] = failed ? "failed" : "ok";
        write_json(out_path("run_report.json"), report);
        return failed ? 1 : 0;
    } catch (const ConfigError& e) {
        // validation failure: nothing has been written
        fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace twinzyg::cli
