#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "twinzyg/pipeline.hpp"

using twinzyg::cli::ConfigError;
using twinzyg::cli::ExperimentConfig;

int main(int argc, char** argv) {
    CLI::App app{"Twin zygosity classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();   // global flags may follow the subcommand name

    std::string config_path;
    ExperimentConfig cfg;
    bool seed_set = false, jobs_set = false, out_dir_set = false;
    std::uint64_t seed_opt = 0;
    unsigned jobs_opt = 1;
    std::string out_dir_opt;
    app.add_option("-c,--config", config_path, "experiment config file (INI)");
    app.add_option("--seed", seed_opt, "master RNG seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("-j,--jobs", jobs_opt, "worker threads")->each([&](const std::string&) {
        jobs_set = true;
    });
    app.add_option("--out-dir", out_dir_opt, "output directory")->each([&](const std::string&) {
        out_dir_set = true;
    });

    // run: execute the configured stages end to end
    auto* run = app.add_subcommand("run", "run the configured pipeline stages");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic twin dataset");
    std::string sim_out = "data.csv";
    simulate->add_option("--study", cfg.study, "study preset (1, 2 or 3)");
    simulate->add_option("--pairs-mz", cfg.pairs_mz, "number of MZ pairs");
    simulate->add_option("--pairs-dz", cfg.pairs_dz, "number of DZ pairs");
    simulate->add_option("--sharing", cfg.sharing, "'shared' or 'independent' pair effect");
    simulate->add_option("-o,--out", sim_out, "output feature CSV");

    // encode
    auto* encode = app.add_subcommand("encode", "compress time series to basis coefficients");
    std::string enc_in, enc_out = "coefficients.txt";
    encode->add_option("-i,--in", enc_in, "time-series matrix (p x n)")->required();
    encode->add_option("-o,--out", enc_out, "coefficient matrix ((k+1) x n)");
    encode->add_option("-k,--degree", cfg.degree, "series degree k");
    encode->add_option("--block", cfg.block, "columns per solver block");

    // correlate
    auto* correlate = app.add_subcommand("correlate", "build pair features from coefficients");
    std::string cor_pairs, cor_parc, cor_out = "features.csv";
    correlate->add_option("--pairs", cor_pairs, "manifest: 'fileA fileB label' per line")
        ->required();
    correlate->add_option("--parcellation", cor_parc, "voxel-to-region label file")->required();
    correlate->add_option("-o,--out", cor_out, "output feature CSV");

    // train
    auto* train = app.add_subcommand("train", "train and evaluate the classifier ensemble");
    std::string trn_in, trn_report = "train_report.json";
    train->add_option("-i,--in", trn_in, "feature CSV")->required();
    train->add_option("--hidden", cfg.hidden, "hidden units");
    train->add_option("--lambda", cfg.lambda, "L1 penalty strength");
    train->add_option("--models", cfg.num_models, "ensemble repeats");
    train->add_option("-o,--report", trn_report, "output report JSON");

    // hillclimb
    auto* hillclimb = app.add_subcommand("hillclimb", "run hill-climbing variable selection");
    std::string hc_in, hc_out = "trace.json";
    hillclimb->add_option("-i,--in", hc_in, "feature CSV")->required();
    hillclimb->add_option("--runs", cfg.runs, "selection runs");
    hillclimb->add_option("--hidden", cfg.hc_hidden, "hidden units during selection");
    hillclimb->add_option("--final-hidden", cfg.final_hidden, "hidden units for final models");
    hillclimb->add_option("--lambda", cfg.lambda, "L1 penalty strength");
    hillclimb->add_option("-o,--out", hc_out, "output trace JSON");

    // report
    auto* report = app.add_subcommand("report", "export the selection-frequency matrix");
    std::string rep_trace, rep_csv = "gamma.csv";
    report->add_option("--trace", rep_trace, "trace JSON from 'hillclimb'")->required();
    report->add_option("-o,--csv", rep_csv, "output frequency CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            // CLI flags given alongside --config override the file
            // merge: start from the file, apply any explicitly-set CLI values
            ExperimentConfig loaded = ExperimentConfig::load(config_path);
            auto merge = [&](auto& dst, const auto& src, const CLI::Option* opt) {
                if (opt != nullptr && opt->count() > 0) dst = src;
            };
            ExperimentConfig merged = loaded;
            merge(merged.study, cfg.study, simulate->get_option_no_throw("--study"));
            merge(merged.pairs_mz, cfg.pairs_mz, simulate->get_option_no_throw("--pairs-mz"));
            merge(merged.pairs_dz, cfg.pairs_dz, simulate->get_option_no_throw("--pairs-dz"));
            merge(merged.sharing, cfg.sharing, simulate->get_option_no_throw("--sharing"));
            merge(merged.degree, cfg.degree, encode->get_option_no_throw("--degree"));
            merge(merged.block, cfg.block, encode->get_option_no_throw("--block"));
            merge(merged.hidden, cfg.hidden, train->get_option_no_throw("--hidden"));
            merge(merged.lambda, cfg.lambda, train->get_option_no_throw("--lambda"));
            merge(merged.lambda, cfg.lambda, hillclimb->get_option_no_throw("--lambda"));
            merge(merged.num_models, cfg.num_models, train->get_option_no_throw("--models"));
            merge(merged.runs, cfg.runs, hillclimb->get_option_no_throw("--runs"));
            merge(merged.hc_hidden, cfg.hc_hidden, hillclimb->get_option_no_throw("--hidden"));
            merge(merged.final_hidden, cfg.final_hidden,
                  hillclimb->get_option_no_throw("--final-hidden"));
            cfg = merged;
        }
        if (seed_set) cfg.seed = seed_opt;
        if (jobs_set) cfg.jobs = jobs_opt;
        if (out_dir_set) cfg.out_dir = out_dir_opt;

        if (run->parsed()) {
            if (config_path.empty()) throw ConfigError("'run' requires --config");
            return twinzyg::cli::run_pipeline(cfg);
        }
        cfg.validate();
        if (simulate->parsed()) {
            twinzyg::cli::cmd_simulate(cfg, sim_out);
        } else if (encode->parsed()) {
            twinzyg::cli::cmd_encode(enc_in, enc_out, cfg.degree, cfg.block);
        } else if (correlate->parsed()) {
            twinzyg::cli::cmd_correlate(cor_pairs, cor_parc, cor_out);
        } else if (train->parsed()) {
            const auto outcome = twinzyg::cli::cmd_train(cfg, trn_in, trn_report);
            std::printf("accuracy %.4f +/- %.4f  fpr %.4f  fnr %.4f  (%d repeats, %d failed)\n",
                        outcome.summary.mean_accuracy, outcome.summary.std_accuracy,
                        outcome.summary.mean_fpr, outcome.summary.mean_fnr,
                        static_cast<int>(outcome.summary.per_repeat.size()),
                        outcome.summary.failures);
            if (outcome.any_failures) return 1;
        } else if (hillclimb->parsed()) {
            const auto outcome = twinzyg::cli::cmd_hillclimb(cfg, hc_in, hc_out);
            std::printf("optimal-subset accuracy %.4f  full-set accuracy %.4f  (%d runs)\n",
                        outcome.mean_optimal_accuracy, outcome.mean_full_accuracy,
                        static_cast<int>(outcome.traces.size()));
        } else if (report->parsed()) {
            twinzyg::cli::cmd_report(rep_trace, rep_csv);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
