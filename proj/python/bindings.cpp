#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twinzyg/basis.hpp"
#include "twinzyg/models.hpp"
#include "twinzyg/pairing.hpp"
#include "twinzyg/pipeline.hpp"
#include "twinzyg/selection.hpp"
#include "twinzyg/simulate.hpp"

namespace py = pybind11;
using namespace twinzyg;

namespace {

sim::SharingMode parse_sharing(const std::string& s) {
    if (s == "shared") return sim::SharingMode::Shared;
    if (s == "independent") return sim::SharingMode::Independent;
    throw std::invalid_argument("sharing must be 'shared' or 'independent'");
}

PairedDataset make_dataset(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels) {
    if (features.rows() != labels.size())
        throw std::invalid_argument("features and labels disagree on the number of pairs");
    PairedDataset d;
    d.features = features;
    d.labels = labels;
    return d;
}

py::dict metrics_dict(const models::Metrics& m) {
    py::dict d;
    d["accuracy"] = m.accuracy;
    d["fpr"] = m.fpr;
    d["fnr"] = m.fnr;
    d["fpr_defined"] = m.fpr_defined;
    d["fnr_defined"] = m.fnr_defined;
    d["tp"] = m.tp;
    d["fp"] = m.fp;
    d["tn"] = m.tn;
    d["fn"] = m.fn;
    return d;
}

}  // namespace

PYBIND11_MODULE(_twinzyg, m) {
    m.doc() = "Twin zygosity classification pipeline";

    // ---- basis / compression
    m.def(
        "encode",
        [](const Eigen::MatrixXd& raw, int degree) {
            const auto z = basis::normalize_time_series(raw);
            const auto design = basis::build_design(z.grid, degree);
            return basis::fit_csr(z, design).values;
        },
        py::arg("series"), py::arg("degree") = 119,
        "Least-squares cosine-series coefficients ((degree+1) x n) of a p x n "
        "time-series matrix after per-column mean removal.");
    m.def(
        "reconstruct",
        [](const Eigen::MatrixXd& coeffs, int samples) {
            basis::CsrCoefficients c;
            c.values = coeffs;
            c.degree = static_cast<int>(coeffs.rows()) - 1;
            const auto design =
                basis::build_design(basis::TimeGrid::uniform(samples), c.degree);
            return basis::reconstruct(c, design).values;
        },
        py::arg("coefficients"), py::arg("samples"),
        "Evaluate coefficient columns back onto a uniform grid of the given size.");

    // ---- correlation / pairing
    m.def("csr_correlation", &pairing::csr_correlation, py::arg("a"), py::arg("b"),
          "Correlation of two coefficient vectors (constant term excluded).");
    m.def("fisher_z", &pairing::fisher_z, py::arg("rho"));
    m.def("fisher_inv", &pairing::fisher_inv, py::arg("z"));
    m.def(
        "region_average",
        [](const Eigen::VectorXd& corr, const std::vector<int>& labels) {
            return pairing::region_average(corr, pairing::Parcellation::from_labels(labels));
        },
        py::arg("correlations"), py::arg("labels"),
        "Fisher-z average of voxel correlations within each labelled region.");
    m.def(
        "pair_features",
        [](const Eigen::MatrixXd& coeffs_a, const Eigen::MatrixXd& coeffs_b,
           const std::vector<int>& labels) {
            basis::CsrCoefficients a, b;
            a.values = coeffs_a;
            a.degree = static_cast<int>(coeffs_a.rows()) - 1;
            b.values = coeffs_b;
            b.degree = static_cast<int>(coeffs_b.rows()) - 1;
            return pairing::pair_to_features(a, b, pairing::Parcellation::from_labels(labels));
        },
        py::arg("coefficients_a"), py::arg("coefficients_b"), py::arg("labels"),
        "Region-averaged twin-pair correlation features from two coefficient matrices.");

    // ---- simulation
    m.def(
        "simulate",
        [](int study, int pairs_mz, int pairs_dz, const std::string& sharing,
           std::uint64_t seed) {
            auto cfg = sim::study_preset(study);
            cfg.n_mz = pairs_mz;
            cfg.n_dz = pairs_dz;
            cfg.sharing = parse_sharing(sharing);
            cfg.seed = seed;
            const auto data = sim::generate_dataset(cfg);
            return py::make_tuple(data.features, data.labels);
        },
        py::arg("study") = 2, py::arg("pairs_mz") = 50, py::arg("pairs_dz") = 50,
        py::arg("sharing") = "independent", py::arg("seed") = 0,
        "Synthetic twin dataset (features, labels) from a study preset.");

    // ---- classification
    m.def(
        "train_ensemble",
        [](const Eigen::MatrixXd& features, const Eigen::VectorXi& labels, int hidden,
           double lambda, int num_models, std::uint64_t seed, unsigned jobs) {
            models::EnsembleConfig cfg;
            cfg.trainer.hidden = hidden;
            cfg.trainer.lambda = lambda;
            cfg.num_models = num_models;
            cfg.seed = seed;
            cfg.jobs = jobs;
            const auto s = models::ensemble_run(make_dataset(features, labels), cfg);
            py::dict d;
            d["mean_accuracy"] = s.mean_accuracy;
            d["std_accuracy"] = s.std_accuracy;
            d["mean_fpr"] = s.mean_fpr;
            d["std_fpr"] = s.std_fpr;
            d["mean_fnr"] = s.mean_fnr;
            d["std_fnr"] = s.std_fnr;
            d["failures"] = s.failures;
            py::list repeats;
            for (const auto& m2 : s.per_repeat) repeats.append(metrics_dict(m2));
            d["per_repeat"] = repeats;
            return d;
        },
        py::arg("features"), py::arg("labels"), py::arg("hidden") = 200,
        py::arg("lambda_") = 0.01, py::arg("models") = 200, py::arg("seed") = 0,
        py::arg("jobs") = 1,
        "Repeated split/train/evaluate ensemble of the L1-regularized network.");
    m.def(
        "train_logreg",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXi& t) {
            const auto model = models::train_logreg(x, t);
            py::dict d;
            d["weights"] = model.weights;
            d["intercept"] = model.intercept;
            d["converged"] = model.converged;
            d["separation_flag"] = model.separation_flag;
            d["iterations"] = model.iterations;
            return d;
        },
        py::arg("features"), py::arg("labels"),
        "Logistic-regression baseline fitted by iteratively reweighted least squares.");

    // ---- variable selection
    m.def(
        "hill_climb",
        [](const Eigen::MatrixXd& features, const Eigen::VectorXi& labels, int runs,
           int hidden, int final_hidden, double lambda, std::uint64_t seed, unsigned jobs) {
            cli::ExperimentConfig cfg;
            cfg.runs = runs;
            cfg.hc_hidden = hidden;
            cfg.final_hidden = final_hidden;
            cfg.lambda = lambda;
            cfg.seed = seed;
            cfg.jobs = jobs;
            const auto out =
                cli::run_hill_climb_ensemble(make_dataset(features, labels), cfg);
            py::dict d;
            d["gamma"] = out.gamma.gamma;
            d["importance"] = out.ranking.j;
            d["ranking"] = out.ranking.ranking;
            d["optimal_subsets"] = out.optimal_subsets;
            d["mean_optimal_accuracy"] = out.mean_optimal_accuracy;
            d["mean_full_accuracy"] = out.mean_full_accuracy;
            py::list orders;
            for (const auto& t : out.traces) orders.append(t.order());
            d["orders"] = orders;
            return d;
        },
        py::arg("features"), py::arg("labels"), py::arg("runs") = 100,
        py::arg("hidden") = 20, py::arg("final_hidden") = 200, py::arg("lambda_") = 0.01,
        py::arg("seed") = 0, py::arg("jobs") = 1,
        "Hill-climbing variable-selection ensemble with importance ranking.");
}
