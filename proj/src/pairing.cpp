#include "twinzyg/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace twinzyg::pairing {

Parcellation Parcellation::from_labels(std::vector<int> labels) {
    if (labels.empty()) throw std::invalid_argument("empty parcellation");
    const int m = *std::max_element(labels.begin(), labels.end());
    if (m < 1) throw std::invalid_argument("region labels must be 1-based positive indices");
    Parcellation p;
    p.num_regions = m;
    p.region_sizes.assign(static_cast<std::size_t>(m), 0);
    for (int lab : labels) {
        if (lab < 1 || lab > m) throw std::invalid_argument("region label out of range");
        ++p.region_sizes[static_cast<std::size_t>(lab - 1)];
    }
    for (int region = 0; region < m; ++region)
        if (p.region_sizes[static_cast<std::size_t>(region)] == 0)
            throw std::invalid_argument("region " + std::to_string(region + 1) +
                                        " has no member voxels");
    p.labels = std::move(labels);
    return p;
}

Parcellation Parcellation::singletons(int n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 1);
    return from_labels(std::move(labels));
}

Parcellation Parcellation::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parcellation file '" + path + "'");
    std::vector<int> labels;
    int lab;
    while (in >> lab) labels.push_back(lab);
    return from_labels(std::move(labels));
}

void Parcellation::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open parcellation file '" + path + "' for writing");
    for (int lab : labels) out << lab << '\n';
}

double csr_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw std::invalid_argument("coefficient vector length mismatch");
    if (a.size() == 0) throw std::invalid_argument("empty coefficient vector");
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("zero-norm coefficient vector: signal equals its mean");
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double fisher_z(double rho) {
    if (std::isnan(rho)) throw std::invalid_argument("NaN correlation");
    if (std::abs(rho) > 1.0 + 1e-9) throw std::invalid_argument("correlation outside [-1, 1]");
    constexpr double rho_max = 1.0 - 1e-7;
    rho = std::clamp(rho, -rho_max, rho_max);
    return 0.5 * std::log((1.0 + rho) / (1.0 - rho));
}

double fisher_inv(double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("non-finite Fisher z value");
    return std::tanh(z);
}

Eigen::VectorXd region_average(const Eigen::VectorXd& voxel_correlations,
                               const Parcellation& parc) {
    if (voxel_correlations.size() != parc.num_voxels())
        throw std::invalid_argument("correlation count does not match parcellation");
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(parc.num_regions);
    for (int v = 0; v < parc.num_voxels(); ++v)
        sums(parc.labels[static_cast<std::size_t>(v)] - 1) += fisher_z(voxel_correlations(v));
    Eigen::VectorXd out(parc.num_regions);
    for (int region = 0; region < parc.num_regions; ++region)
        out(region) = fisher_inv(sums(region) / parc.region_sizes[static_cast<std::size_t>(region)]);
    return out;
}

Eigen::VectorXd pair_to_features(const basis::CsrCoefficients& subject_a,
                                 const basis::CsrCoefficients& subject_b,
                                 const Parcellation& parc) {
    if (subject_a.degree != subject_b.degree)
        throw std::invalid_argument("subject coefficient degree mismatch");
    if (subject_a.num_signals() != subject_b.num_signals() ||
        subject_a.num_signals() != parc.num_voxels())
        throw std::invalid_argument("voxel count mismatch between subjects and parcellation");
    const int k = subject_a.degree;
    if (k < 1) throw std::invalid_argument("need degree >= 1 for correlations");
    Eigen::VectorXd voxel_corr(parc.num_voxels());
    for (int v = 0; v < parc.num_voxels(); ++v)
        voxel_corr(v) = csr_correlation(subject_a.values.col(v).tail(k),
                                        subject_b.values.col(v).tail(k));
    return region_average(voxel_corr, parc);
}

}  // namespace twinzyg::pairing
