#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twinzyg/basis.hpp"

namespace twinzyg::pairing {

// Voxel-to-region labeling. Labels are 1-based region indices in 1..M and
// every region must be non-empty.
struct Parcellation {
    std::vector<int> labels;       // one per voxel
    int num_regions = 0;           // M
    std::vector<int> region_sizes; // M entries, all >= 1

    static Parcellation from_labels(std::vector<int> labels);
    static Parcellation singletons(int n);   // one voxel per region
    static Parcellation load(const std::string& path);
    void save(const std::string& path) const;
    int num_voxels() const { return static_cast<int>(labels.size()); }
};

// Cosine similarity of the degree-1..k coefficient blocks; equals the
// correlation of the reconstructed mean-removed curves. Result clipped to
// [-1, 1]. Throws on a zero-norm input.
double csr_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// z = 0.5*ln((1+rho)/(1-rho)) with |rho| clamped to 1 - 1e-7 first.
double fisher_z(double rho);
double fisher_inv(double z);

// Per region: mean of fisher_z over member voxels (ascending voxel index),
// then fisher_inv of the mean.
Eigen::VectorXd region_average(const Eigen::VectorXd& voxel_correlations,
                               const Parcellation& parc);

// Per-voxel correlation of the two subjects' coefficient columns (rows
// 1..k, the constant row excluded), then region averaging.
Eigen::VectorXd pair_to_features(const basis::CsrCoefficients& subject_a,
                                 const basis::CsrCoefficients& subject_b,
                                 const Parcellation& parc);

}  // namespace twinzyg::pairing
