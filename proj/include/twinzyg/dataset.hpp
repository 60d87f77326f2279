#pragma once

#include <Eigen/Dense>
#include <string>

namespace twinzyg {

// N twin pairs: per pair an M-vector of region correlations and a binary
// zygosity label (1 = MZ, 0 = DZ).
struct PairedDataset {
    Eigen::MatrixXd features;   // N x M
    Eigen::VectorXi labels;     // N entries in {0, 1}

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index num_features() const { return features.cols(); }

    // Row subset / feature-column subset helpers.
    PairedDataset rows(const std::vector<int>& idx) const;
    PairedDataset select_features(const std::vector<int>& feature_idx) const;

    // CSV: one pair per row, M feature columns then the label column.
    static PairedDataset load_csv(const std::string& path);
    void save_csv(const std::string& path) const;
};

}  // namespace twinzyg
