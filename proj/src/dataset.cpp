#include "twinzyg/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace twinzyg {

PairedDataset PairedDataset::rows(const std::vector<int>& idx) const {
    PairedDataset out;
    out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
    out.labels.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(idx[i]);
        out.labels(static_cast<Eigen::Index>(i)) = labels(idx[i]);
    }
    return out;
}

PairedDataset PairedDataset::select_features(const std::vector<int>& feature_idx) const {
    PairedDataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(feature_idx.size()));
    for (std::size_t j = 0; j < feature_idx.size(); ++j)
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(feature_idx[j]);
    out.labels = labels;
    return out;
}

PairedDataset PairedDataset::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged CSV row in '" + path + "'");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().size() < 2)
        throw std::runtime_error("dataset '" + path + "' needs feature columns plus a label column");
    PairedDataset d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(rows.front().size() - 1);
    d.features.resize(n, m);
    d.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j) d.features(i, j) = row[static_cast<std::size_t>(j)];
        const double lab = row.back();
        if (lab != 0.0 && lab != 1.0)
            throw std::runtime_error("non-binary label in '" + path + "'");
        d.labels(i) = static_cast<int>(lab);
    }
    return d;
}

void PairedDataset::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open dataset '" + path + "' for writing");
    out.precision(17);
    for (Eigen::Index i = 0; i < size(); ++i) {
        for (Eigen::Index j = 0; j < num_features(); ++j) out << features(i, j) << ',';
        out << labels(i) << '\n';
    }
    if (!out) throw std::runtime_error("write error on '" + path + "'");
}

}  // namespace twinzyg
