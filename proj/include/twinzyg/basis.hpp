#pragma once

#include <Eigen/Dense>
#include <vector>

namespace twinzyg::basis {

// Sample locations on [0,1]. Always strictly increasing with endpoints
// pinned at 0 and 1.
struct TimeGrid {
    Eigen::VectorXd points;

    Eigen::Index size() const { return points.size(); }
    static TimeGrid uniform(Eigen::Index p);
    bool operator==(const TimeGrid& other) const;
};

// p x n matrix of signals (one per column) on a shared grid.
struct TimeSeriesMatrix {
    TimeGrid grid;
    Eigen::MatrixXd values;   // p x n
    bool mean_removed = false;
};

// Cosine design matrix: column 0 is the constant 1, column l holds
// sqrt(2)*cos(l*pi*t) sampled on the grid.
struct BasisDesign {
    TimeGrid grid;
    int degree = 0;           // k
    Eigen::MatrixXd matrix;   // p x (k+1)
};

// (k+1) x n coefficient matrix; the compact representation of the signals.
struct CsrCoefficients {
    int degree = 0;
    Eigen::MatrixXd values;   // (k+1) x n
    Eigen::Index num_signals() const { return values.cols(); }
};

struct SnrResult {
    Eigen::VectorXd per_signal;      // std(fit)/std(residual), per column
    std::vector<bool> infinite;      // residual had zero variance
    double mean = 0.0;               // arithmetic mean over columns
    bool any_infinite = false;
};

// Rescale time onto [0,1] (uniform grid) and remove each column's mean.
TimeSeriesMatrix normalize_time_series(const Eigen::MatrixXd& raw);

// Build the cosine design of degree k on the grid. Requires k+1 <= p.
BasisDesign build_design(const TimeGrid& grid, int degree);

// Column-wise least squares fit of Z onto the design via Householder QR.
CsrCoefficients fit_csr(const TimeSeriesMatrix& z, const BasisDesign& design);

// Evaluate Psi * C back onto the design's grid.
TimeSeriesMatrix reconstruct(const CsrCoefficients& coeffs, const BasisDesign& design);

// Per-column ratio std(fitted)/std(residual) plus the mean over columns.
// A zero-variance residual yields an infinity sentinel and a flag.
SnrResult snr(const TimeSeriesMatrix& z, const TimeSeriesMatrix& zhat);

}  // namespace twinzyg::basis
