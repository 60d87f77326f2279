#include "twinzyg/basis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace twinzyg::basis {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TimeGrid TimeGrid::uniform(Eigen::Index p) {
    if (p < 2) throw std::invalid_argument("time grid needs at least 2 samples");
    TimeGrid g;
    g.points = Eigen::VectorXd::LinSpaced(p, 0.0, 1.0);
    return g;
}

bool TimeGrid::operator==(const TimeGrid& other) const {
    return points.size() == other.points.size() && points == other.points;
}

TimeSeriesMatrix normalize_time_series(const Eigen::MatrixXd& raw) {
    if (raw.rows() < 2) throw std::invalid_argument("need at least 2 time samples");
    if (!raw.allFinite()) throw std::invalid_argument("non-finite entries in time series");
    TimeSeriesMatrix out;
    out.grid = TimeGrid::uniform(raw.rows());
    out.values = raw.rowwise() - raw.colwise().mean();
    out.mean_removed = true;
    return out;
}

BasisDesign build_design(const TimeGrid& grid, int degree) {
    const Eigen::Index p = grid.size();
    if (degree < 0) throw std::invalid_argument("degree must be non-negative");
    if (degree + 1 > p)
        throw std::invalid_argument("degree " + std::to_string(degree) +
                                    " underdetermined on " + std::to_string(p) + " samples");
    BasisDesign d;
    d.grid = grid;
    d.degree = degree;
    d.matrix.resize(p, degree + 1);
    d.matrix.col(0).setOnes();
    const double sqrt2 = std::sqrt(2.0);
    for (int l = 1; l <= degree; ++l)
        d.matrix.col(l) = (grid.points.array() * (l * kPi)).cos() * sqrt2;
    return d;
}

CsrCoefficients fit_csr(const TimeSeriesMatrix& z, const BasisDesign& design) {
    if (!(z.grid == design.grid))
        throw std::invalid_argument("time series and design are on different grids");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.matrix);
    if (qr.rank() < design.matrix.cols())
        throw std::invalid_argument("rank-deficient design matrix");
    CsrCoefficients c;
    c.degree = design.degree;
    c.values = qr.solve(z.values);
    return c;
}

TimeSeriesMatrix reconstruct(const CsrCoefficients& coeffs, const BasisDesign& design) {
    if (coeffs.degree != design.degree)
        throw std::invalid_argument("coefficient/design degree mismatch");
    TimeSeriesMatrix out;
    out.grid = design.grid;
    out.values = design.matrix * coeffs.values;
    // flag zero-mean reconstructions so downstream invariants keep holding
    const double scale = out.values.cwiseAbs().maxCoeff();
    out.mean_removed =
        scale == 0.0 || (out.values.colwise().mean().cwiseAbs().maxCoeff() <= 1e-10 * scale);
    return out;
}

SnrResult snr(const TimeSeriesMatrix& z, const TimeSeriesMatrix& zhat) {
    if (z.values.rows() != zhat.values.rows() || z.values.cols() != zhat.values.cols())
        throw std::invalid_argument("shape mismatch in snr");
    const Eigen::Index n = z.values.cols();
    const double p = static_cast<double>(z.values.rows());
    SnrResult r;
    r.per_signal.resize(n);
    r.infinite.assign(static_cast<std::size_t>(n), false);
    auto column_std = [p](const Eigen::VectorXd& v) {
        const double mu = v.mean();
        return std::sqrt((v.array() - mu).square().sum() / p);
    };
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sd_fit = column_std(zhat.values.col(i));
        const double sd_res = column_std(z.values.col(i) - zhat.values.col(i));
        if (sd_res == 0.0) {
            r.per_signal(i) = std::numeric_limits<double>::infinity();
            r.infinite[static_cast<std::size_t>(i)] = true;
            r.any_infinite = true;
        } else {
            r.per_signal(i) = sd_fit / sd_res;
        }
        sum += r.per_signal(i);
    }
    r.mean = sum / static_cast<double>(n);
    return r;
}

}  // namespace twinzyg::basis
