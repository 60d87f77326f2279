#include "twinzyg/simulate.hpp"

#include <stdexcept>

#include "twinzyg/pairing.hpp"

namespace twinzyg::sim {

namespace {
// stage tag for substream derivation
constexpr std::uint64_t kStageSimulate = 0x5349'4d55'4c41'5445ULL;
}  // namespace

void SimulationConfig::validate() const {
    if (num_regions < 1) throw std::invalid_argument("simulation needs at least one region");
    if (static_cast<int>(ground_truth.size()) != num_regions ||
        static_cast<int>(dz_multipliers.size()) != num_regions)
        throw std::invalid_argument("per-region config arrays must have M entries");
    if (!(sigma_ind > 0.0)) throw std::invalid_argument("sigma_ind must be positive");
    if (n_mz < 1 || n_dz < 1) throw std::invalid_argument("pair counts must be >= 1");
    for (const auto& c : ground_truth)
        if (c.size() == 0 || c.norm() == 0.0)
            throw std::invalid_argument("ground-truth coefficient vectors must be nonzero");
    for (double h : dz_multipliers)
        if (h < 1.0) throw std::invalid_argument("DZ multipliers must be >= 1");
}

SimulationConfig study_preset(int which) {
    SimulationConfig cfg;
    cfg.num_regions = 5;
    Eigen::VectorXd c(5);
    c << 1.0, 1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0;
    cfg.ground_truth.assign(5, c);
    cfg.sigma_ind = 0.25;
    cfg.n_mz = 50;
    cfg.n_dz = 50;
    switch (which) {
        case 1: cfg.dz_multipliers = {1.0, 1.0, 1.0, 1.0, 1.0}; break;
        case 2: cfg.dz_multipliers = {2.0, 2.0, 2.0, 2.0, 2.0}; break;
        case 3: cfg.dz_multipliers = {3.0, 2.5, 2.0, 1.5, 1.0}; break;
        default: throw std::invalid_argument("study preset must be 1, 2 or 3");
    }
    return cfg;
}

SyntheticPair generate_pair(const SimulationConfig& cfg, Zygosity zygosity, RngStream& rng) {
    SyntheticPair pair;
    pair.zygosity = zygosity;
    pair.twin_a.reserve(static_cast<std::size_t>(cfg.num_regions));
    pair.twin_b.reserve(static_cast<std::size_t>(cfg.num_regions));
    for (int region = 0; region < cfg.num_regions; ++region) {
        const auto& c = cfg.ground_truth[static_cast<std::size_t>(region)];
        const double h = cfg.dz_multipliers[static_cast<std::size_t>(region)];
        const double sigma_twin =
            (zygosity == Zygosity::MZ) ? cfg.sigma_ind : h * cfg.sigma_ind;
        const Eigen::Index len = c.size();
        Eigen::VectorXd alpha_a(len), alpha_b(len), beta_a(len), beta_b(len);
        for (Eigen::Index j = 0; j < len; ++j) alpha_a(j) = sigma_twin * rng.gaussian();
        if (cfg.sharing == SharingMode::Shared) {
            alpha_b = alpha_a;
        } else {
            for (Eigen::Index j = 0; j < len; ++j) alpha_b(j) = sigma_twin * rng.gaussian();
        }
        for (Eigen::Index j = 0; j < len; ++j) beta_a(j) = cfg.sigma_ind * rng.gaussian();
        for (Eigen::Index j = 0; j < len; ++j) beta_b(j) = cfg.sigma_ind * rng.gaussian();
        pair.twin_a.push_back(c + alpha_a + beta_a);
        pair.twin_b.push_back(c + alpha_b + beta_b);
    }
    return pair;
}

PairedDataset generate_dataset(const SimulationConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_mz + cfg.n_dz;
    const auto parc = pairing::Parcellation::singletons(1);
    PairedDataset out;
    out.features.resize(n, cfg.num_regions);
    out.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const Zygosity zyg = i < cfg.n_mz ? Zygosity::MZ : Zygosity::DZ;
        RngStream rng(substream_seed(cfg.seed, kStageSimulate, static_cast<std::uint64_t>(i)));
        const SyntheticPair pair = generate_pair(cfg, zyg, rng);
        for (int region = 0; region < cfg.num_regions; ++region) {
            Eigen::VectorXd corr(1);
            corr(0) = pairing::csr_correlation(pair.twin_a[static_cast<std::size_t>(region)],
                                               pair.twin_b[static_cast<std::size_t>(region)]);
            out.features(i, region) = pairing::region_average(corr, parc)(0);
        }
        out.labels(i) = zyg == Zygosity::MZ ? 1 : 0;
    }
    return out;
}

}  // namespace twinzyg::sim
