#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "twinzyg/dataset.hpp"
#include "twinzyg/rng.hpp"

namespace twinzyg::sim {

enum class Zygosity { MZ, DZ };

// Whether the twin-level noise term is drawn once per pair (and added to
// both twins) or independently per twin. Independent is the default: it
// makes DZ pairs less correlated than MZ pairs, the direction the model
// is meant to encode, and reproduces the reference accuracies.
enum class SharingMode { Shared, Independent };

struct SimulationConfig {
    int num_regions = 0;                         // M
    std::vector<Eigen::VectorXd> ground_truth;   // c_kappa per region
    double sigma_ind = 0.0;                      // individual-level noise std
    std::vector<double> dz_multipliers;          // h_kappa >= 1 per region
    int n_mz = 0;
    int n_dz = 0;
    SharingMode sharing = SharingMode::Independent;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticPair {
    Zygosity zygosity = Zygosity::MZ;
    std::vector<Eigen::VectorXd> twin_a;   // per region
    std::vector<Eigen::VectorXd> twin_b;
};

// Presets: M=5 regions, c = [1, 1/2, 1/3, 1/4, 1/5] everywhere,
// sigma_ind = 0.25, 50+50 pairs. DZ multipliers: study 1 all 1, study 2
// all 2, study 3 {3, 2.5, 2, 1.5, 1}.
SimulationConfig study_preset(int which);

// One pair drawn from the mixed-effects model: per region, twin vector =
// c + alpha + beta where alpha ~ N(0, sigma_twin^2) per coordinate
// (sigma_twin = sigma_ind for MZ, h * sigma_ind for DZ) and beta ~
// N(0, sigma_ind^2) independently per twin.
SyntheticPair generate_pair(const SimulationConfig& cfg, Zygosity zygosity,
                            RngStream& rng);

// Full dataset: MZ pairs first (label 1), then DZ (label 0). Feature
// vector = per-region correlation between the twins' coefficient vectors.
// Pair i uses an RNG substream keyed by (seed, pair index), so the result
// is independent of generation order.
PairedDataset generate_dataset(const SimulationConfig& cfg);

}  // namespace twinzyg::sim
