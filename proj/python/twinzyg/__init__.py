"""Twin zygosity classification pipeline."""

from ._twinzyg import (
    csr_correlation,
    encode,
    fisher_inv,
    fisher_z,
    hill_climb,
    pair_features,
    reconstruct,
    region_average,
    simulate,
    train_ensemble,
    train_logreg,
)

__all__ = [
    "csr_correlation",
    "encode",
    "fisher_inv",
    "fisher_z",
    "hill_climb",
    "pair_features",
    "reconstruct",
    "region_average",
    "simulate",
    "train_ensemble",
    "train_logreg",
]
