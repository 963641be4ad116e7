"""Generalized kinetic exchange model: savings propensity, correlated returns, inequality reversal."""

from .core import (
    ConservationError,
    Economy,
    ModelParams,
    RandomSource,
    SimConfig,
    derive_seed,
    init_economy,
    pick_pair,
)

__version__ = "0.1.0"

__all__ = [
    "ConservationError",
    "Economy",
    "ModelParams",
    "RandomSource",
    "SimConfig",
    "derive_seed",
    "init_economy",
    "pick_pair",
]
