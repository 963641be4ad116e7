"""Economy state, model parameters and the random-source contract.

One Monte Carlo step (``MC step``) is ``N`` pairwise exchanges, so a run of
``T`` MC steps performs ``T * N`` trades regardless of population size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONSERVATION_RTOL = 1e-9


class ConservationError(RuntimeError):
    """Total money drifted beyond :data:`CONSERVATION_RTOL`."""


@dataclass
class Economy:
    holdings: np.ndarray
    total: float

    def __post_init__(self) -> None:
        self.holdings = np.asarray(self.holdings, dtype=np.float64)
        if self.holdings.ndim != 1 or self.holdings.size < 2:
            raise ValueError("an economy needs at least two agents")
        if np.any(self.holdings < 0):
            raise ValueError("holdings must be non-negative")
        self.total = float(self.total)

    @property
    def n_agents(self) -> int:
        return self.holdings.size

    @property
    def mean(self) -> float:
        return self.total / self.holdings.size

    def conservation_error(self) -> float:
        """Relative deviation of ``sum(holdings)`` from the booked total."""
        return abs(float(self.holdings.sum()) - self.total) / self.total

    def check_conservation(self, rtol: float = CONSERVATION_RTOL) -> None:
        err = self.conservation_error()
        if not err <= rtol:
            raise ConservationError(f"relative conservation error {err:.3e} exceeds {rtol:.1e}")

    def copy(self) -> Economy:
        return Economy(self.holdings.copy(), self.total)


@dataclass(frozen=True)
class ModelParams:
    """Savings propensity ``lam`` and the correlation-tuning ``alpha``.

    ``lam == 1`` is the frozen (delta-function) economy and is rejected here;
    it only exists as an analytic limit.
    """

    lam: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")


def derive_seed(base_seed: int, *index: int) -> int:
    """Deterministic 64-bit child seed for ``(base_seed, *index)``."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RandomSource:
    """Seeded uniform stream (PCG64). Same seed, same draws, bit for bit."""

    def __init__(self, seed: int) -> None:
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size=None):
        return self.generator.random(size)

    def pairs(self, n_agents: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        """``size`` ordered pairs ``(i, j)`` with ``i != j``, uniform over pairs."""
        i = self.generator.integers(0, n_agents, size=size)
        j = self.generator.integers(0, n_agents - 1, size=size)
        j += j >= i
        return i, j

    def child(self, *index: int) -> RandomSource:
        return RandomSource(derive_seed(self.seed, *index))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"


@dataclass(frozen=True)
class SimConfig:
    n_agents: int = 100
    thermalization_steps: int = 100_000
    sample_steps: int = 1000
    sample_interval: int = 10
    seed: int = 0
    replicas: int = 1
    endowment: float = 1.0
    # rows of randoms pre-drawn per batch; only affects memory use, not results
    batch_trades: int = field(default=1 << 17, compare=False)

    def __post_init__(self) -> None:
        if self.n_agents < 2:
            raise ValueError("n_agents must be >= 2")
        if self.thermalization_steps < 0:
            raise ValueError("thermalization_steps must be >= 0")
        if self.sample_steps < 1:
            raise ValueError("sample_steps must be >= 1")
        if self.sample_interval < 1:
            raise ValueError("sample_interval must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if not self.endowment > 0:
            raise ValueError("endowment must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def init_economy(n_agents: int, endowment: float = 1.0) -> Economy:
    if n_agents < 2:
        raise ValueError("n_agents must be >= 2")
    if not endowment > 0:
        raise ValueError("endowment must be positive")
    return Economy(np.full(n_agents, float(endowment)), n_agents * float(endowment))


def pick_pair(rng: RandomSource, n_agents: int) -> tuple[int, int]:
    if n_agents < 2:
        raise ValueError("n_agents must be >= 2")
    i, j = rng.pairs(n_agents, 1)
    return int(i[0]), int(j[0])
