"""Pairwise exchange rules and the Monte Carlo driver.

The scalar ``exchange_*`` functions are the readable reference forms; the
driver applies the same rules through the compiled loops in ``_loops``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .analytics import DEFAULT_BINS, InequalityReport, inequality_report
from .core import Economy, ModelParams, RandomSource, SimConfig, derive_seed, init_economy


def _check_money(*values: float) -> None:
    for v in values:
        if not v >= 0:
            raise ValueError(f"money holdings must be non-negative, got {v!r}")


def _check_unit(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


def exchange_generalized(
    m_i: float, m_j: float, omega1: float, omega2: float, params: ModelParams
) -> tuple[float, float]:
    """One trade of the savings/correlation kernel.

    Agent ``i`` keeps ``lam + omega1 (1 - lam)`` of its own money and receives
    ``(alpha omega1 + (1 - alpha) omega2)(1 - lam)`` of agent ``j``'s.
    """
    _check_money(m_i, m_j)
    _check_unit("omega1", omega1)
    _check_unit("omega2", omega2)
    lam, alpha = params.lam, params.alpha
    keep = 1.0 - lam
    pot = m_i + m_j
    new_i = (lam + omega1 * keep) * m_i + (alpha * omega1 + (1.0 - alpha) * omega2) * keep * m_j
    new_i = min(new_i, pot)
    return new_i, pot - new_i


def exchange_random_share(m_i: float, m_j: float, epsilon: float) -> tuple[float, float]:
    _check_money(m_i, m_j)
    _check_unit("epsilon", epsilon)
    pot = m_i + m_j
    new_i = epsilon * pot
    return new_i, pot - new_i


def exchange_diversified(m_i: float, m_j: float, epsilons) -> tuple[float, float]:
    """Split the pot by the mean of ``K`` independent shares."""
    eps = np.asarray(epsilons, dtype=np.float64).ravel()
    if eps.size == 0:
        raise ValueError("need at least one epsilon")
    if np.any((eps < 0) | (eps > 1)):
        raise ValueError("every epsilon must lie in [0, 1]")
    _check_money(m_i, m_j)
    pot = m_i + m_j
    new_i = float(eps.sum()) / eps.size * pot
    return new_i, pot - new_i


def optimal_weights(k: int) -> np.ndarray:
    """Variance-minimizing portfolio weights for ``k`` i.i.d. returns.

    Minimizing ``sum f_k^2`` on the simplex ``sum f_k = 1`` gives equal weights.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return np.full(k, 1.0 / k)


class Kernel(enum.Enum):
    GENERALIZED = "generalized"
    RANDOM_SHARE = "random_share"
    DIVERSIFIED = "diversified"
    MICROTRADE = "microtrade"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selector plus the knobs that only some kernels read.

    ``k`` is the number of commodity pairs for ``DIVERSIFIED``. ``cc_limit``
    makes ``MICROTRADE`` give both agents identical good exponents.
    """

    kind: Kernel = Kernel.GENERALIZED
    k: int = 1
    cc_limit: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class SimulationResult:
    snapshots: np.ndarray  # (replicas * sample_steps, n_agents)
    report: InequalityReport
    final: list[Economy]
    seeds: list[int]
    max_conservation_error: float


def _loop_code(spec: KernelSpec, params: ModelParams) -> int:
    from . import _loops

    if spec.kind is Kernel.GENERALIZED:
        return _loops.GENERALIZED
    if spec.kind is Kernel.RANDOM_SHARE:
        return _loops.RANDOM_SHARE
    if spec.kind is Kernel.DIVERSIFIED:
        return _loops.DIVERSIFIED
    if not params.lam > 0:
        raise ValueError("the microtrade kernel needs lambda in (0, 1)")
    return _loops.MICROTRADE_CC if spec.cc_limit else _loops.MICROTRADE


class _Runner:
    """Advances one economy with one random source, batch by batch."""

    def __init__(self, economy: Economy, rng: RandomSource, code: int, width: int,
                 params: ModelParams, batch: int) -> None:
        from ._loops import apply_trades

        self._apply = apply_trades
        self.economy = economy
        self.rng = rng
        self.code = code
        self.width = width
        self.lam = float(params.lam)
        self.alpha = float(params.alpha)
        self.batch = batch
        self.max_error = 0.0

    def advance(self, n_trades: int) -> None:
        n = self.economy.n_agents
        while n_trades > 0:
            size = min(n_trades, self.batch)
            ii, jj = self.rng.pairs(n, size)
            u = self.rng.uniform((size, self.width))
            self._apply(self.economy.holdings, ii, jj, u, self.code, self.lam, self.alpha)
            n_trades -= size
            err = self.economy.conservation_error()
            self.max_error = max(self.max_error, err)
            self.economy.check_conservation()


def run_simulation(
    config: SimConfig,
    params: ModelParams,
    kernel: KernelSpec | Kernel = Kernel.GENERALIZED,
    *,
    bins: int = DEFAULT_BINS,
    seed: int | None = None,
) -> SimulationResult:
    """Thermalize, then record ``sample_steps`` snapshots ``sample_interval`` MC steps apart.

    Each replica starts from equal endowments with its own stream seeded by
    ``derive_seed(seed, replica)``; ``seed`` defaults to ``config.seed``.
    Raises :class:`~kinex.core.ConservationError` if money leaks.
    """
    from ._loops import random_width

    spec = kernel if isinstance(kernel, KernelSpec) else KernelSpec(kernel)
    code = _loop_code(spec, params)
    width = random_width(code, spec.k)
    base = config.seed if seed is None else seed
    n = config.n_agents

    snaps = np.empty((config.replicas * config.sample_steps, n))
    finals, seeds, max_err = [], [], 0.0
    row = 0
    for r in range(config.replicas):
        rseed = derive_seed(base, r)
        runner = _Runner(init_economy(n, config.endowment), RandomSource(rseed), code, width,
                         params, config.batch_trades)
        runner.advance(config.thermalization_steps * n)
        for _ in range(config.sample_steps):
            runner.advance(config.sample_interval * n)
            snaps[row] = runner.economy.holdings
            row += 1
        finals.append(runner.economy)
        seeds.append(rseed)
        max_err = max(max_err, runner.max_error)

    return SimulationResult(
        snapshots=snaps,
        report=inequality_report(snaps, bins),
        final=finals,
        seeds=seeds,
        max_conservation_error=max_err,
    )
