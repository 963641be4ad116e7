"""Two-agent Cobb-Douglas exchange with money as numeraire.

Agent 1 produces ``q1`` units of good 1, agent 2 produces ``q2`` units of
good 2. Both maximize ``x1^a1 x2^a2 m^lam`` under their budgets; prices are
set so both goods markets clear, which fixes the money each agent carries
into the next period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RandomSource

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class AgentPrefs:
    """Exponents on good 1, good 2 and money; they sum to one."""

    a1: float
    a2: float
    lam: float

    def __post_init__(self) -> None:
        if not (self.a1 > 0 and self.a2 > 0 and self.lam > 0):
            raise ValueError(f"all exponents must be strictly positive: {self}")
        if abs(self.a1 + self.a2 + self.lam - 1.0) > _SUM_TOL:
            raise ValueError(f"exponents must sum to 1: {self}")


@dataclass(frozen=True)
class TradeSetup:
    prefs_1: AgentPrefs
    prefs_2: AgentPrefs
    m1: float
    m2: float
    q1: float = 1.0
    q2: float = 1.0

    def __post_init__(self) -> None:
        if self.prefs_1.lam != self.prefs_2.lam:
            raise ValueError("both agents must share the same money exponent")
        if not (self.q1 > 0 and self.q2 > 0):
            raise ValueError("outputs q1, q2 must be positive")
        if not (self.m1 >= 0 and self.m2 >= 0):
            raise ValueError("money holdings must be non-negative")

    def rescaled(self, q1: float, q2: float) -> TradeSetup:
        return TradeSetup(self.prefs_1, self.prefs_2, self.m1, self.m2, q1, q2)


@dataclass(frozen=True)
class ClearingOutcome:
    p1: float
    p2: float
    demands: tuple[float, float, float, float]  # x1*, x2*, y1*, y2*
    m1_next: float
    m2_next: float
    theta: np.ndarray  # 2x2, theta[i, j] multiplies m_j(t) in agent i's update

    def clearing_residuals(self, q1: float, q2: float) -> tuple[float, float]:
        x1, x2, y1, y2 = self.demands
        return abs(x1 + y1 - q1) / q1, abs(x2 + y2 - q2) / q2


def solve_demands(prefs: AgentPrefs, wealth: float, p1: float, p2: float) -> tuple[float, float, float]:
    """Cobb-Douglas demands: each exponent is the budget share of its good."""
    if not (p1 > 0 and p2 > 0):
        raise ValueError("prices must be positive")
    if not wealth > 0:
        raise ValueError("wealth must be positive")
    return prefs.a1 * wealth / p1, prefs.a2 * wealth / p2, prefs.lam * wealth


def theta_matrix(prefs_1: AgentPrefs, prefs_2: AgentPrefs) -> np.ndarray:
    """Transfer coefficients so that ``m(t+1) = lam m(t) + theta @ m(t)``."""
    lam = prefs_1.lam
    a1, a2 = prefs_1.a1, prefs_1.a2
    b1, b2 = prefs_2.a1, prefs_2.a2
    d = 1.0 - a1 + b1
    return np.array(
        [
            [(lam * a1 + (1.0 - lam) * b1) / d, b1 / d],
            [a2 / d, (lam * b2 + (1.0 - lam) * a2) / d],
        ]
    )


def clear_market(setup: TradeSetup) -> ClearingOutcome:
    """Market-clearing prices, demands and next-period money.

    Writing revenues ``u = p1 q1`` and ``v = p2 q2``, clearing both goods is
    the linear system

        (1 - a1) u - b1 v       = a1 M1 + b1 M2
        -a2 u      + (1 - b2) v = a2 M1 + b2 M2

    whose determinant is ``lam (1 - a1 + b1)``. Solved directly; no root finder.
    """
    f, g = setup.prefs_1, setup.prefs_2
    lam = f.lam
    a1, a2, b1, b2 = f.a1, f.a2, g.a1, g.a2
    M1, M2 = setup.m1, setup.m2

    det = (1.0 - a1) * (1.0 - b2) - a2 * b1
    if not det > 0:
        raise ValueError("degenerate preferences: clearing system is singular")
    r1 = a1 * M1 + b1 * M2
    r2 = a2 * M1 + b2 * M2
    u = (r1 * (1.0 - b2) + b1 * r2) / det
    v = ((1.0 - a1) * r2 + a2 * r1) / det

    p1, p2 = u / setup.q1, v / setup.q2
    if not (p1 > 0 and p2 > 0):
        raise ValueError("no positive clearing prices: both agents hold zero money")
    w1, w2 = M1 + u, M2 + v
    x1, x2, m1_next = solve_demands(f, w1, p1, p2)
    y1, y2, m2_next = solve_demands(g, w2, p1, p2)
    return ClearingOutcome(p1, p2, (x1, x2, y1, y2), m1_next, m2_next, theta_matrix(f, g))


def sample_prefs(rng: RandomSource, lam: float, *, cc_limit: bool = False) -> tuple[AgentPrefs, AgentPrefs]:
    """Random exponents with fixed money exponent ``lam``.

    The good-1 exponent is uniform on ``(0, 1 - lam)`` for each agent, the
    good-2 exponent takes the remainder. ``cc_limit`` copies agent 1's
    exponents to agent 2.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    keep = 1.0 - lam

    def draw() -> AgentPrefs:
        while True:
            a1 = rng.uniform() * keep
            a2 = 1.0 - lam - a1
            if a1 > 0 and a2 > 0:
                return AgentPrefs(a1, a2, lam)

    p = draw()
    return (p, p) if cc_limit else (p, draw())


@dataclass(frozen=True)
class IdentityReport:
    trials: int
    max_clearing_residual: float
    max_conservation_error: float
    max_theta_error: float
    max_column_sum_error: float
    max_rescale_error: float
    min_price: float


def verify_identities(rng: RandomSource, trials: int = 10_000, lam: float | None = None) -> IdentityReport:
    """Check clearing, conservation and the theta form on random setups.

    ``lam`` is drawn uniformly on ``(0.01, 0.99)`` per trial unless fixed.
    Money holdings are uniform on ``(0, 2)`` and outputs log-uniform on ``[0.1, 10]``.
    """
    clear_res = cons = theta_err = col_err = resc = 0.0
    min_price = math.inf
    for _ in range(trials):
        lam_t = lam if lam is not None else 0.01 + 0.98 * rng.uniform()
        f, g = sample_prefs(rng, lam_t)
        m1, m2 = 2.0 * rng.uniform(), 2.0 * rng.uniform()
        q1, q2 = 10.0 ** (2.0 * rng.uniform(2) - 1.0)
        setup = TradeSetup(f, g, m1, m2, q1, q2)
        out = clear_market(setup)

        total = m1 + m2
        clear_res = max(clear_res, *out.clearing_residuals(q1, q2))
        cons = max(cons, abs(out.m1_next + out.m2_next - total) / total)
        via_theta = lam_t * np.array([m1, m2]) + out.theta @ np.array([m1, m2])
        theta_err = max(theta_err, float(np.max(np.abs(via_theta - [out.m1_next, out.m2_next]))) / total)
        col_err = max(col_err, float(np.max(np.abs(out.theta.sum(axis=0) - (1.0 - lam_t)))))
        s = 10.0 ** (2.0 * rng.uniform(2) - 1.0)
        other = clear_market(setup.rescaled(q1 * s[0], q2 * s[1]))
        resc = max(resc, abs(other.m1_next - out.m1_next) / total, abs(other.m2_next - out.m2_next) / total)
        min_price = min(min_price, out.p1, out.p2)
    return IdentityReport(
        trials, float(clear_res), float(cons), float(theta_err), float(col_err), float(resc), float(min_price)
    )


def coefficient_correlation(rng: RandomSource, lam: float, draws: int = 100_000) -> float:
    """Sample correlation of agent 1's self-retention ``lam + theta11`` with its cross share ``theta12``."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    keep = 1.0 - lam
    a1 = rng.uniform(draws) * keep
    b1 = rng.uniform(draws) * keep
    d = 1.0 - a1 + b1
    self_share = lam + (lam * a1 + keep * b1) / d
    cross = b1 / d
    return float(np.corrcoef(self_share, cross)[0, 1])
