"""Inequality measures for money-holding snapshots.

All functions are pure and work on read-only arrays. Snapshot stacks have
shape ``(n_snapshots, n_agents)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_BINS = 50


def closed_form_variance(lam, alpha, *, delta_limit: bool = False):
    """Mean-field steady-state variance of holdings (unit mean).

    Closing the second-moment recursion of the generalized kernel gives
    ``(Var + 1)(1 - z) = 2 (1 - lam) [alpha (1 - lam)/3 + lam/2 + (1 - lam)(1 - alpha)/4]``
    with ``z = lam + (1 - lam)^2 (alpha^2 - alpha + 4) / 6``. Cancelling the
    common ``1 - lam`` factor leaves

        Var = (1 - lam)(1 + alpha^2) / (6 - (1 - lam)(4 - alpha + alpha^2))

    whose denominator is at least 2, so it is evaluated in that form.
    Works elementwise on arrays. ``lam == 1`` is only accepted with
    ``delta_limit=True`` and gives the frozen-economy value 0.
    """
    lam_a = np.asarray(lam, dtype=np.float64)
    alpha_a = np.asarray(alpha, dtype=np.float64)
    if np.any((alpha_a < 0) | (alpha_a > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    if np.any((lam_a < 0) | (lam_a > 1)):
        raise ValueError("lambda must lie in [0, 1]")
    if np.any(lam_a == 1.0) and not delta_limit:
        raise ValueError("lambda = 1 is the delta-function limit; pass delta_limit=True")

    keep = 1.0 - lam_a
    var = keep * (1.0 + alpha_a**2) / (6.0 - keep * (4.0 - alpha_a + alpha_a**2))
    return float(var) if var.ndim == 0 else var


def empirical_moments(holdings) -> tuple[float, float]:
    """Sample mean and unbiased (``n - 1``) variance of one snapshot."""
    x = np.asarray(holdings, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty snapshot")
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.var(ddof=1))


def gini(holdings) -> float:
    """Gini concentration ratio with the ``2 mu N (N - 1)`` normalization.

    Uses the sorted-rank identity ``sum_ij |x_i - x_j| = 2 sum_k (2k - N - 1) x_(k)``.
    """
    x = np.sort(np.asarray(holdings, dtype=np.float64).ravel())
    n = x.size
    if n < 2:
        raise ValueError("gini needs at least two holdings")
    if x[-1] > 0:
        x = x / x[-1]  # scale-free; keeps tiny holdings from underflowing the mean
    mu = x.mean()
    if not mu > 0:
        raise ValueError("gini is undefined for zero mean")
    ranks = 2.0 * np.arange(1, n + 1) - n - 1
    return float(np.clip(ranks @ x / (mu * n * (n - 1)), 0.0, 1.0))


def gini_pairwise(holdings) -> float:
    """Literal double-sum form, O(N^2). Reference for :func:`gini`."""
    x = np.asarray(holdings, dtype=np.float64).ravel()
    n = x.size
    if n and x.max() > 0:
        x = x / x.max()
    mu = x.mean()
    if n < 2 or not mu > 0:
        raise ValueError("gini needs N >= 2 and a positive mean")
    return float(np.abs(x[:, None] - x[None, :]).sum() / (2.0 * mu * n * (n - 1)))


def gini_rows(snapshots) -> np.ndarray:
    """Gini of every row of a snapshot stack."""
    s = np.sort(np.atleast_2d(np.asarray(snapshots, dtype=np.float64)), axis=1)
    n = s.shape[1]
    ranks = 2.0 * np.arange(1, n + 1) - n - 1
    return s @ ranks / (s.mean(axis=1) * n * (n - 1))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    densities: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def integral(self) -> float:
        return float(self.densities @ self.widths)

    def mode(self, smooth: int = 3) -> float:
        """Bin center of the peak after a centered moving average of ``smooth`` bins."""
        d = moving_average(self.densities, smooth) if smooth > 1 else self.densities
        return float(self.centers[int(np.argmax(d))])

    def log_slope(self, lo: float, hi: float) -> float:
        """Least-squares slope of ``log(density)`` against ``m`` over ``[lo, hi]``."""
        c = self.centers
        sel = (c >= lo) & (c <= hi) & (self.densities > 0)
        if sel.sum() < 2:
            raise ValueError("fewer than two populated bins in the fit window")
        return float(np.polyfit(c[sel], np.log(self.densities[sel]), 1)[0])


def estimate_distribution(snapshots, bins: int = DEFAULT_BINS, upper: float | None = None) -> Histogram:
    """Pooled, density-normalized histogram over ``[0, max holding]``."""
    pool = np.asarray(snapshots, dtype=np.float64).ravel()
    if pool.size == 0:
        raise ValueError("empty snapshot pool")
    if bins < 2:
        raise ValueError("need at least two bins")
    top = float(pool.max()) if upper is None else float(upper)
    if not top > 0:
        top = 1.0
    dens, edges = np.histogram(pool, bins=bins, range=(0.0, top), density=True)
    return Histogram(edges, dens)


def moving_average(x, window: int = 3) -> np.ndarray:
    """Centered moving average; the window shrinks at the ends."""
    x = np.asarray(x, dtype=np.float64)
    if window <= 1:
        return x.copy()
    half = window // 2
    c = np.concatenate(([0.0], np.cumsum(x)))
    lo = np.clip(np.arange(x.size) - half, 0, x.size)
    hi = np.clip(np.arange(x.size) + half + 1, 0, x.size)
    return (c[hi] - c[lo]) / (hi - lo)


@dataclass(frozen=True)
class InequalityReport:
    mean: float
    variance: float
    cv: float
    gini: float
    histogram: Histogram
    n_snapshots: int

    def as_row(self) -> dict[str, float]:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "cv": self.cv,
            "gini": self.gini,
            "n_snapshots": self.n_snapshots,
        }


def inequality_report(snapshots, bins: int = DEFAULT_BINS) -> InequalityReport:
    """Time/ensemble averages over a snapshot stack.

    ``variance`` is the average of per-snapshot unbiased variances and ``gini``
    the average per-snapshot Gini; the histogram pools every holding.
    """
    s = np.atleast_2d(np.asarray(snapshots, dtype=np.float64))
    if s.size == 0:
        raise ValueError("empty snapshot stack")
    mean = float(s.mean())
    variance = float(s.var(axis=1, ddof=1).mean()) if s.shape[1] > 1 else 0.0
    return InequalityReport(
        mean=mean,
        variance=variance,
        cv=math.sqrt(variance) / mean,
        gini=float(gini_rows(s).mean()),
        histogram=estimate_distribution(s, bins),
        n_snapshots=s.shape[0],
    )


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n: int, m: int, level: float = 0.01) -> float:
    """Large-sample critical value of the two-sample KS statistic at ``level``."""
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    return c * math.sqrt((n + m) / (n * m))
