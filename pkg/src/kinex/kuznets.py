"""Inequality along the path ``alpha = lam ** (1 / tau)``.

The economy moves from (lam, alpha) = (0, 0) toward (1, 1). Each sweep
evaluates the closed-form variance at every grid point and, optionally, a
Monte Carlo steady state of the generalized kernel.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field, fields

import numpy as np

from .analytics import closed_form_variance, moving_average
from .core import ModelParams, SimConfig, derive_seed
from .kernels import Kernel, run_simulation

COLUMNS = ("lambda", "alpha", "variance_closed", "variance_mc", "cv_closed", "cv_mc", "gini_mc", "seed")
SMOOTH_WINDOW = 3


def default_grid(points: int = 99, top: float = 0.99) -> np.ndarray:
    """``points`` uniform values in ``(0, top]``: 0.01, 0.02, ..., 0.99 by default."""
    return top * np.arange(1, points + 1) / points


def path_alpha(lam, tau: float):
    if not tau > 0:
        raise ValueError("tau must be positive")
    lam_a = np.asarray(lam, dtype=np.float64)
    if np.any((lam_a < 0) | (lam_a >= 1)):
        raise ValueError("lambda must lie in [0, 1)")
    out = lam_a ** (1.0 / tau)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PathSpec:
    tau: float
    lambda_grid: np.ndarray = field(default_factory=default_grid)

    def __post_init__(self) -> None:
        grid = np.asarray(self.lambda_grid, dtype=np.float64)
        object.__setattr__(self, "lambda_grid", grid)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("lambda_grid must be a non-empty vector")
        if np.any((grid < 0) | (grid >= 1)):
            raise ValueError("lambda_grid must lie in [0, 1)")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("lambda_grid must be strictly increasing")

    @property
    def alphas(self) -> np.ndarray:
        return path_alpha(self.lambda_grid, self.tau)


@dataclass
class SweepRow:
    lam: float
    alpha: float
    variance_closed: float
    variance_mc: float | None = None
    cv_closed: float = 0.0
    cv_mc: float | None = None
    gini_mc: float | None = None
    seed: int | None = None


@dataclass
class SweepResult:
    tau: float
    rows: list[SweepRow]

    def column(self, name: str) -> np.ndarray:
        attr = "lam" if name == "lambda" else name
        if attr not in {f.name for f in fields(SweepRow)}:
            raise KeyError(name)
        vals = [getattr(r, attr) for r in self.rows]
        return np.array([np.nan if v is None else v for v in vals], dtype=np.float64)

    @property
    def has_mc(self) -> bool:
        return all(r.variance_mc is not None for r in self.rows)

    def to_csv(self, with_tau: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow((("tau",) if with_tau else ()) + COLUMNS)
        for r in self.rows:
            cells = [format_cell(v) for v in astuple(r)]
            w.writerow(([format_cell(self.tau)] if with_tau else []) + cells)
        return buf.getvalue()


def format_cell(v) -> str:
    """Locale-free, round-trip exact text for CSV cells; ``None`` is empty."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def sweep_closed_form(path: PathSpec) -> SweepResult:
    lam = path.lambda_grid
    alpha = path.alphas
    var = closed_form_variance(lam, alpha)
    rows = [
        SweepRow(float(l), float(a), float(v), cv_closed=math.sqrt(v))
        for l, a, v in zip(lam, alpha, var)
    ]
    return SweepResult(path.tau, rows)


def sweep_monte_carlo(path: PathSpec, config: SimConfig, workers: int = 1) -> SweepResult:
    """Closed-form columns plus a generalized-kernel steady state per grid point.

    Grid point ``k`` is seeded with ``derive_seed(config.seed, k)``, so the
    result does not depend on ``workers``.
    """
    result = sweep_closed_form(path)

    def job(k: int) -> tuple[int, float, float, int]:
        row = result.rows[k]
        seed = derive_seed(config.seed, k)
        sim = run_simulation(config, ModelParams(row.lam, row.alpha), Kernel.GENERALIZED, seed=seed)
        return k, sim.report.variance, sim.report.gini, seed

    indices = range(len(result.rows))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, indices))
    else:
        outcomes = [job(k) for k in indices]

    for k, var, g, seed in outcomes:
        row = result.rows[k]
        row.variance_mc = var
        row.cv_mc = math.sqrt(var)
        row.gini_mc = g
        row.seed = seed
    return result


def detect_reversal(result: SweepResult, column: str = "cv_closed") -> tuple[int, bool]:
    """Locate the inequality peak and decide whether it is an inverted U.

    Monte Carlo columns (``*_mc``) are first smoothed with a centered moving
    average of width 3; closed-form columns are used as is. The peak is the
    argmax of the (smoothed) series. It is a reversal iff the peak is interior
    and the series never falls before it nor rises after it.
    """
    if len(result.rows) < 3:
        raise ValueError("need at least three grid points")
    series = result.column(column)
    if np.any(np.isnan(series)):
        raise ValueError(f"column {column!r} has missing values")
    if column.endswith("_mc"):
        series = moving_average(series, SMOOTH_WINDOW)
    peak = int(np.argmax(series))
    interior = 0 < peak < series.size - 1
    rising = bool(np.all(np.diff(series[: peak + 1]) >= 0))
    falling = bool(np.all(np.diff(series[peak:]) <= 0))
    return peak, interior and rising and falling


def interior_maxima(series) -> list[int]:
    """Indices of strict-left, weak-right interior local maxima."""
    s = np.asarray(series, dtype=np.float64)
    return [i for i in range(1, s.size - 1) if s[i] > s[i - 1] and s[i] >= s[i + 1]]
