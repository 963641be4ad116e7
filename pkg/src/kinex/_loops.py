"""Compiled inner loops. Each call applies a batch of pre-drawn trades in place.

Both agents are updated from their pre-trade holdings; agent ``j`` receives
``m_i + m_j - m_i'`` so conservation is exact up to one rounding.
"""

from __future__ import annotations

import numba

GENERALIZED = 0
RANDOM_SHARE = 1
DIVERSIFIED = 2
MICROTRADE = 3
MICROTRADE_CC = 4


@numba.njit(cache=True, nogil=True)
def apply_trades(m, ii, jj, u, kind, lam, alpha):
    n_trades = ii.shape[0]
    width = u.shape[1]
    keep = 1.0 - lam
    for t in range(n_trades):
        i = ii[t]
        j = jj[t]
        mi = m[i]
        mj = m[j]
        pot = mi + mj
        if kind == GENERALIZED:
            w1 = u[t, 0]
            w2 = u[t, 1]
            new_i = (lam + w1 * keep) * mi + (alpha * w1 + (1.0 - alpha) * w2) * keep * mj
        elif kind == RANDOM_SHARE:
            new_i = u[t, 0] * pot
        elif kind == DIVERSIFIED:
            s = 0.0
            for k in range(width):
                s += u[t, k]
            new_i = s / width * pot
        else:
            a1 = u[t, 0] * keep
            if kind == MICROTRADE_CC:
                b1 = a1
            else:
                b1 = u[t, 1] * keep
            denom = 1.0 - a1 + b1
            th11 = (lam * a1 + keep * b1) / denom
            th12 = b1 / denom
            new_i = (lam + th11) * mi + th12 * mj
        if new_i > pot:
            new_i = pot
        m[i] = new_i
        m[j] = pot - new_i


def random_width(kind: int, k: int) -> int:
    if kind == RANDOM_SHARE:
        return 1
    if kind == DIVERSIFIED:
        return k
    return 2

