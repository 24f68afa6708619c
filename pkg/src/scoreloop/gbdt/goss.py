"""Gradient-based one-side sampling.

All instances whose absolute gradient falls in the top ``a`` fraction are
kept with weight 1; a further ``b`` fraction is sampled uniformly from the
remainder and amplified by (1 - a) / b so that weighted gradient sums stay
unbiased estimates of the full sums.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DataError


def goss_sample(gradients: np.ndarray, top_rate: float, other_rate: float,
                seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (row indices, per-row weights), deterministic under seed.

    Ties in |gradient| are broken by keeping the lowest index first.
    """
    g = np.asarray(gradients, dtype=np.float64)
    n = g.size
    if n < 1:
        raise DataError("goss_sample needs at least one instance")
    if not (0.0 < top_rate < 1.0 and 0.0 < other_rate < 1.0 and top_rate + other_rate <= 1.0):
        raise DataError(f"invalid GOSS rates a={top_rate}, b={other_rate}")

    n_top = min(math.ceil(top_rate * n), n)
    order = np.argsort(-np.abs(g), kind="stable")  # stable => lowest index wins ties
    top_idx = order[:n_top]
    rest = order[n_top:]

    n_other = min(math.ceil(other_rate * n), rest.size)
    rng = np.random.default_rng(seed)
    sampled = rng.choice(rest, size=n_other, replace=False) if n_other else rest[:0]

    indices = np.concatenate([top_idx, sampled])
    weights = np.concatenate([
        np.ones(n_top),
        np.full(n_other, (1.0 - top_rate) / other_rate),
    ])
    # sort by row index so downstream accumulation order is canonical
    order2 = np.argsort(indices, kind="stable")
    return indices[order2], weights[order2]
