"""Quantile binning of dense feature matrices for histogram split finding.

Each feature gets at most ``max_bins`` bins. A bin is delimited by upper
edges taken from the data; a value equal to an edge falls in the lower
bin. Split thresholds are therefore expressible as raw feature values,
so trained trees evaluate directly on unbinned inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class BinMapper:
    upper_edges: tuple[np.ndarray, ...]  # per feature, len n_bins-1, sorted

    @property
    def n_features(self) -> int:
        return len(self.upper_edges)

    def n_bins(self, feature: int) -> int:
        return len(self.upper_edges[feature]) + 1

    def transform(self, features: np.ndarray) -> np.ndarray:
        """Map raw values to bin indices (uint8)."""
        n, d = features.shape
        if d != self.n_features:
            raise DataError(f"expected {self.n_features} features, got {d}")
        binned = np.empty((n, d), dtype=np.uint8)
        for f in range(d):
            # side='left': x == edge goes to the lower bin
            binned[:, f] = np.searchsorted(self.upper_edges[f], features[:, f], side="left")
        return binned


def fit_bins(features: np.ndarray, max_bins: int) -> BinMapper:
    if not (2 <= max_bins <= 255):
        raise DataError(f"max_bins must be in [2, 255], got {max_bins}")
    features = np.asarray(features, dtype=np.float64)
    if np.isnan(features).any():
        raise DataError("NaN in features; preprocessing contract violated")
    edges = []
    for f in range(features.shape[1]):
        col = features[:, f]
        uniq = np.unique(col)
        if len(uniq) <= max_bins:
            e = uniq[:-1]
        else:
            qs = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            e = np.unique(qs)
        edges.append(np.ascontiguousarray(e, dtype=np.float64))
    return BinMapper(upper_edges=tuple(edges))
