"""Exclusive feature bundling.

Sparse features that are rarely non-default at the same time are packed
into a single histogram column. Each member gets a bin offset inside the
bundle so per-feature histograms can be recovered exactly (default-bin
statistics are reconstructed by subtraction from node totals). Bundling
only changes how histograms are accumulated, never which splits exist:
split finding always runs on decoded per-feature histograms.

The default bin is bin 0, which holds the smallest raw values; for the
one-hot and count-style columns this targets, that is the zero bin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FeatureBundle:
    members: tuple[int, ...]       # original feature indices
    offsets: tuple[int, ...]       # per-member bin offset within the bundle
    n_bins: int                    # bundle column bin count

    @property
    def singleton(self) -> bool:
        return len(self.members) == 1


def bundle_features(binned: np.ndarray, n_bins: list[int],
                    max_conflicts: int = 0) -> list[FeatureBundle]:
    """Greedy bundling of binned features.

    Features are visited in decreasing non-default count; each is placed
    in the first bundle whose cumulative conflict count (rows where two
    members are both non-default) stays within ``max_conflicts``, else it
    opens a new bundle.
    """
    n, d = binned.shape
    nonzero = [binned[:, f] != 0 for f in range(d)]
    order = sorted(range(d), key=lambda f: (-int(nonzero[f].sum()), f))

    groups: list[list[int]] = []
    occupied: list[np.ndarray] = []   # rows with any member non-default
    conflicts: list[int] = []
    for f in order:
        placed = False
        for b in range(len(groups)):
            added = int((occupied[b] & nonzero[f]).sum())
            if conflicts[b] + added <= max_conflicts:
                groups[b].append(f)
                occupied[b] |= nonzero[f]
                conflicts[b] += added
                placed = True
                break
        if not placed:
            groups.append([f])
            occupied.append(nonzero[f].copy())
            conflicts.append(0)

    bundles = []
    for members in groups:
        members = sorted(members)
        if len(members) == 1:
            f = members[0]
            bundles.append(FeatureBundle((f,), (0,), n_bins[f]))
            continue
        offsets = []
        off = 1  # bundle bin 0 = all members default
        for f in members:
            offsets.append(off)
            off += n_bins[f] - 1
        bundles.append(FeatureBundle(tuple(members), tuple(offsets), off))
    return bundles


def singleton_bundles(n_bins: list[int]) -> list[FeatureBundle]:
    return [FeatureBundle((f,), (0,), nb) for f, nb in enumerate(n_bins)]


def build_bundle_columns(binned: np.ndarray, bundles: list[FeatureBundle]) -> list[np.ndarray]:
    """Materialize one integer column per bundle from the binned matrix."""
    n = binned.shape[0]
    cols = []
    for b in bundles:
        if b.singleton:
            cols.append(binned[:, b.members[0]].astype(np.int32))
            continue
        col = np.zeros(n, dtype=np.int32)
        # first non-default member in member order wins on conflict rows
        for f, off in zip(reversed(b.members), reversed(b.offsets)):
            bins = binned[:, f].astype(np.int32)
            mask = bins != 0
            col[mask] = off + bins[mask] - 1
        cols.append(col)
    return cols
