"""Leaf-wise regression tree grown from gradient histograms.

Split gain follows the regularized squared-loss form
G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G_P^2/(H_P+lambda), where G is
the weighted gradient sum and H the weighted instance count at a node.
The best-gain leaf anywhere in the tree is expanded first; the smaller
child's histogram is built directly and the sibling's derived by
subtraction from the parent.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelError
from .binning import BinMapper
from .efb import FeatureBundle

MIN_GAIN = 1e-12
GAIN_TIE_REL = 1e-9  # gains this close count as tied (absorbs fp noise)

# one histogram = per bundle column, arrays (grad sum, weight sum, raw count)
Histograms = list[tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass
class RegressionTree:
    """Flat-array binary tree; node 0 is the root.

    Internal nodes: feature, threshold (raw value; go left iff x <= t),
    children. Leaves: value. Every node records its training cover.
    """

    feature: np.ndarray        # int32, -1 for leaves
    threshold: np.ndarray      # float64, NaN for leaves
    left: np.ndarray           # int32, -1 for leaves
    right: np.ndarray          # int32, -1 for leaves
    value: np.ndarray          # float64, 0 for internal nodes
    cover: np.ndarray          # int64, training instance count per node

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, i: int) -> bool:
        return self.left[i] < 0

    def predict_batch(self, features: np.ndarray) -> np.ndarray:
        n = features.shape[0]
        idx = np.zeros(n, dtype=np.int64)
        while True:
            leaf = self.left[idx] < 0
            if leaf.all():
                break
            f = self.feature[idx]
            f[leaf] = 0  # placeholder, masked out below
            go_left = features[np.arange(n), f] <= self.threshold[idx]
            nxt = np.where(go_left, self.left[idx], self.right[idx])
            idx = np.where(leaf, idx, nxt)
        return self.value[idx]

    def predict(self, x: np.ndarray) -> float:
        i = 0
        while self.left[i] >= 0:
            i = self.left[i] if x[self.feature[i]] <= self.threshold[i] else self.right[i]
        return float(self.value[i])


def build_histograms(columns: list[np.ndarray], bundles: list[FeatureBundle],
                     idx: np.ndarray, grad_w: np.ndarray, w: np.ndarray) -> Histograms:
    """Per-bundle histograms over the rows in ``idx``.

    ``grad_w`` and ``w`` are aligned with ``idx`` (already weighted).
    """
    hists = []
    for col, b in zip(columns, bundles):
        bins = col[idx]
        g = np.bincount(bins, weights=grad_w, minlength=b.n_bins)
        h = np.bincount(bins, weights=w, minlength=b.n_bins)
        c = np.bincount(bins, minlength=b.n_bins).astype(np.int64)
        hists.append((g, h, c))
    return hists


def subtract_histograms(parent: Histograms, child: Histograms) -> Histograms:
    return [(pg - cg, ph - ch, pc - cc)
            for (pg, ph, pc), (cg, ch, cc) in zip(parent, child)]


def decode_feature_histograms(hists: Histograms, bundles: list[FeatureBundle],
                              n_features: int):
    """Recover per-feature (grad, weight, count) arrays from bundle histograms.

    Exact when bundles have zero conflicts; the default bin of a bundled
    member is reconstructed by subtracting its non-default bins from the
    node totals.
    """
    g0, h0, c0 = hists[0]
    tot_g, tot_h, tot_c = g0.sum(), h0.sum(), c0.sum()
    out: list = [None] * n_features
    for (g, h, c), b in zip(hists, bundles):
        if b.singleton:
            out[b.members[0]] = (g, h, c)
            continue
        for f, off in zip(b.members, b.offsets):
            nb = _member_bins(b, f)
            fg = np.empty(nb); fh = np.empty(nb); fc = np.empty(nb, dtype=np.int64)
            fg[1:] = g[off:off + nb - 1]
            fh[1:] = h[off:off + nb - 1]
            fc[1:] = c[off:off + nb - 1]
            fg[0] = tot_g - fg[1:].sum()
            fh[0] = tot_h - fh[1:].sum()
            fc[0] = tot_c - fc[1:].sum()
            out[f] = (fg, fh, fc)
    return out


def _member_bins(b: FeatureBundle, f: int) -> int:
    i = b.members.index(f)
    nxt = b.offsets[i + 1] if i + 1 < len(b.members) else b.n_bins
    return nxt - b.offsets[i] + 1


def _best_split(feature_hists, lam: float, min_samples_leaf: int):
    """Scan all bin boundaries; returns (gain, feature, bin) or None.

    Ties resolve to the lower feature index, then the lower bin. Gains
    within GAIN_TIE_REL of each other count as tied, so a few ulps of
    accumulation noise (e.g. bundled vs direct histograms) cannot flip
    the choice.
    """
    best = None
    for f, (g, h, c) in enumerate(feature_hists):
        if len(g) < 2:
            continue
        gl = np.cumsum(g)[:-1]
        hl = np.cumsum(h)[:-1]
        cl = np.cumsum(c)[:-1]
        gp, hp, cp = gl[-1] + g[-1], hl[-1] + h[-1], cl[-1] + c[-1]
        gr, hr, cr = gp - gl, hp - hl, cp - cl
        valid = (cl >= min_samples_leaf) & (cr >= min_samples_leaf) & (hl > 0) & (hr > 0)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(
                valid,
                gl ** 2 / (hl + lam) + gr ** 2 / (hr + lam) - gp ** 2 / (hp + lam),
                -np.inf,
            )
        top = float(np.max(gain))
        if top <= MIN_GAIN:
            continue
        s = int(np.nonzero(gain >= top - GAIN_TIE_REL * abs(top))[0][0])
        top = float(gain[s])
        if best is None or top > best[0] + GAIN_TIE_REL * abs(best[0]):
            best = (top, f, s)
    return best


@dataclass(order=True)
class _Candidate:
    sort_key: tuple = field(compare=True)
    node: int = field(compare=False, default=-1)
    split: tuple = field(compare=False, default=None)
    idx: np.ndarray = field(compare=False, default=None)
    hists: Histograms = field(compare=False, default=None)


class _TreeBuilder:
    def __init__(self):
        self.feature = []; self.threshold = []
        self.left = []; self.right = []
        self.value = []; self.cover = []

    def add_node(self, cover: int) -> int:
        self.feature.append(-1); self.threshold.append(np.nan)
        self.left.append(-1); self.right.append(-1)
        self.value.append(0.0); self.cover.append(cover)
        return len(self.feature) - 1

    def finish(self) -> RegressionTree:
        return RegressionTree(
            feature=np.array(self.feature, dtype=np.int32),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            value=np.array(self.value, dtype=np.float64),
            cover=np.array(self.cover, dtype=np.int64),
        )


def build_tree(binned: np.ndarray, columns: list[np.ndarray],
               bundles: list[FeatureBundle], mapper: BinMapper,
               gradients: np.ndarray, weights: np.ndarray, rows: np.ndarray,
               *, max_leaves: int, lam: float, min_samples_leaf: int) -> RegressionTree:
    """Grow one tree on the given rows.

    ``gradients``/``weights`` are aligned with ``rows``. Leaf values are
    sum(w*g)/(sum(w)+lambda), computed directly from the leaf's rows.
    """
    if rows.size == 0:
        raise ModelError("cannot build a tree on zero rows")
    d = binned.shape[1]
    n_leaves = 1
    builder = _TreeBuilder()
    root = builder.add_node(cover=int(rows.size))

    rowpos = np.full(binned.shape[0], -1, dtype=np.int64)  # row -> gradient index
    rowpos[rows] = np.arange(rows.size)

    def node_stats(idx):
        sel = rowpos[idx]
        return weights[sel] * gradients[sel], weights[sel]

    def leaf_value(idx):
        gw, w = node_stats(idx)
        return float(gw.sum() / (w.sum() + lam))

    gw0, w0 = node_stats(rows)
    hists0 = build_histograms(columns, bundles, rows, gw0, w0)

    heap: list[_Candidate] = []
    counter = 0

    def push(node, idx, hists):
        nonlocal counter
        fh = decode_feature_histograms(hists, bundles, d)
        split = _best_split(fh, lam, min_samples_leaf)
        if split is not None:
            # key rounded to 12 significant digits so fp accumulation noise
            # cannot reorder mathematically tied leaves
            heapq.heappush(heap, _Candidate(
                sort_key=(-float(f"{split[0]:.12e}"), counter), node=node,
                split=split, idx=idx, hists=hists))
            counter += 1
        else:
            builder.value[node] = leaf_value(idx)

    push(root, rows, hists0)

    while heap and n_leaves < max_leaves:
        cand = heapq.heappop(heap)
        _, f, s = cand.split
        go_left = binned[cand.idx, f] <= s
        li, ri = cand.idx[go_left], cand.idx[~go_left]

        ln = builder.add_node(cover=int(li.size))
        rn = builder.add_node(cover=int(ri.size))
        builder.feature[cand.node] = f
        builder.threshold[cand.node] = float(mapper.upper_edges[f][s])
        builder.left[cand.node] = ln
        builder.right[cand.node] = rn
        n_leaves += 1

        small, big = (li, ri) if li.size <= ri.size else (ri, li)
        gws, ws = node_stats(small)
        small_h = build_histograms(columns, bundles, small, gws, ws)
        big_h = subtract_histograms(cand.hists, small_h)
        if small is li:
            push(ln, li, small_h); push(rn, ri, big_h)
        else:
            push(ln, li, big_h); push(rn, ri, small_h)

    # remaining candidates become leaves
    for cand in heap:
        builder.value[cand.node] = leaf_value(cand.idx)
    return builder.finish()
