"""Shapley attributions for GBDT predictions.

Implements the path-dependent tree algorithm: node covers supply the
conditional-expectation weights, and credit for each leaf is distributed
over the unique features on its path in polynomial time
(O(trees * leaves * depth^2)). Local accuracy holds by construction:
base value plus the contribution sum equals the model prediction.

This is the path-dependent variant, not the interventional one with a
background dataset; the two differ on correlated features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ModelError
from .gbdt.model import GBDTModel
from .gbdt.tree import RegressionTree


@dataclass(frozen=True)
class ShapExplanation:
    base_value: float
    contributions: np.ndarray  # phi per feature
    prediction: float

    def to_rows(self, feature_names, feature_values=None) -> list[dict]:
        """JSON-friendly rows {feature, value, phi} sorted by |phi| desc."""
        rows = []
        for j, name in enumerate(feature_names):
            rows.append({
                "feature": name,
                "value": None if feature_values is None else float(feature_values[j]),
                "phi": float(self.contributions[j]),
            })
        rows.sort(key=lambda r: -abs(r["phi"]))
        return rows


@dataclass(frozen=True)
class GlobalImportance:
    mean_abs_phi: np.ndarray
    ranking: tuple[int, ...]  # feature indices, descending importance


def _tree_expected_value(t: RegressionTree) -> float:
    """Cover-weighted mean leaf value."""

    def rec(i):
        if t.left[i] < 0:
            return float(t.value[i])
        cl, cr = float(t.cover[t.left[i]]), float(t.cover[t.right[i]])
        tot = cl + cr
        return (cl * rec(t.left[i]) + cr * rec(t.right[i])) / tot

    return rec(0)


def _tree_shap(t: RegressionTree, x, phi: np.ndarray) -> None:
    """Accumulate one tree's (unscaled) contributions into phi."""
    feature = t.feature.tolist()
    threshold = t.threshold.tolist()
    left = t.left.tolist()
    right = t.right.tolist()
    value = t.value.tolist()
    cover = t.cover.tolist()

    # path element arrays: unique feature, zero fraction, one fraction, weight
    def extend(pd, pz, po, pw, d_new, z_new, o_new):
        k = len(pd)
        pd = pd + [d_new]
        pz = pz + [z_new]
        po = po + [o_new]
        pw = pw + [1.0 if k == 0 else 0.0]
        for i in range(k - 1, -1, -1):
            pw[i + 1] += o_new * pw[i] * (i + 1) / (k + 1)
            pw[i] = z_new * pw[i] * (k - i) / (k + 1)
        return pd, pz, po, pw

    def unwind(pd, pz, po, pw, path_index):
        k = len(pd) - 1
        o = po[path_index]
        z = pz[path_index]
        pd, pz, po, pw = pd[:], pz[:], po[:], pw[:]
        nxt = pw[k]
        for i in range(k - 1, -1, -1):
            if o != 0.0:
                tmp = pw[i]
                pw[i] = nxt * (k + 1) / ((i + 1) * o)
                nxt = tmp - pw[i] * z * (k - i) / (k + 1)
            else:
                pw[i] = pw[i] * (k + 1) / (z * (k - i))
        for i in range(path_index, k):
            pd[i] = pd[i + 1]
            pz[i] = pz[i + 1]
            po[i] = po[i + 1]
        return pd[:k], pz[:k], po[:k], pw[:k]

    def unwound_sum(pz, po, pw, path_index):
        k = len(pz) - 1
        o = po[path_index]
        z = pz[path_index]
        nxt = pw[k]
        total = 0.0
        for i in range(k - 1, -1, -1):
            if o != 0.0:
                tmp = nxt * (k + 1) / ((i + 1) * o)
                total += tmp
                nxt = pw[i] - tmp * z * (k - i) / (k + 1)
            else:
                total += pw[i] * (k + 1) / (z * (k - i))
        return total

    def recurse(j, pd, pz, po, pw, parent_z, parent_o, parent_d):
        pd, pz, po, pw = extend(pd, pz, po, pw, parent_d, parent_z, parent_o)
        if left[j] < 0:
            v = value[j]
            for i in range(1, len(pd)):
                w = unwound_sum(pz, po, pw, i)
                phi[pd[i]] += w * (po[i] - pz[i]) * v
            return
        f = feature[j]
        hot, cold = (left[j], right[j]) if x[f] <= threshold[j] else (right[j], left[j])
        iz, io = 1.0, 1.0
        for i in range(1, len(pd)):
            if pd[i] == f:
                iz, io = pz[i], po[i]
                pd, pz, po, pw = unwind(pd, pz, po, pw, i)
                break
        cj = cover[j]
        recurse(hot, pd, pz, po, pw, iz * cover[hot] / cj, io, f)
        recurse(cold, pd, pz, po, pw, iz * cover[cold] / cj, 0.0, f)

    recurse(0, [], [], [], [], 1.0, 1.0, -1)


def explain(model: GBDTModel, x) -> ShapExplanation:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ModelError(f"expected {model.n_features} features, got shape {x.shape}")
    phi = np.zeros(model.n_features)
    base = model.base_score
    eta = model.config.learning_rate
    for t in model.trees:
        if t.n_nodes == 1:  # single-leaf tree: constant shift, no credit
            base += eta * float(t.value[0])
            continue
        tree_phi = np.zeros(model.n_features)
        _tree_shap(t, x, tree_phi)
        phi += eta * tree_phi
        base += eta * _tree_expected_value(t)
    return ShapExplanation(base_value=base, contributions=phi,
                           prediction=model.predict(x))


def global_importance(model: GBDTModel, data: np.ndarray) -> GlobalImportance:
    """Mean |phi| per feature over the rows of ``data``."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise DataError("need a non-empty 2-D matrix")
    acc = np.zeros(model.n_features)
    for i in range(data.shape[0]):
        acc += np.abs(explain(model, data[i]).contributions)
    mean_abs = acc / data.shape[0]
    ranking = tuple(int(i) for i in np.argsort(-mean_abs, kind="stable"))
    return GlobalImportance(mean_abs_phi=mean_abs, ranking=ranking)
