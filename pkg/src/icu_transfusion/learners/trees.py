"""Decision tree machinery shared by the random forest and the boosted trees.

Split search runs on rank-preserving bins: when a feature has at most
MAX_BINS distinct values every value gets its own bin (exact greedy
search), otherwise cut points are placed at value quantiles. Cut points
are actual data values and the split test is `x <= cut`, so any strictly
increasing per-feature transform leaves the induced partitions unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BINS = 256


@dataclass
class BinnedMatrix:
    codes: np.ndarray  # (n, d) int16 bin index per cell
    cuts: list[np.ndarray]  # per feature: cut value for a split after bin b
    n_bins: np.ndarray  # per feature bin count

    @property
    def stride(self) -> int:
        return int(self.n_bins.max())


def bin_features(X: np.ndarray) -> BinnedMatrix:
    n, d = X.shape
    codes = np.empty((n, d), dtype=np.int16)
    cuts: list[np.ndarray] = []
    n_bins = np.empty(d, dtype=np.int64)
    qs = np.linspace(0.0, 1.0, MAX_BINS + 1)[1:-1]
    for j in range(d):
        col = X[:, j]
        uniq = np.unique(col)
        if uniq.size <= MAX_BINS:
            edges = uniq[:-1]
        else:
            edges = np.unique(np.quantile(col, qs, method="lower"))
            if edges.size and edges[-1] == uniq[-1]:
                edges = edges[:-1]
        codes[:, j] = np.searchsorted(edges, col, side="left")
        cuts.append(edges.astype(np.float64))
        n_bins[j] = edges.size + 1
    return BinnedMatrix(codes=codes, cuts=cuts, n_bins=n_bins)


@dataclass
class Tree:
    """Flat-array binary tree; feature < 0 marks a leaf."""

    feature: np.ndarray
    cut: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.cut[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active[idx] = self.feature[node[idx]] >= 0
        return self.value[node]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "cut": self.cut.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            cut=np.asarray(d["cut"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
        )


class _TreeBuilder:
    def __init__(self) -> None:
        self.feature: list[int] = []
        self.cut: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.cut.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def finish(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            cut=np.asarray(self.cut, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
        )


def _node_histograms(codes_sub: np.ndarray, stride: int, weight_sets: list[np.ndarray]):
    """Per-feature histograms over one node's rows, one bincount per weight set."""
    m, k = codes_sub.shape
    flat = (codes_sub.astype(np.int64) + np.arange(k, dtype=np.int64) * stride).ravel(order="F")
    size = k * stride
    counts = np.bincount(flat, minlength=size).reshape(k, stride)
    # order="F" walks column blocks, so each weight vector tiles once per feature
    sums = [
        np.bincount(flat, weights=np.tile(w, k), minlength=size).reshape(k, stride)
        for w in weight_sets
    ]
    return counts, sums


def grow_tree_gini(
    binned: BinnedMatrix,
    rows: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_samples_split: int,
    n_candidates: int,
    rng: np.random.Generator,
) -> Tree:
    """CART with Gini impurity; leaf value is the positive-class fraction."""
    codes = binned.codes
    stride = binned.stride
    d = codes.shape[1]
    yf = y.astype(np.float64)
    builder = _TreeBuilder()
    root = builder.add()
    stack = [(root, rows, 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        m = node_rows.size
        pos = float(yf[node_rows].sum())
        builder.value[node] = pos / m
        if depth >= max_depth or m < min_samples_split or pos == 0.0 or pos == m:
            continue
        cand = rng.choice(d, size=min(n_candidates, d), replace=False)
        cand.sort()
        sub = codes[np.ix_(node_rows, cand)]
        counts, (psums,) = _node_histograms(sub, stride, [yf[node_rows]])
        cl = np.cumsum(counts, axis=1)[:, :-1].astype(np.float64)
        pl = np.cumsum(psums, axis=1)[:, :-1]
        if cl.size == 0:
            continue
        cr = m - cl
        pr = pos - pl
        valid = (cl > 0) & (cr > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ql = pl / cl
            qr = pr / cr
            child = cl * 2.0 * ql * (1.0 - ql) + cr * 2.0 * qr * (1.0 - qr)
        parent = m * 2.0 * (pos / m) * (1.0 - pos / m)
        gain = np.where(valid, parent - child, -np.inf)
        # splits only exist after bins 0..n_bins-2 of each candidate feature
        for i, f in enumerate(cand):
            gain[i, binned.n_bins[f] - 1 :] = -np.inf
        best_flat = int(np.argmax(gain))
        fi, b = divmod(best_flat, stride - 1)
        if not np.isfinite(gain[fi, b]) or gain[fi, b] <= 1e-12:
            continue
        f = int(cand[fi])
        go_left = sub[:, fi] <= b
        left_rows = node_rows[go_left]
        right_rows = node_rows[~go_left]
        lnode = builder.add()
        rnode = builder.add()
        builder.feature[node] = f
        builder.cut[node] = float(binned.cuts[f][b])
        builder.left[node] = lnode
        builder.right[node] = rnode
        stack.append((rnode, right_rows, depth + 1))
        stack.append((lnode, left_rows, depth + 1))
    return builder.finish()


def grow_tree_newton(
    binned: BinnedMatrix,
    grad: np.ndarray,
    hess: np.ndarray,
    max_depth: int,
    lam: float,
    gamma: float,
) -> tuple[Tree, np.ndarray]:
    """Regression tree on gradient/hessian stats with the second-order gain.

    gain = 0.5*(GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam)) - gamma;
    splits with gain <= 0 are rejected; leaf weight is -G/(H+lam).
    All features are candidates at every node. Also returns the tree's
    output on every training row (the rows are partitioned during growth).
    """
    codes = binned.codes
    stride = binned.stride
    n, d = codes.shape
    row_value = np.zeros(n)
    builder = _TreeBuilder()
    root = builder.add()
    stack = [(root, np.arange(n, dtype=np.int64), 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        g = float(grad[node_rows].sum())
        h = float(hess[node_rows].sum())
        builder.value[node] = -g / (h + lam)
        if depth >= max_depth or node_rows.size < 2:
            row_value[node_rows] = builder.value[node]
            continue
        sub = codes[node_rows]
        counts, (gs, hs) = _node_histograms(sub, stride, [grad[node_rows], hess[node_rows]])
        cl = np.cumsum(counts, axis=1)[:, :-1]
        gl = np.cumsum(gs, axis=1)[:, :-1]
        hl = np.cumsum(hs, axis=1)[:, :-1]
        if cl.size == 0:
            row_value[node_rows] = builder.value[node]
            continue
        cr = node_rows.size - cl
        gr = g - gl
        hr = h - hl
        valid = (cl > 0) & (cr > 0)
        gain = 0.5 * (gl**2 / (hl + lam) + gr**2 / (hr + lam) - g**2 / (h + lam)) - gamma
        gain = np.where(valid, gain, -np.inf)
        for f in range(d):
            gain[f, binned.n_bins[f] - 1 :] = -np.inf
        best_flat = int(np.argmax(gain))
        f, b = divmod(best_flat, stride - 1)
        if not np.isfinite(gain[f, b]) or gain[f, b] <= 0.0:
            row_value[node_rows] = builder.value[node]
            continue
        go_left = sub[:, f] <= b
        left_rows = node_rows[go_left]
        right_rows = node_rows[~go_left]
        lnode = builder.add()
        rnode = builder.add()
        builder.feature[node] = int(f)
        builder.cut[node] = float(binned.cuts[f][b])
        builder.left[node] = lnode
        builder.right[node] = rnode
        stack.append((rnode, right_rows, depth + 1))
        stack.append((lnode, left_rows, depth + 1))
    return builder.finish(), row_value
