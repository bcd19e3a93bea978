"""Random-forest baseline: CART trees with Gini splits and bagging.

Kept deliberately close to the conventional defaults the comparison uses:
midpoint thresholds between consecutive sorted unique values, sqrt(d)
features drawn per split, majority-class leaves, bootstrap samples of the
training-set size. Class ties anywhere resolve by canonical class order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .imu import canonical_class_order


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 10
    min_split: int = 2
    min_leaf: int = 1
    features_per_split: int | None = None   # None: max(1, floor(sqrt(d)))
    bootstrap: bool = True                  # test hook
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValidationError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValidationError("max_depth must be >= 1")
        if self.min_split < 2:
            raise ValidationError("min_split must be >= 2")
        if self.min_leaf < 1:
            raise ValidationError("min_leaf must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValidationError("features_per_split must be >= 1")

    def split_features(self, d: int) -> int:
        if self.features_per_split is not None:
            return min(self.features_per_split, d)
        return max(1, int(np.sqrt(d)))


def gini_impurity(counts) -> float:
    """1 - sum((c_i / n)^2) over per-class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ValidationError("counts must be non-negative")
    n = counts.sum()
    if n == 0:
        raise ValidationError("all-zero counts")
    p = counts / n
    return float(1.0 - (p * p).sum())


@dataclass
class TreeNode:
    """Internal split node or leaf; leaves carry ``label``."""
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: str | None = None


def _majority(class_counts, classes) -> str:
    # argmax returns the lowest index on ties, i.e. canonical order
    return classes[int(np.argmax(class_counts))]


def _best_split(X, yi, n_classes, feat_ids, min_leaf):
    """Best (feature, midpoint threshold, gini decrease), or None.

    Scans every valid midpoint of each candidate feature with prefix
    class counts; only strictly positive decreases qualify. Ties keep the
    first candidate feature and the lowest threshold.
    """
    n = len(yi)
    parent = np.bincount(yi, minlength=n_classes).astype(np.float64)
    g_parent = 1.0 - ((parent / n) ** 2).sum()
    best = None
    best_dec = 0.0
    for f in feat_ids:
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        ys = yi[order]
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if len(cut) == 0:
            continue
        left_n = cut + 1
        keep = (left_n >= min_leaf) & (n - left_n >= min_leaf)
        cut = cut[keep]
        if len(cut) == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), ys] = 1.0
        prefix = np.cumsum(onehot, axis=0)
        lc = prefix[cut]
        rc = parent - lc
        nl = (cut + 1).astype(np.float64)
        nr = n - nl
        gl = 1.0 - ((lc / nl[:, None]) ** 2).sum(axis=1)
        gr = 1.0 - ((rc / nr[:, None]) ** 2).sum(axis=1)
        dec = g_parent - (nl * gl + nr * gr) / n
        j = int(np.argmax(dec))
        if dec[j] > best_dec:
            best_dec = float(dec[j])
            thr = 0.5 * (xs[cut[j]] + xs[cut[j] + 1])
            best = (int(f), float(thr), best_dec)
    return best


def tree_train(rows, labels, cfg: ForestConfig, rng,
               classes=None) -> TreeNode:
    """Grow one CART tree.

    ``classes`` fixes the class order shared across a forest; by default
    it is the canonical order of the labels present.
    """
    X = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    labels = list(labels)
    if X.shape[0] == 0 or not labels:
        raise ValidationError("empty input")
    if X.shape[0] != len(labels):
        raise ValidationError("one label per row required")
    if classes is None:
        classes = canonical_class_order(labels)
    index = {c: i for i, c in enumerate(classes)}
    try:
        yi = np.array([index[c] for c in labels], dtype=np.int64)
    except KeyError as e:
        raise ValidationError(f"label {e} not in the class list") from None
    k = cfg.split_features(X.shape[1])

    def grow(idx, depth):
        counts = np.bincount(yi[idx], minlength=len(classes))
        if (depth >= cfg.max_depth or len(idx) < cfg.min_split
                or np.count_nonzero(counts) <= 1):
            return TreeNode(label=_majority(counts, classes))
        feat_ids = rng.choice(X.shape[1], size=k, replace=False)
        split = _best_split(X[idx], yi[idx], len(classes), feat_ids,
                            cfg.min_leaf)
        if split is None:
            return TreeNode(label=_majority(counts, classes))
        f, thr, _ = split
        mask = X[idx, f] <= thr
        return TreeNode(feature=f, threshold=thr,
                        left=grow(idx[mask], depth + 1),
                        right=grow(idx[~mask], depth + 1))

    return grow(np.arange(X.shape[0]), 0)


def tree_predict(node: TreeNode, X) -> list[str]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = [None] * X.shape[0]

    def walk(n, idx):
        if n.label is not None:
            for i in idx:
                out[i] = n.label
            return
        mask = X[idx, n.feature] <= n.threshold
        walk(n.left, idx[mask])
        walk(n.right, idx[~mask])

    walk(node, np.arange(X.shape[0]))
    return out


def forest_train_predict(train, test_rows, cfg: ForestConfig) -> list[str]:
    """Train a bagged forest on a LabeledDataset and predict test rows.

    Each tree gets its own seeded stream (bootstrap draw first, then
    split-feature draws), so results do not depend on scheduling. The
    vote ties by canonical class order via lowest index.
    """
    X = train.X
    if X.shape[0] == 0:
        raise ValidationError("empty train")
    test = np.atleast_2d(np.asarray(test_rows, dtype=np.float64))
    if test.shape[1] != X.shape[1]:
        raise ValidationError("test rows have the wrong width")
    classes = train.classes
    index = {c: i for i, c in enumerate(classes)}
    labels = np.asarray(train.labels)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)
    votes = np.zeros((test.shape[0], len(classes)), dtype=np.int64)
    for child in children:
        rng = np.random.default_rng(child)
        if cfg.bootstrap:
            idx = rng.integers(0, X.shape[0], size=X.shape[0])
        else:
            idx = np.arange(X.shape[0])
        tree = tree_train(X[idx], list(labels[idx]), cfg, rng,
                          classes=classes)
        for i, lab in enumerate(tree_predict(tree, test)):
            votes[i, index[lab]] += 1
    return [classes[int(np.argmax(v))] for v in votes]
