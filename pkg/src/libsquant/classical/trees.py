"""CART regression trees and the two ensembles built on them.

Splits are found by exhaustive search over (feature, midpoint threshold)
pairs, minimizing the summed child squared error; exact ties go to the
lowest feature index and then the lowest threshold. A node becomes a leaf
when the depth or size limit fires, the targets have zero variance, or no
split improves on the node's own squared error.
"""

from dataclasses import dataclass

import numpy as np

from ..numerics import make_rng


@dataclass
class TreeNode:
    """Either a leaf (value set) or an internal split (both children set)."""

    value: float | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self):
        return self.value is not None

    def predict_one(self, x):
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([self.predict_one(row) for row in X])

    def depth(self):
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def to_dict(self):
        if self.is_leaf:
            return {"value": self.value}
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, d):
        if "value" in d:
            return cls(value=float(d["value"]))
        return cls(feature=int(d["feature"]), threshold=float(d["threshold"]),
                   left=cls.from_dict(d["left"]), right=cls.from_dict(d["right"]))


def _node_sse(y):
    return float(np.sum((y - y.mean()) ** 2))


def _best_split(X, y, features, min_leaf):
    """Exhaustive (feature, midpoint) search; returns (sse, feature, threshold)
    or None when no admissible split exists.

    Child SSEs are computed directly on the original-order partition (not
    via running sums), so two candidates that induce the same partition
    score exactly equal and the tie resolves to the lowest feature index,
    then the lowest threshold.
    """
    n = len(y)
    best = None
    for f in features:
        xs = X[:, f]
        xs_sorted = np.sort(xs)
        for cut in range(min_leaf - 1, n - min_leaf):
            if xs_sorted[cut] == xs_sorted[cut + 1]:
                continue
            thr = 0.5 * (xs_sorted[cut] + xs_sorted[cut + 1])
            mask = xs <= thr
            yl = y[mask]
            yr = y[~mask]
            sse = (float(np.sum((yl - yl.mean()) ** 2))
                   + float(np.sum((yr - yr.mean()) ** 2)))
            if best is None or sse < best[0]:
                best = (sse, f, thr)
    return best


def fit_tree(X, y, max_depth=None, min_leaf=1, rng=None, features_per_split=None):
    """Greedy CART regression tree.

    features_per_split trims the candidate features at every node to a
    random subset of that size (drawn from rng), which is what the forest
    uses; with the default every feature competes at every node.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, p) with matching y")
    if len(y) < min_leaf:
        raise ValueError(f"need at least min_leaf={min_leaf} rows")
    p = X.shape[1]

    def build(idx, depth):
        ys = y[idx]
        leaf_value = float(ys.mean())
        if (max_depth is not None and depth >= max_depth) or len(idx) < 2 * min_leaf:
            return TreeNode(value=leaf_value)
        parent_sse = _node_sse(ys)
        if parent_sse == 0.0:
            return TreeNode(value=leaf_value)
        if features_per_split is not None and features_per_split < p:
            feats = np.sort(rng.choice(p, size=features_per_split, replace=False))
        else:
            feats = range(p)
        best = _best_split(X[idx], ys, feats, min_leaf)
        if best is None or best[0] >= parent_sse:
            return TreeNode(value=leaf_value)
        _, f, thr = best
        mask = X[idx, f] <= thr
        return TreeNode(feature=int(f), threshold=float(thr),
                        left=build(idx[mask], depth + 1),
                        right=build(idx[~mask], depth + 1))

    return build(np.arange(len(y)), 0)


@dataclass
class ForestModel:
    """Bagged trees; the prediction is the plain mean over trees."""

    trees: list

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def to_dict(self):
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        return cls([TreeNode.from_dict(t) for t in d["trees"]])


def fit_forest(X, y, n_trees=50, max_depth=None, min_leaf=1, seed=0,
               bootstrap=True, feature_subset=True):
    """Random forest: each tree sees a bootstrap resample (size n, with
    replacement) and draws ceil(sqrt(p)) candidate features per split.

    Per-tree generators are spawned from the seed, so fitting the trees in
    any order (or in parallel) gives the same forest.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n, p = X.shape
    m = int(np.ceil(np.sqrt(p))) if feature_subset else None
    trees = []
    for ss in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.Generator(np.random.PCG64(ss))
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(fit_tree(X[idx], y[idx], max_depth=max_depth,
                              min_leaf=min_leaf, rng=rng, features_per_split=m))
    return ForestModel(trees)


@dataclass
class GbrModel:
    """Stagewise boosted trees on residuals: init + rate * sum(stages)."""

    init: float
    learning_rate: float
    trees: list

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        pred = np.full(len(X), self.init)
        for t in self.trees:
            pred += self.learning_rate * t.predict(X)
        return pred

    def to_dict(self):
        return {"init": self.init, "learning_rate": self.learning_rate,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["init"]), float(d["learning_rate"]),
                   [TreeNode.from_dict(t) for t in d["trees"]])


def fit_gbr(X, y, n_stages=100, learning_rate=0.1, max_depth=3, min_leaf=1):
    """Gradient boosting for squared loss: start from the target mean, then
    fit each stage's tree to the current residuals."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if n_stages < 1:
        raise ValueError("n_stages must be >= 1")
    if not 0 < learning_rate <= 1:
        raise ValueError("learning_rate must be in (0, 1]")
    init = float(y.mean())
    pred = np.full(len(y), init)
    trees = []
    for _ in range(n_stages):
        tree = fit_tree(X, y - pred, max_depth=max_depth, min_leaf=min_leaf)
        pred += learning_rate * tree.predict(X)
        trees.append(tree)
    return GbrModel(init, learning_rate, trees)
