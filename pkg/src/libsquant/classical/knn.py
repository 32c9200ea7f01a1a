"""k-nearest-neighbor regression with uniform or inverse-distance weights."""

from dataclasses import dataclass

import numpy as np

WEIGHTINGS = ("uniform", "inverse-distance")


def predict_knn(X_train, y_train, x_query, k, weighting="uniform"):
    """Predict one query from its k nearest training rows (Euclidean).

    Distance ties are broken by training index. Uniform weighting averages
    the neighbor targets; inverse-distance weights each by 1/(d + 1e-12),
    except that a zero-distance neighbor short-circuits to its own target.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    n = len(y_train)
    if n == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    d = np.sqrt(np.sum((X_train - np.asarray(x_query, dtype=np.float64)) ** 2, axis=1))
    neighbors = np.argsort(d, kind="stable")[:k]
    if weighting == "uniform":
        return float(np.mean(y_train[neighbors]))
    nd = d[neighbors]
    if nd[0] == 0.0:
        # stable sort puts the lowest-index exact match first
        return float(y_train[neighbors[0]])
    w = 1.0 / (nd + 1e-12)
    return float(np.sum(w * y_train[neighbors]) / np.sum(w))


@dataclass
class KnnModel:
    """Memorized training set plus the neighbor rule, for the benchmark."""

    X: np.ndarray
    y: np.ndarray
    k: int
    weighting: str = "inverse-distance"

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([predict_knn(self.X, self.y, row, self.k, self.weighting)
                         for row in X])

    def to_dict(self):
        return {"X": self.X.tolist(), "y": self.y.tolist(),
                "k": self.k, "weighting": self.weighting}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["X"], dtype=np.float64),
                   np.array(d["y"], dtype=np.float64),
                   int(d["k"]), d["weighting"])
