"""Ordinary least squares and L1-regularized (lasso) regression.

OLS goes through the normal equations with a tiny ridge jitter as a
singularity fallback. The lasso is cyclic coordinate descent with soft
thresholding on the objective (1/2n)||y - Xa - a0||^2 + lam*||a||_1;
the intercept is never penalized.
"""

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    pass


@dataclass
class LinearModel:
    coef: np.ndarray
    intercept: float

    def predict(self, X):
        return np.asarray(X, dtype=np.float64) @ self.coef + self.intercept

    def to_dict(self):
        return {"coef": self.coef.tolist(), "intercept": self.intercept}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["coef"], dtype=np.float64), float(d["intercept"]))


def fit_ols(X, y):
    """Least-squares coefficients plus intercept via the normal equations.

    A rank-deficient Gram matrix (collinear or constant columns; LU would
    silently return garbage) gets a 1e-10 ridge jitter, which settles the
    unidentified directions near the minimum-norm solution.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    A = np.column_stack([np.ones(len(X)), X])
    gram = A.T @ A
    rhs = A.T @ y
    if np.linalg.matrix_rank(gram) < gram.shape[0]:
        gram = gram + 1e-10 * np.eye(len(gram))
    try:
        theta = np.linalg.solve(gram, rhs)
        if not np.all(np.isfinite(theta)):
            raise np.linalg.LinAlgError("non-finite solution")
    except np.linalg.LinAlgError:
        theta = np.linalg.solve(gram + 1e-10 * np.eye(len(gram)), rhs)
    return LinearModel(theta[1:], float(theta[0]))


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _centered(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    return X - x_mean, y - y_mean, x_mean, y_mean


def _cd_sweeps(Xc, resid, coef, lam, tol, max_sweeps, col_sq):
    """Cyclic coordinate descent on centered data, in place.

    Centering removes the intercept from the iteration entirely (it is
    recovered afterwards as y_mean - x_mean . coef), which is what keeps
    the sweeps from crawling when feature blocks are collinear with the
    intercept. Returns True when the largest coefficient change in a full
    sweep drops below tol.
    """
    n, p = Xc.shape
    for _ in range(max_sweeps):
        max_delta = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            rho = (Xc[:, j] @ resid) / n + col_sq[j] * coef[j]
            new = soft_threshold(rho, lam) / col_sq[j]
            delta = new - coef[j]
            if delta != 0.0:
                resid -= delta * Xc[:, j]
                coef[j] = new
                max_delta = max(max_delta, abs(delta))
        if max_delta < tol:
            return True
    return False


def fit_lasso(X, y, lam, tol=1e-8, max_sweeps=100_000):
    """Cyclic coordinate descent with soft thresholding; converged when no
    coefficient moves by more than tol in a full sweep."""
    if lam < 0:
        raise ValueError("lam must be non-negative")
    Xc, yc, x_mean, y_mean = _centered(X, y)
    n, p = Xc.shape
    col_sq = np.array([Xc[:, j] @ Xc[:, j] for j in range(p)]) / n
    coef = np.zeros(p)
    resid = yc.copy()
    if not _cd_sweeps(Xc, resid, coef, lam, tol, max_sweeps, col_sq):
        raise ConvergenceError(
            f"lasso did not converge in {max_sweeps} sweeps (lam={lam})")
    return LinearModel(coef, y_mean - float(x_mean @ coef))


def lambda_max(X, y):
    """Smallest penalty at which every lasso coefficient is exactly zero.

    Computed with the same centered per-column dot products coordinate
    descent uses, so the all-zero solution is exact (not just tiny) at
    this value.
    """
    Xc, yc, _, _ = _centered(X, y)
    n = len(yc)
    return max(abs(Xc[:, j] @ yc) / n for j in range(Xc.shape[1]))


def default_lambda_grid(X, y, n_points=50, min_ratio=1e-2):
    """Log-spaced grid from lambda_max down to lambda_max * min_ratio.

    The floor stays two decades below the top: far smaller penalties on a
    design with collinear blocks (element one-hots plus intercept) sit in
    a degenerate regime where solutions are non-unique and sweeps crawl.
    """
    top = lambda_max(X, y)
    if top <= 0:
        top = 1.0
    return np.geomspace(top, top * min_ratio, n_points)


@dataclass
class LassoPath:
    """Coefficients along a descending penalty grid (one row per lambda)."""

    lambdas: np.ndarray     # (L,), descending
    coefs: np.ndarray       # (L, p)
    intercepts: np.ndarray  # (L,)
    feature_names: tuple
    failures: tuple = ()    # lambdas whose solve hit the sweep cap

    def n_active(self):
        return (self.coefs != 0.0).sum(axis=1)


def lasso_path(X, y, lambdas, feature_names=None, tol=1e-8):
    """Fit the lasso along a grid, warm-starting each solve from the last.

    The grid is sorted descending so the first (largest) solve starts from
    the all-zero vector. A per-lambda convergence failure keeps its best
    estimate in the path and is listed in .failures instead of raising, so
    one stubborn penalty cannot sink the rest of the grid.
    """
    Xc, yc, x_mean, y_mean = _centered(X, y)
    lambdas = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
    n, p = Xc.shape
    if feature_names is None:
        feature_names = tuple(f"x{j}" for j in range(p))
    coefs = np.zeros((len(lambdas), p))
    intercepts = np.zeros(len(lambdas))
    col_sq = np.array([Xc[:, j] @ Xc[:, j] for j in range(p)]) / n
    coef = np.zeros(p)
    resid = yc.copy()
    failures = []
    for li, lam in enumerate(lambdas):
        if not _cd_sweeps(Xc, resid, coef, lam, tol, 100_000, col_sq):
            failures.append(float(lam))
        coefs[li] = coef
        intercepts[li] = y_mean - float(x_mean @ coef)
    return LassoPath(lambdas, coefs, intercepts, tuple(feature_names),
                     tuple(failures))
