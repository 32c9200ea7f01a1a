"""Epsilon-insensitive support vector regression solved in the dual.

The solver works on beta_n = alpha_n - alpha_n^* (so the complementarity
alpha_n * alpha_n^* = 0 holds by construction) and maximizes

    W(beta) = -1/2 beta' K beta + y' beta - eps * ||beta||_1

subject to sum(beta) = 0 and |beta_n| <= C. Pairs of coordinates are
updated jointly: moving (beta_i, beta_j) by (+d, -d) preserves the sum
constraint, and the one-dimensional piecewise-quadratic gain in d is
maximized exactly by enumerating segment stationary points, the sign
breakpoints, and the box ends. Termination is by the worst KKT violation,
measured as the gap left when no bias value can satisfy every sample's
optimality interval.
"""

from dataclasses import dataclass

import numpy as np

from .linear import ConvergenceError

BOUND_TOL = 1e-12


def kernel_matrix(kind, A, B, gamma=None, degree=3, coef0=1.0):
    """Gram matrix K[i, j] = k(A_i, B_j) for the supported kernels."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        if gamma is None:
            gamma = 1.0 / A.shape[1]
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kind == "polynomial":
        return (A @ B.T + coef0) ** degree
    raise ValueError(f"unknown kernel {kind!r}")


@dataclass
class SvrModel:
    kernel: str
    C: float
    epsilon: float
    gamma: float | None
    degree: int
    coef0: float
    support_vectors: np.ndarray
    dual_coef: np.ndarray        # beta at the support vectors
    intercept: float

    @property
    def alpha(self):
        return np.maximum(self.dual_coef, 0.0)

    @property
    def alpha_star(self):
        return np.maximum(-self.dual_coef, 0.0)

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if len(self.dual_coef) == 0:
            return np.full(len(X), self.intercept)
        K = kernel_matrix(self.kernel, X, self.support_vectors,
                          self.gamma, self.degree, self.coef0)
        return K @ self.dual_coef + self.intercept

    def to_dict(self):
        return {
            "kernel": self.kernel, "C": self.C, "epsilon": self.epsilon,
            "gamma": self.gamma, "degree": self.degree, "coef0": self.coef0,
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "intercept": self.intercept,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["kernel"], float(d["C"]), float(d["epsilon"]),
                   d["gamma"], int(d["degree"]), float(d["coef0"]),
                   np.array(d["support_vectors"], dtype=np.float64).reshape(
                       len(d["support_vectors"]), -1),
                   np.array(d["dual_coef"], dtype=np.float64),
                   float(d["intercept"]))


def dual_objective(K, y, epsilon, beta):
    return float(-0.5 * beta @ K @ beta + y @ beta - epsilon * np.abs(beta).sum())


def _bias_intervals(beta, F, C, epsilon):
    """Per-sample intervals of bias values that satisfy that sample's
    optimality condition, given where beta_n sits (zero, interior, bound)."""
    bound_tol = BOUND_TOL * max(C, 1.0)
    lo = np.where(beta > BOUND_TOL, F - epsilon, -np.inf)
    hi = np.where(beta > BOUND_TOL, F - epsilon, np.inf)
    # at the upper bound only b <= F - eps is required
    at_hi = beta >= C - bound_tol
    lo = np.where(at_hi, -np.inf, lo)
    neg = beta < -BOUND_TOL
    lo = np.where(neg, F + epsilon, lo)
    hi = np.where(neg, np.where(beta <= -C + bound_tol, np.inf, F + epsilon), hi)
    zero = np.abs(beta) <= BOUND_TOL
    lo = np.where(zero, F - epsilon, lo)
    hi = np.where(zero, F + epsilon, hi)
    return lo, hi


def _bias_and_violations(beta, F, C, epsilon):
    """Bias estimate plus each sample's KKT gap at that bias.

    If some bias satisfies every interval the fit is optimal and all gaps
    are zero; otherwise the midpoint of the conflicting bounds is used and
    the leftover distances are the violations.
    """
    lo, hi = _bias_intervals(beta, F, C, epsilon)
    lo_max = float(np.max(lo))
    hi_min = float(np.min(hi))
    if np.isinf(lo_max) and np.isinf(hi_min):
        bias = 0.0
    elif np.isinf(lo_max):
        bias = hi_min
    elif np.isinf(hi_min):
        bias = lo_max
    else:
        bias = 0.5 * (lo_max + hi_min)
    violations = np.maximum(np.maximum(lo - bias, bias - hi), 0.0)
    violations[~np.isfinite(violations)] = 0.0
    return bias, violations


def _best_partner_step(K, beta, grad, i, C, epsilon):
    """For a fixed i, the exact best joint move (beta_i += d, beta_j -= d)
    over every partner j. Returns (j, delta, gain).

    The gain in d is concave piecewise quadratic, so its maximum over the
    admissible range sits at a box end, a sign breakpoint of beta_i + d or
    beta_j - d, or a stationary point of one of the sign segments; all of
    those are enumerated per j in one vectorized sweep.
    """
    n = len(beta)
    bi = beta[i]
    lo = np.maximum(-C - bi, beta - C)
    hi = np.minimum(C - bi, beta + C)
    gdiff = grad[i] - grad
    eta = K[i, i] + np.diag(K) - 2.0 * K[:, i]

    cands = np.empty((6, n))
    cands[0] = lo
    cands[1] = hi
    cands[2] = -bi
    cands[3] = beta
    with np.errstate(divide="ignore", invalid="ignore"):
        base = gdiff / eta
        cands[4] = base - 2.0 * epsilon / eta
        cands[5] = base + 2.0 * epsilon / eta
        mid = np.where(eta > 0.0, base, np.nan)
    cands = np.vstack([cands, mid[None, :]])

    d = cands
    valid = np.isfinite(d) & (d >= lo) & (d <= hi) & (hi > lo)
    gain = (d * gdiff - 0.5 * eta * d * d
            - epsilon * (np.abs(bi + d) - abs(bi))
            - epsilon * (np.abs(beta - d) - np.abs(beta)))
    gain = np.where(valid, gain, -np.inf)
    gain[:, i] = -np.inf
    flat = int(np.argmax(gain))
    ci, j = divmod(flat, n)
    return j, float(d[ci, j]), float(gain[ci, j])


def fit_svr(X, y, C=10.0, epsilon=0.01, kernel="linear", gamma=None, degree=3,
            coef0=1.0, tol=1e-3, max_iter=100_000):
    """Fit epsilon-SVR by exact pairwise dual ascent.

    Each iteration moves the pair led by the worst KKT violator; the run
    stops once the worst violation drops below tol and raises
    ConvergenceError (reporting that violation) if the iteration cap is
    hit first.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if C <= 0:
        raise ValueError("C must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    n = len(y)
    K = kernel_matrix(kernel, X, X, gamma, degree, coef0)
    beta = np.zeros(n)
    Kbeta = np.zeros(n)

    bias, violations = _bias_and_violations(beta, y - Kbeta, C, epsilon)
    for _ in range(max_iter):
        worst = float(violations.max()) if n else 0.0
        if worst <= tol:
            break
        grad = y - Kbeta
        moved = False
        # usually the top violator moves; scan the rest only if it cannot
        for i in np.argsort(-violations, kind="stable"):
            j, delta, gain = _best_partner_step(K, beta, grad, int(i), C, epsilon)
            if gain > 1e-14 and delta != 0.0:
                beta[i] += delta
                beta[j] -= delta
                Kbeta += delta * (K[:, i] - K[:, j])
                moved = True
                break
        if not moved:
            break
        bias, violations = _bias_and_violations(beta, y - Kbeta, C, epsilon)
    worst = float(violations.max()) if n else 0.0
    if worst > tol:
        raise ConvergenceError(
            f"svr did not converge: max KKT violation {worst:.3e} > {tol}")

    support = np.abs(beta) > BOUND_TOL
    return SvrModel(kernel, float(C), float(epsilon),
                    gamma, int(degree), float(coef0),
                    X[support].copy(), beta[support].copy(), float(bias))
