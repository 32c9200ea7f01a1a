"""Shared numeric kernels: activations, seeded randomness, weight init,
and a finite-difference gradient checker.

Everything here works on float64 numpy arrays. The dataset is tiny, so
precision is preferred over speed throughout.
"""

import numpy as np

ACTIVATION_KINDS = ("linear", "log-sigmoid", "tangent-sigmoid", "relu", "softmax")


class ShapeError(ValueError):
    """Operand dimensions do not line up."""


def as_matrix(a):
    """Coerce to a 2-D float64 array (row-major)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got ndim={a.ndim}")
    return a


def matmul(a, b):
    """Matrix product with explicit conformance checking.

    Raises ShapeError on a dimension mismatch and ValueError if the
    product is not finite.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix product produced non-finite entries")
    return out


def _log_sigmoid(x):
    # Split on sign so exp never overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(x):
    shifted = x - np.max(x, axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / np.sum(ex, axis=-1, keepdims=True)


def apply_activation(kind, x):
    """Elementwise activation; softmax is applied per row (rows sum to 1)."""
    x = np.asarray(x, dtype=np.float64)
    if kind == "linear":
        return x.copy()
    if kind == "log-sigmoid":
        return _log_sigmoid(x)
    if kind == "tangent-sigmoid":
        return np.tanh(x)
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "softmax":
        return _softmax(x)
    raise ValueError(f"unknown activation kind: {kind!r}")


def activation_derivative(kind, x):
    """Elementwise derivative of the activation evaluated at pre-activation x.

    Softmax has no elementwise derivative and is rejected; it is kept only
    as a documented forward map and never used in a regression head.
    """
    x = np.asarray(x, dtype=np.float64)
    if kind == "linear":
        return np.ones_like(x)
    if kind == "log-sigmoid":
        s = _log_sigmoid(x)
        return s * (1.0 - s)
    if kind == "tangent-sigmoid":
        t = np.tanh(x)
        return 1.0 - t * t
    if kind == "relu":
        return (x > 0.0).astype(np.float64)
    if kind == "softmax":
        raise ValueError("softmax has no elementwise derivative")
    raise ValueError(f"unknown activation kind: {kind!r}")


def make_rng(seed):
    """Seeded generator with a frozen algorithm (PCG64).

    The same 64-bit seed yields the same stream on every platform, which is
    what makes splits, weight draws, and bootstrap resamples reproducible.
    """
    return np.random.Generator(np.random.PCG64(seed))


def child_rngs(seed, n):
    """n independent generators derived deterministically from one seed."""
    return [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(seed).spawn(n)]


def init_weights(shape, rng, fan_in=None, fan_out=None):
    """Uniform-scaled (Glorot) draw in +/- sqrt(6 / (fan_in + fan_out)).

    For a (rows, cols) weight acting as x @ W.T, fan_out = rows and
    fan_in = cols; both can be overridden for layouts where the shape
    does not tell the whole story (e.g. shared convolution kernels).
    """
    rows, cols = shape
    if rows <= 0 or cols <= 0:
        raise ShapeError(f"weight shape must be positive, got {shape}")
    if fan_out is None:
        fan_out = rows
    if fan_in is None:
        fan_in = cols
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(rows, cols))


def finite_diff_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar function of an array.

    Entry i is (f(x + h e_i) - f(x - h e_i)) / (2 h). Used as the
    independent oracle for every analytic backward pass.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise ValueError(f"function not finite near perturbed entry {i}")
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def relative_gradient_error(analytic, numeric):
    """Norm-based relative disagreement between two gradients."""
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    denom = np.linalg.norm(a) + np.linalg.norm(n)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(a - n) / denom)
