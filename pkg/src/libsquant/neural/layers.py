"""Layers with hand-written forward and backward passes.

Every layer is batch-first: sequences are (batch, time, features) and flat
inputs are (batch, features). forward() caches whatever backward() needs;
backward() consumes the upstream gradient, fills self.grads (same keys as
self.params) and returns the gradient w.r.t. the layer input. Gradients
are exact reverse-mode derivatives of whatever loss the caller chains on,
including through time for the recurrent cells and through the max-pool
(which routes its gradient to the argmax).
"""

import numpy as np

from ..numerics import apply_activation, activation_derivative


class Layer:
    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x):
        raise NotImplementedError

    def backward(self, d_out):
        raise NotImplementedError


class Dense(Layer):
    """Affine map y = x @ W.T + b with W of shape (out, in)."""

    def __init__(self, weight, bias):
        super().__init__()
        self.params = {"weight": np.asarray(weight, dtype=np.float64),
                       "bias": np.asarray(bias, dtype=np.float64)}
        self._x = None

    def forward(self, x):
        self._x = x
        return x @ self.params["weight"].T + self.params["bias"]

    def backward(self, d_out):
        self.grads["weight"] = d_out.T @ self._x
        self.grads["bias"] = d_out.sum(axis=0)
        return d_out @ self.params["weight"]


class ActivationLayer(Layer):
    """Elementwise nonlinearity on the pre-activation it cached."""

    def __init__(self, kind):
        super().__init__()
        self.kind = kind
        self._x = None

    def forward(self, x):
        self._x = x
        return apply_activation(self.kind, x)

    def backward(self, d_out):
        return d_out * activation_derivative(self.kind, self._x)


class SimpleRnn(Layer):
    """Plain recurrent cell s_t = f(U x_t + W s_{t-1} + b).

    The bias starts at zero; set trainable_bias=False to pin it there and
    keep the exact bias-free recurrence.
    """

    def __init__(self, U, W, bias, activation="tangent-sigmoid", trainable_bias=True):
        super().__init__()
        self.params = {"U": np.asarray(U, dtype=np.float64),
                       "W": np.asarray(W, dtype=np.float64)}
        self.bias = np.asarray(bias, dtype=np.float64)
        self.trainable_bias = trainable_bias
        if trainable_bias:
            self.params["bias"] = self.bias
        self.activation = activation
        self._cache = None

    def forward(self, x, s0=None):
        B, T, _ = x.shape
        H = self.params["W"].shape[0]
        s = np.zeros((B, H)) if s0 is None else s0
        pres, states = [], [s]
        for t in range(T):
            pre = x[:, t, :] @ self.params["U"].T + s @ self.params["W"].T + self.bias
            s = apply_activation(self.activation, pre)
            pres.append(pre)
            states.append(s)
        self._cache = (x, pres, states)
        return np.stack(states[1:], axis=1)  # (B, T, H)

    def backward(self, d_states):
        x, pres, states = self._cache
        B, T, _ = x.shape
        U, W = self.params["U"], self.params["W"]
        dU = np.zeros_like(U)
        dW = np.zeros_like(W)
        db = np.zeros_like(self.bias)
        dx = np.zeros_like(x)
        ds_next = np.zeros((B, W.shape[0]))
        for t in range(T - 1, -1, -1):
            ds = d_states[:, t, :] + ds_next
            dpre = ds * activation_derivative(self.activation, pres[t])
            dU += dpre.T @ x[:, t, :]
            dW += dpre.T @ states[t]
            db += dpre.sum(axis=0)
            dx[:, t, :] = dpre @ U
            ds_next = dpre @ W
        self.grads = {"U": dU, "W": dW}
        if self.trainable_bias:
            self.grads["bias"] = db
        return dx


def _sigmoid(x):
    return apply_activation("log-sigmoid", x)


class Lstm(Layer):
    """LSTM cell with forget/input/output gates and a tanh candidate.

    Each weight block acts on the concatenation [h_{t-1}, x_t], so all four
    share the shape (hidden, hidden + input).
    """

    def __init__(self, w_f, w_i, w_c, w_o, b_f, b_i, b_c, b_o):
        super().__init__()
        self.params = {
            "w_f": np.asarray(w_f, dtype=np.float64),
            "w_i": np.asarray(w_i, dtype=np.float64),
            "w_c": np.asarray(w_c, dtype=np.float64),
            "w_o": np.asarray(w_o, dtype=np.float64),
            "b_f": np.asarray(b_f, dtype=np.float64),
            "b_i": np.asarray(b_i, dtype=np.float64),
            "b_c": np.asarray(b_c, dtype=np.float64),
            "b_o": np.asarray(b_o, dtype=np.float64),
        }
        self._cache = None

    @property
    def hidden_size(self):
        return self.params["w_f"].shape[0]

    def forward(self, x, h0=None, c0=None):
        B, T, _ = x.shape
        H = self.hidden_size
        p = self.params
        h = np.zeros((B, H)) if h0 is None else h0
        c = np.zeros((B, H)) if c0 is None else c0
        steps = []
        hs = []
        for t in range(T):
            z = np.concatenate([h, x[:, t, :]], axis=1)
            f = _sigmoid(z @ p["w_f"].T + p["b_f"])
            i = _sigmoid(z @ p["w_i"].T + p["b_i"])
            cand = np.tanh(z @ p["w_c"].T + p["b_c"])
            o = _sigmoid(z @ p["w_o"].T + p["b_o"])
            c_new = f * c + i * cand
            tc = np.tanh(c_new)
            h = o * tc
            steps.append((z, f, i, cand, o, c, c_new, tc))
            c = c_new
            hs.append(h)
        self._cache = (x, steps)
        return np.stack(hs, axis=1)

    def backward(self, d_states):
        x, steps = self._cache
        B, T, D = x.shape
        H = self.hidden_size
        p = self.params
        g = {k: np.zeros_like(v) for k, v in p.items()}
        dx = np.zeros_like(x)
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            z, f, i, cand, o, c_prev, c_new, tc = steps[t]
            dh = d_states[:, t, :] + dh_next
            do = dh * tc
            dc = dh * o * (1.0 - tc * tc) + dc_next
            df = dc * c_prev
            di = dc * cand
            dcand = dc * i
            dc_next = dc * f
            dzf = df * f * (1.0 - f)
            dzi = di * i * (1.0 - i)
            dzc = dcand * (1.0 - cand * cand)
            dzo = do * o * (1.0 - o)
            g["w_f"] += dzf.T @ z
            g["w_i"] += dzi.T @ z
            g["w_c"] += dzc.T @ z
            g["w_o"] += dzo.T @ z
            g["b_f"] += dzf.sum(axis=0)
            g["b_i"] += dzi.sum(axis=0)
            g["b_c"] += dzc.sum(axis=0)
            g["b_o"] += dzo.sum(axis=0)
            dz = dzf @ p["w_f"] + dzi @ p["w_i"] + dzc @ p["w_c"] + dzo @ p["w_o"]
            dh_next = dz[:, :H]
            dx[:, t, :] = dz[:, H:]
        self.grads = g
        return dx


class Gru(Layer):
    """GRU cell: reset and update gates, candidate gated by the reset gate,
    new state h_t = (1 - z_t) * h_{t-1} + z_t * h_tilde."""

    def __init__(self, w_r, w_z, w_h, b_r, b_z, b_h):
        super().__init__()
        self.params = {
            "w_r": np.asarray(w_r, dtype=np.float64),
            "w_z": np.asarray(w_z, dtype=np.float64),
            "w_h": np.asarray(w_h, dtype=np.float64),
            "b_r": np.asarray(b_r, dtype=np.float64),
            "b_z": np.asarray(b_z, dtype=np.float64),
            "b_h": np.asarray(b_h, dtype=np.float64),
        }
        self._cache = None

    @property
    def hidden_size(self):
        return self.params["w_r"].shape[0]

    def forward(self, x, h0=None):
        B, T, _ = x.shape
        H = self.hidden_size
        p = self.params
        h = np.zeros((B, H)) if h0 is None else h0
        steps = []
        hs = []
        for t in range(T):
            zcat = np.concatenate([h, x[:, t, :]], axis=1)
            r = _sigmoid(zcat @ p["w_r"].T + p["b_r"])
            z = _sigmoid(zcat @ p["w_z"].T + p["b_z"])
            ccat = np.concatenate([r * h, x[:, t, :]], axis=1)
            cand = np.tanh(ccat @ p["w_h"].T + p["b_h"])
            h_new = (1.0 - z) * h + z * cand
            steps.append((zcat, ccat, r, z, cand, h))
            h = h_new
            hs.append(h)
        self._cache = (x, steps)
        return np.stack(hs, axis=1)

    def backward(self, d_states):
        x, steps = self._cache
        B, T, D = x.shape
        H = self.hidden_size
        p = self.params
        g = {k: np.zeros_like(v) for k, v in p.items()}
        dx = np.zeros_like(x)
        dh_next = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            zcat, ccat, r, z, cand, h_prev = steps[t]
            dh = d_states[:, t, :] + dh_next
            dz_gate = dh * (cand - h_prev)
            dcand = dh * z
            dh_prev = dh * (1.0 - z)
            da_h = dcand * (1.0 - cand * cand)
            g["w_h"] += da_h.T @ ccat
            g["b_h"] += da_h.sum(axis=0)
            dccat = da_h @ p["w_h"]
            drh = dccat[:, :H]
            dx_t = dccat[:, H:]
            dr = drh * h_prev
            dh_prev = dh_prev + drh * r
            da_r = dr * r * (1.0 - r)
            da_z = dz_gate * z * (1.0 - z)
            g["w_r"] += da_r.T @ zcat
            g["b_r"] += da_r.sum(axis=0)
            g["w_z"] += da_z.T @ zcat
            g["b_z"] += da_z.sum(axis=0)
            dzcat = da_r @ p["w_r"] + da_z @ p["w_z"]
            dh_prev = dh_prev + dzcat[:, :H]
            dx_t = dx_t + dzcat[:, H:]
            dx[:, t, :] = dx_t
            dh_next = dh_prev
        self.grads = g
        return dx


class Conv1d(Layer):
    """Temporal convolution shared across feature channels, then max-pool.

    Each of the F kernels is a width-k vector slid along the time axis and
    applied identically to every input channel, so an input (B, T, D) maps
    to (B, T-k+1, F, D), is passed through the activation, max-pooled over
    non-overlapping windows of pool_width (a short final window is kept),
    and flattened filter-major to (B, T_out, F*D). With a single [1] kernel,
    zero bias, and pool width 1 the layer reduces to the bare activation.
    """

    def __init__(self, kernels, bias, pool_width, activation="relu"):
        super().__init__()
        kernels = np.asarray(kernels, dtype=np.float64)
        if kernels.ndim != 2:
            raise ValueError("kernels must be (n_filters, kernel_width)")
        if pool_width < 1:
            raise ValueError("pool_width must be >= 1")
        self.params = {"kernels": kernels,
                       "bias": np.asarray(bias, dtype=np.float64)}
        self.pool_width = int(pool_width)
        self.activation = activation
        self._cache = None

    @property
    def n_filters(self):
        return self.params["kernels"].shape[0]

    @property
    def kernel_width(self):
        return self.params["kernels"].shape[1]

    def output_steps(self, T):
        conv_len = T - self.kernel_width + 1
        if conv_len < 1:
            raise ValueError(
                f"sequence length {T} is shorter than kernel width {self.kernel_width}")
        return int(np.ceil(conv_len / self.pool_width))

    def forward(self, x):
        B, T, D = x.shape
        k = self.kernel_width
        F = self.n_filters
        conv_len = T - k + 1
        if conv_len < 1:
            raise ValueError(
                f"sequence length {T} is shorter than kernel width {k}")
        kernels = self.params["kernels"]
        pre = np.zeros((B, conv_len, F, D))
        for kk in range(k):
            pre += kernels[:, kk][None, None, :, None] * x[:, kk:kk + conv_len, None, :]
        pre += self.params["bias"][None, None, :, None]
        act = apply_activation(self.activation, pre)

        p = self.pool_width
        n_windows = int(np.ceil(conv_len / p))
        pooled = np.empty((B, n_windows, F, D))
        argmaxes = []
        for j in range(n_windows):
            lo, hi = j * p, min((j + 1) * p, conv_len)
            window = act[:, lo:hi, :, :]
            idx = np.argmax(window, axis=1)
            pooled[:, j, :, :] = np.take_along_axis(window, idx[:, None, :, :], axis=1)[:, 0, :, :]
            argmaxes.append(lo + idx)
        self._cache = (x, pre, conv_len, argmaxes)
        return pooled.reshape(B, n_windows, F * D)

    def backward(self, d_out):
        x, pre, conv_len, argmaxes = self._cache
        B, T, D = x.shape
        k = self.kernel_width
        F = self.n_filters
        d_out = d_out.reshape(B, len(argmaxes), F, D)

        d_act = np.zeros((B, conv_len, F, D))
        for j, idx in enumerate(argmaxes):
            np.put_along_axis(
                d_act, idx[:, None, :, :], d_out[:, j:j + 1, :, :], axis=1)
        d_pre = d_act * activation_derivative(self.activation, pre)

        kernels = self.params["kernels"]
        d_kernels = np.zeros_like(kernels)
        d_x = np.zeros_like(x)
        for kk in range(k):
            x_slice = x[:, kk:kk + conv_len, None, :]
            d_kernels[:, kk] = (d_pre * x_slice).sum(axis=(0, 1, 3))
            d_x[:, kk:kk + conv_len, :] += (d_pre * kernels[:, kk][None, None, :, None]).sum(axis=2)
        self.grads = {"kernels": d_kernels,
                      "bias": d_pre.sum(axis=(0, 1, 3))}
        return d_x
