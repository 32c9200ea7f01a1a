"""Architecture descriptions and the assembled networks.

A ModelSpec names one of the seven neural architectures (three recurrent
cells, their three convolution-fronted variants, and an MLP) together with
its hyperparameters. Network turns a spec plus seeded weight draws into a
predictor with exact analytic gradients for every parameter.
"""

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from ..numerics import init_weights, make_rng
from .layers import ActivationLayer, Conv1d, Dense, Gru, Lstm, SimpleRnn

RECURRENT_KINDS = ("simplernn", "lstm", "gru")
CONV_KINDS = tuple("conv-" + k for k in RECURRENT_KINDS)
NEURAL_KINDS = RECURRENT_KINDS + CONV_KINDS + ("mlp",)

MODEL_JSON_FORMAT = "libsquant-model"
MODEL_JSON_VERSION = 1


@dataclass(frozen=True)
class ConvConfig:
    """Convolution front-end: shared temporal kernels plus max-pooling."""

    filters: int = 8
    width: int = 3
    pool: int = 2
    activation: str = "relu"


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 500
    batch_size: int = 4
    seed: int = 42
    momentum: float = 0.0


@dataclass(frozen=True)
class ModelSpec:
    """One architecture plus everything needed to retrain it exactly."""

    kind: str
    hidden_size: int = 16
    conv: ConvConfig | None = None
    activation: str = "tangent-sigmoid"
    rnn_bias: bool = True
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.kind not in NEURAL_KINDS:
            raise ValueError(f"unknown architecture {self.kind!r}; "
                             f"expected one of {NEURAL_KINDS}")
        if self.kind in CONV_KINDS and self.conv is None:
            object.__setattr__(self, "conv", ConvConfig())
        if self.kind not in CONV_KINDS and self.conv is not None:
            raise ValueError(f"{self.kind} does not take a convolution front-end")

    def to_dict(self):
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("conv"):
            d["conv"] = ConvConfig(**d["conv"])
        d["train"] = TrainConfig(**d["train"])
        return cls(**d)


def _gate_weights(rng, hidden, width):
    return init_weights((hidden, width), rng)


class Network:
    """A spec instantiated with concrete parameters.

    Layers own their parameter arrays; the network exposes them under
    prefixed names ("cell.w_f", "head.weight", ...) so training, gradient
    checking, and serialization all see one flat dict.
    """

    def __init__(self, spec, layers, head):
        self.spec = spec
        self.layers = layers          # ordered feature layers (conv, cell, ...)
        self.head = head              # final Dense(hidden -> 1)
        self._named = {}
        for name, layer in list(layers.items()) + [("head", head)]:
            self._named[name] = layer

    # -- construction ------------------------------------------------------

    @classmethod
    def initialize(cls, spec, input_width, rng=None):
        """Draw fresh parameters for a spec; deterministic given the seed."""
        if rng is None:
            rng = make_rng(spec.train.seed)
        H = spec.hidden_size
        layers = {}
        cell_input = input_width
        if spec.kind in CONV_KINDS:
            cc = spec.conv
            kernels = init_weights((cc.filters, cc.width), rng)
            layers["conv"] = Conv1d(kernels, np.zeros(cc.filters), cc.pool, cc.activation)
            cell_input = cc.filters * input_width

        if spec.kind == "mlp":
            w1 = init_weights((H, input_width), rng)
            layers["dense1"] = Dense(w1, np.zeros(H))
            layers["act1"] = ActivationLayer(spec.activation)
        elif spec.kind.endswith("simplernn"):
            U = init_weights((H, cell_input), rng)
            W = init_weights((H, H), rng)
            layers["cell"] = SimpleRnn(U, W, np.zeros(H), spec.activation,
                                       trainable_bias=spec.rnn_bias)
        elif spec.kind.endswith("lstm"):
            width = H + cell_input
            layers["cell"] = Lstm(
                _gate_weights(rng, H, width), _gate_weights(rng, H, width),
                _gate_weights(rng, H, width), _gate_weights(rng, H, width),
                np.zeros(H), np.zeros(H), np.zeros(H), np.zeros(H))
        elif spec.kind.endswith("gru"):
            width = H + cell_input
            layers["cell"] = Gru(
                _gate_weights(rng, H, width), _gate_weights(rng, H, width),
                _gate_weights(rng, H, width),
                np.zeros(H), np.zeros(H), np.zeros(H))
        head = Dense(init_weights((1, H), rng), np.zeros(1))
        return cls(spec, layers, head)

    # -- parameter plumbing ------------------------------------------------

    def parameters(self):
        """Flat name -> array view of every trainable parameter."""
        out = {}
        for lname, layer in self._named.items():
            for pname, arr in layer.params.items():
                out[f"{lname}.{pname}"] = arr
        return out

    def gradients(self):
        out = {}
        for lname, layer in self._named.items():
            for pname in layer.params:
                out[f"{lname}.{pname}"] = layer.grads[pname]
        return out

    def set_parameters(self, values):
        # In-place writes keep layer-held references (e.g. the rnn bias) live.
        for name, arr in values.items():
            lname, pname = name.split(".", 1)
            target = self._named[lname].params[pname]
            target[...] = np.asarray(arr, dtype=np.float64).reshape(target.shape)

    def snapshot(self):
        return {name: arr.copy() for name, arr in self.parameters().items()}

    # -- forward / backward ------------------------------------------------

    def forward(self, X):
        """Predict normalized targets for a batch. Sequence architectures
        take (B, T, D); the MLP takes flat (B, D). Returns shape (B,)."""
        h = X
        if self.spec.kind == "mlp":
            h = self.layers["dense1"].forward(h)
            h = self.layers["act1"].forward(h)
            self._last_hidden_shape = None
        else:
            if "conv" in self.layers:
                h = self.layers["conv"].forward(h)
            states = self.layers["cell"].forward(h)
            self._last_hidden_shape = states.shape
            h = states[:, -1, :]
        return self.head.forward(h)[:, 0]

    def backward(self, d_pred):
        """Push dLoss/dprediction back through the net; returns flat grads."""
        d_h = self.head.backward(d_pred[:, None])
        if self.spec.kind == "mlp":
            d_h = self.layers["act1"].backward(d_h)
            self.layers["dense1"].backward(d_h)
        else:
            B, T, H = self._last_hidden_shape
            d_states = np.zeros((B, T, H))
            d_states[:, -1, :] = d_h
            d_seq = self.layers["cell"].backward(d_states)
            if "conv" in self.layers:
                self.layers["conv"].backward(d_seq)
        return self.gradients()


def forward_mlp(x, layers):
    """Chain an arbitrary stack of Dense/Activation layers over flat input."""
    h = x
    for layer in layers:
        h = layer.forward(h)
    return h


def mse_loss_and_gradients(net, X, y):
    """Mean-squared loss over a batch and its exact parameter gradients."""
    pred = net.forward(X)
    resid = pred - y
    loss = float(np.mean(resid * resid))
    grads = net.backward(2.0 * resid / len(y))
    return loss, grads


# -- serialization ----------------------------------------------------------

def network_to_dict(net):
    return {
        "spec": net.spec.to_dict(),
        "params": {name: {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}
                   for name, arr in net.parameters().items()},
    }


def network_from_dict(d, input_width):
    spec = ModelSpec.from_dict(d["spec"])
    net = Network.initialize(spec, input_width, rng=make_rng(spec.train.seed))
    net.set_parameters({
        name: np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
        for name, entry in d["params"].items()})
    return net
