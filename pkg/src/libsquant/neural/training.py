"""Plain SGD training with a validation-tracked best-epoch snapshot."""

from dataclasses import dataclass, replace

import numpy as np

from ..numerics import make_rng
from .network import Network, mse_loss_and_gradients


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch, loss):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch


@dataclass
class TrainedNetwork:
    """A spec plus its fitted parameters and per-epoch loss history."""

    spec: object
    params: dict            # best-epoch snapshot, used for prediction
    history: list           # [(train_mse, valid_mse)] per epoch
    best_epoch: int         # 0 means the untrained initialization

    def build(self, input_width):
        net = Network.initialize(self.spec, input_width)
        net.set_parameters(self.params)
        return net


def _batches(n, batch_size, order):
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _dataset_mse(net, X, y):
    pred = net.forward(X)
    return float(np.mean((pred - y) ** 2))


def train(spec, X_train, y_train, X_valid=None, y_valid=None):
    """Mini-batch SGD on mean-squared error.

    The seed drives both the weight draws and the per-epoch shuffles, so a
    (spec, data) pair always reproduces the same loss history bit for bit.
    The returned parameters are the snapshot with the lowest validation MSE
    (the training set doubles as validation when none is supplied).
    """
    if len(X_train) == 0:
        raise ValueError("empty training set")
    if X_valid is None:
        X_valid, y_valid = X_train, y_train
    cfg = spec.train
    rng = make_rng(cfg.seed)
    net = Network.initialize(spec, X_train.shape[-1], rng)

    best_params = net.snapshot()
    best_valid = _dataset_mse(net, X_valid, y_valid)
    best_epoch = 0
    history = []
    velocity = None
    if cfg.momentum:
        velocity = {k: np.zeros_like(v) for k, v in net.parameters().items()}

    n = len(X_train)
    params = net.parameters()
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for idx in _batches(n, cfg.batch_size, order):
            loss, grads = mse_loss_and_gradients(net, X_train[idx], y_train[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            if velocity is None:
                for name, g in grads.items():
                    params[name] -= cfg.learning_rate * g
            else:
                for name, g in grads.items():
                    velocity[name] = cfg.momentum * velocity[name] - cfg.learning_rate * g
                    params[name] += velocity[name]
        train_mse = _dataset_mse(net, X_train, y_train)
        valid_mse = _dataset_mse(net, X_valid, y_valid)
        if not (np.isfinite(train_mse) and np.isfinite(valid_mse)):
            raise TrainingDivergedError(epoch, train_mse)
        history.append((train_mse, valid_mse))
        if valid_mse < best_valid:
            best_valid = valid_mse
            best_params = net.snapshot()
            best_epoch = epoch
    return TrainedNetwork(spec, best_params, history, best_epoch)


ACTIVATION_CANDIDATES = ("linear", "log-sigmoid", "tangent-sigmoid")


def grid_search_activation(spec, X_train, y_train, X_valid=None, y_valid=None,
                           candidates=ACTIVATION_CANDIDATES):
    """Train one model per candidate transfer function and keep the one
    with the lowest validation MSE; ties go to the earlier candidate."""
    if not candidates:
        raise ValueError("need at least one candidate activation")
    Xv = X_train if X_valid is None else X_valid
    yv = y_train if y_valid is None else y_valid
    best = None
    for kind in candidates:
        cand_spec = replace(spec, activation=kind)
        trained = train(cand_spec, X_train, y_train, X_valid, y_valid)
        score = _dataset_mse(trained.build(X_train.shape[-1]), Xv, yv)
        if best is None or score < best[0]:
            best = (score, cand_spec, trained)
    return best[1], best[2]
