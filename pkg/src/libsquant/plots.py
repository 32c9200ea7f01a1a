"""Figure rendering for benchmark reports and diagnostics.

All figures are written straight to files (SVG by default) with a fixed
style, so report directories are self-contained: every CSV/JSON output has
its picture next to it.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# keep SVG output stable run-to-run
plt.rcParams["svg.hashsalt"] = "libsquant"
plt.rcParams["figure.figsize"] = (5.0, 4.0)


def scatter_predicted_vs_nominal(nominal, predicted, model_name, slope,
                                 intercept, path):
    """Predicted-vs-nominal concentration scatter with the fitted line and
    the identity diagonal; the slope lands in the title."""
    nominal = np.asarray(nominal, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=np.float64)
    fig, ax = plt.subplots()
    ax.scatter(nominal, predicted, s=36, color="#1f6fb4", zorder=3,
               label="test records")
    lo = min(nominal.min(), predicted.min())
    hi = max(nominal.max(), predicted.max())
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    xs = np.array([lo - pad, hi + pad])
    ax.plot(xs, xs, color="0.6", linewidth=1.0, linestyle="--", zorder=1,
            label="identity")
    ax.plot(xs, slope * xs + intercept, color="#c23b22", linewidth=1.4,
            zorder=2, label=f"fit: slope {slope:.3f}")
    ax.set_xlabel("nominal concentration (wt%)")
    ax.set_ylabel("predicted concentration (wt%)")
    ax.set_title(f"{model_name}: slope {slope:.3f}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def lasso_path_figure(path_obj, out_path):
    """Coefficient trajectories versus the penalty (log x-axis)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for j, name in enumerate(path_obj.feature_names):
        ax.plot(path_obj.lambdas, path_obj.coefs[:, j], linewidth=1.1,
                label=name)
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.axhline(0.0, color="0.8", linewidth=0.8)
    ax.set_xlabel("penalty strength")
    ax.set_ylabel("coefficient")
    ax.set_title("lasso coefficients per input")
    ax.legend(loc="best", fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def loss_curve_figure(history, model_name, out_path):
    """Training and validation MSE per epoch."""
    epochs = np.arange(1, len(history) + 1)
    train = [h[0] for h in history]
    valid = [h[1] for h in history]
    fig, ax = plt.subplots()
    ax.plot(epochs, train, label="train", color="#1f6fb4", linewidth=1.2)
    ax.plot(epochs, valid, label="validation", color="#c23b22", linewidth=1.2)
    ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("mse (normalized targets)")
    ax.set_title(f"{model_name}: training loss")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
