"""Figures written next to the CLI's tabular output.

Everything renders through the Agg backend straight to files; nothing opens a
window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .theory import THETA_CLAIM, upsilon  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.6),
    "figure.dpi": 120,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


DISPLAY_FLOOR = 1e-40


def _save(fig, path):
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_subchannel_profile(z, info_indices=None, path="subchannels.png", title=None):
    """Per-index ``Z`` on a log scale, unfrozen indices highlighted."""
    z = np.asarray(z, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        idx = np.arange(z.size)
        zc = np.maximum(z, DISPLAY_FLOOR)  # tiny values would flatten the rest of the plot
        ax.semilogy(idx, zc, ".", ms=2, color="0.6", label="frozen")
        if info_indices is not None:
            info = np.asarray(info_indices, dtype=int)
            ax.semilogy(info, zc[info], ".", ms=2, color="C0", label="unfrozen")
            ax.legend(loc="lower left", markerscale=4)
        ax.set_xlabel("index i")
        ax.set_ylabel(f"Z (clipped at {DISPLAY_FLOOR:g})")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_scaling(fit, path="scaling.png"):
    """Block length against ``1/eps`` on log-log axes with the fitted line."""
    done = [r for r in fit.rows if r.n is not None]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if done:
            x = np.array([1.0 / r.epsilon for r in done])
            ax.loglog(x, [r.N for r in done], "o", base=2, label="smallest N")
            if fit.slope is not None:
                xs = np.geomspace(x.min(), x.max(), 50)
                ax.loglog(xs, 2.0 ** (fit.intercept + fit.slope * np.log2(xs)), "--", base=2,
                          label=f"slope {fit.slope:.2f}")
            ax.legend(loc="upper left")
        ax.set_xlabel("1 / gap")
        ax.set_ylabel("N")
        ax.set_title(f"target sum of Z <= {fit.target:g}")
        return _save(fig, path)


def plot_upsilon(path="upsilon.png", points=2000):
    x = np.linspace(0, 0.5, points + 2)[1:-1]
    y = upsilon(x)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(x, y, lw=1)
        ax.axhline(THETA_CLAIM, color="C3", ls=":", lw=1, label=f"{THETA_CLAIM}")
        k = int(np.argmin(y))
        ax.plot(x[k], y[k], "v", color="C3", ms=4)
        ax.set_xlabel("x")
        ax.set_ylabel("Upsilon(x)")
        ax.legend(loc="upper right")
        return _save(fig, path)
