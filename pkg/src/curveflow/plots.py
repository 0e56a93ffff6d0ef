"""Thin SVG layer over matplotlib (optional dependency)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def write_energy_svg(path, series, ylabel="energy"):
    """Overlay of (label, values-by-step) series."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in series:
        values = np.asarray(values, dtype=float)
        ax.plot(np.arange(values.size), values, label=label)
    ax.set_xlabel("step")
    ax.set_ylabel(ylabel)
    if all(np.nanmin(np.asarray(v, dtype=float)) > 0 for _, v in series):
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_profile_svg(path, x, u3, delta):
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(x, u3, label="u3")
    ax.axhline(delta, color="k", lw=0.8, ls="--", label="obstacle")
    ax.set_xlabel("x")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
