"""Figures written next to CLI output (``--figures DIR``)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_FLOOR = 1e-17


def report_figure(report: dict, directory) -> str:
    """Bar chart of per-property max residuals (log scale), colored by verdict."""
    os.makedirs(directory, exist_ok=True)
    props = report["properties"]
    names = [p["name"] for p in props]
    vals = [max(p["max_residual"], _FLOOR) if p["max_residual"] is not None else 1.0 for p in props]
    colors = ["tab:green" if p["pass"] else "tab:red" for p in props]
    fig, ax = plt.subplots(figsize=(8, 0.4 * len(props) + 1.5))
    ax.barh(range(len(props)), vals, color=colors)
    ax.set_xscale("log")
    ax.set_yticks(range(len(props)))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel(f"max residual (floored at {_FLOOR:g})")
    ax.set_title(f"suite {report['suite']}, seed {report['seed']}")
    fig.tight_layout()
    path = os.path.join(directory, f"report_{report['suite']}_seed{report['seed']}.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def induced_map_figure(maps: dict, directory, stem="induced_map") -> str:
    """Side-by-side integer heatmaps, one per method."""
    os.makedirs(directory, exist_ok=True)
    fig, axes = plt.subplots(1, len(maps), figsize=(3.2 * len(maps), 3), squeeze=False)
    for ax, (method, m) in zip(axes[0], maps.items()):
        a = m.array
        ax.imshow(a, cmap="Blues", vmin=0, vmax=max(1, int(a.max()) if a.size else 1))
        for (r, c), v in np.ndenumerate(a):
            ax.text(c, r, str(v), ha="center", va="center")
        ax.set_title(method)
        ax.set_xlabel("source block")
        ax.set_ylabel("target block")
        ax.set_xticks(range(a.shape[1]))
        ax.set_yticks(range(a.shape[0]))
    fig.tight_layout()
    path = os.path.join(directory, f"{stem}.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
