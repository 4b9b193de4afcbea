"""Optional PNG rendering of the panel data written by the CLI."""

from __future__ import annotations

import os
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import densities, rules  # noqa: E402


def render_figure1(out_dir: str, alpha: float = 0.1, y_t: float = -1.0,
                   theta_pred: float = 0.0,
                   lams: Sequence[float] = (0.0, 1.0, -1.0, -1.5),
                   grid_n: int = 501) -> List[str]:
    """One PNG per truth, each overlaying the truth, the predicted and the
    updated model densities with the observation marked."""
    model = densities.gaussian_location()
    rule = rules.score_driven(model, alpha)
    theta_upd = rules.apply_update(rule, y_t, theta_pred)
    os.makedirs(out_dir, exist_ok=True)
    labels = "abcdefghijklmnopqrstuvwxyz"
    paths = []
    for i, lam in enumerate(lams):
        bnds = [densities.truncation_bounds(model, th, 1e-12)
                for th in (lam, theta_pred, theta_upd)]
        lo = min(b[0] for b in bnds)
        hi = max(b[1] for b in bnds)
        xs = np.linspace(lo, hi, grid_n)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(xs, densities.pdf(model, xs, lam), label="truth", lw=1.8)
        ax.plot(xs, densities.pdf(model, xs, theta_pred), label="predicted",
                ls="--")
        ax.plot(xs, densities.pdf(model, xs, theta_upd), label="updated",
                ls=":")
        ax.axvline(y_t, color="gray", lw=0.8)
        ax.set_title(f"truth mean {lam:g}")
        ax.set_xlabel("y")
        ax.legend(fontsize=8)
        fig.tight_layout()
        label = labels[i] if i < len(labels) else str(i)
        path = os.path.join(out_dir, f"figure1_panel_{label}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
