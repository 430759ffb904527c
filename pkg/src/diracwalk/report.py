"""Run-report figure: density heatmap with reference rays, centroid
traces, and the norm-drift readout, rendered straight to a file."""

from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .engine import RunRecord  # noqa: E402


def _masked(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = np.isfinite(ys)
    return xs[keep], ys[keep]


def render_report(record: RunRecord, path, title: Optional[str] = None) -> None:
    eps = record.lattice.eps
    n = record.lattice.n_sites
    times = np.asarray(record.js, dtype=float) * eps

    has_map = bool(record.snapshots)
    fig, axes = plt.subplots(
        1, 2 if has_map else 1, figsize=(11.0, 4.4) if has_map else (6.0, 4.4))
    axes = np.atleast_1d(axes)

    if has_map:
        ax = axes[0]
        rows = np.asarray(record.snapshots)
        t_rows = np.asarray(record.snapshot_js, dtype=float) * eps
        ax.imshow(rows, aspect="auto", origin="lower", cmap="magma",
                  extent=(-0.5 * eps, (n - 0.5) * eps,
                          t_rows[0] - 0.5 * eps, t_rows[-1] + 0.5 * eps))
        if record.oracle_x0 is not None:
            ax.plot(record.oracle_plus, record.oracle_x0, color="cyan",
                    lw=1.0, label="reference ray (+)")
            ax.plot(record.oracle_minus, record.oracle_x0, color="white",
                    lw=1.0, ls="--", label="reference ray (-)")
            ax.legend(loc="upper left", fontsize=7, framealpha=0.4)
        ax.set_xlim(-0.5 * eps, (n - 0.5) * eps)
        ax.set_xlabel("x1")
        ax.set_ylabel("x0")
        ax.set_title("density", fontsize=10)

    ax = axes[-1]
    for name, column, style in (("minus", record.centroid_minus, "C0-"),
                                ("plus", record.centroid_plus, "C1-")):
        xs, ys = _masked(times, column)
        if len(xs):
            ax.plot(xs, ys, style, lw=1.4, label=f"centroid {name}")
    if record.oracle_x0 is not None:
        ax.plot(record.oracle_x0, record.oracle_plus, "k--", lw=0.9,
                label="ray (+)")
        ax.plot(record.oracle_x0, record.oracle_minus, "k:", lw=0.9,
                label="ray (-)")
    ax.set_xlabel("x0")
    ax.set_ylabel("x1")
    ax.set_title("centroids", fontsize=10)
    ax.legend(fontsize=7)
    if record.norms:
        ax.text(0.02, 0.02, f"norm drift {record.norm_drift():.2e}",
                transform=ax.transAxes, fontsize=8,
                bbox=dict(boxstyle="round", fc="white", alpha=0.7))

    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
