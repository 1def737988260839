"""Band-diagram figures written next to the CSV and JSON outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def band_figure(bands, path, k_gaps=(), band_gaps=(), title=None):
    """Re and Im of the quasifrequencies against alpha, saved as PNG.

    k-gaps are shaded along alpha and band gaps along omega.
    """
    arr = bands.as_array()
    grid = np.repeat(bands.grid[:, None], arr.shape[1], axis=1)
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    ax_re.plot(grid.ravel(), arr.real.ravel(), ".", ms=2, color="C0")
    ax_im.plot(grid.ravel(), arr.imag.ravel(), ".", ms=2, color="C1")
    for g in k_gaps:
        for ax in (ax_re, ax_im):
            ax.axvspan(g.alpha_min, g.alpha_max, color="green", alpha=0.15, lw=0)
    for g in band_gaps:
        ax_re.axhspan(g.omega_min, g.omega_max, color="green", alpha=0.15, lw=0)
    half = 0.5 * bands.big_omega
    ax_re.set_ylim(-half, half)
    ax_re.set_xlabel("alpha")
    ax_im.set_xlabel("alpha")
    ax_re.set_ylabel("Re omega (folded)")
    ax_im.set_ylabel("Im omega")
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def error_figure(comparison, path):
    fig, ax = plt.subplots(figsize=(5, 3.5), constrained_layout=True)
    ax.semilogy(comparison.exact.grid, comparison.per_alpha, "o-", ms=3)
    ax.set_xlabel("alpha")
    ax.set_ylabel("max |omega_exact - omega_capacitance|")
    ax.set_title(f"err_abs = {comparison.err_abs:.3e}")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def runtime_figure(rows, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), constrained_layout=True)
    for ax, axis in zip(axes, ("K", "N")):
        sel = [r for r in rows if r["axis"] == axis]
        x = [r["value"] for r in sel]
        ax.plot(x, [r["exact_s"] for r in sel], "o-", label="exact (Muller)")
        ax.plot(x, [r["capacitance_s"] for r in sel], "s-", label="capacitance")
        ax.set_xlabel(axis)
        ax.set_ylabel("seconds")
        ax.set_yscale("log")
        ax.legend()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
