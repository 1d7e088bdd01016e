"""Figure rendering for the CLI report path.

Each sweep command can drop a PNG next to its data file; these helpers do
the rendering. Import is deferred to keep `matplotlib` off the critical
path of pure data runs, and the Agg backend is forced so rendering works
headless.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402

from .metrics import QGrid  # noqa: E402
from .sweep import SweepResult  # noqa: E402


def _finish(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_qfunc(grid: QGrid, path, title: str | None = None) -> Path:
    """Heatmap of a Husimi Q grid."""
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    mesh = ax.pcolormesh(grid.re_axis, grid.im_axis, grid.values,
                         shading="nearest", cmap="inferno", rasterized=True)
    fig.colorbar(mesh, ax=ax, label=r"$Q(\beta)$")
    ax.set_xlabel(r"$\mathrm{Re}\,\beta$")
    ax.set_ylabel(r"$\mathrm{Im}\,\beta$")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_ffunc(result: SweepResult, path, title: str | None = None) -> Path:
    """Real and imaginary parts of the decoherence exponent vs kappa."""
    cols = {c: i for i, c in enumerate(result.columns)}
    kap = [r[cols["kappa"]] for r in result.rows]
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(kap, [r[cols["re_f"]] for r in result.rows], label="Re f", color="C0")
    ax.plot(kap, [r[cols["im_f"]] for r in result.rows], label="Im f", color="C1")
    ax.plot(kap, [r[cols["re_f_quad"]] for r in result.rows], "--",
            label="Re f (quadratic)", color="C0", alpha=0.6)
    ax.plot(kap, [r[cols["im_f_quad"]] for r in result.rows], "--",
            label="Im f (quadratic)", color="C1", alpha=0.6)
    ax.set_xlabel(r"$\varkappa$")
    ax.set_ylabel("decoherence exponent")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_infidelity(result: SweepResult, path, title: str | None = None) -> Path:
    """Heatmap of 1 - F over the (tau_nbar, kappa) plane."""
    cols = {c: i for i, c in enumerate(result.columns)}
    kappas = sorted({r[cols["kappa"]] for r in result.rows})
    tns = sorted({r[cols["tau_nbar"]] for r in result.rows})
    grid = [[math.nan] * len(tns) for _ in kappas]
    for row in result.rows:
        i = kappas.index(row[cols["kappa"]])
        j = tns.index(row[cols["tau_nbar"]])
        grid[i][j] = row[cols["one_minus_f"]]
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    positive = [v for r in grid for v in r if isinstance(v, float) and v > 0]
    norm = LogNorm(vmin=max(min(positive, default=1e-16), 1e-16),
                   vmax=max(positive, default=1.0)) if positive else None
    mesh = ax.pcolormesh(tns, kappas, grid, shading="nearest", cmap="viridis",
                         norm=norm, rasterized=True)
    fig.colorbar(mesh, ax=ax, label=r"$1-F$")
    ax.set_xlabel(r"$\tau\bar{n}$")
    ax.set_ylabel(r"$\varkappa$")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_holevo(result: SweepResult, path, title: str | None = None) -> Path:
    """Holevo quantity vs output photon number, one line per kappa."""
    cols = {c: i for i, c in enumerate(result.columns)}
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for kappa in sorted({r[cols["kappa"]] for r in result.rows}):
        pts = [(r[cols["tau_nbar"]], r[cols["chi_bits"]])
               for r in result.rows if r[cols["kappa"]] == kappa]
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                label=rf"$\varkappa={kappa:g}$")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\tau\bar{n}$")
    ax.set_ylabel(r"$\chi$")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_squeezing(result: SweepResult, path, title: str | None = None) -> Path:
    """Minimum quadrature variance vs sinh r, one line per tau, with floors."""
    cols = {c: i for i, c in enumerate(result.columns)}
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for tau in sorted({r[cols["tau"]] for r in result.rows}):
        pts = [(r[cols["sinh_r"]], r[cols["var_min"]], r[cols["plateau_estimate"]])
               for r in result.rows if r[cols["tau"]] == tau]
        line, = ax.plot([p[0] for p in pts], [p[1] for p in pts],
                        label=rf"$\tau={tau:g}$")
        ax.axhline(pts[0][2], linestyle="--", color=line.get_color(), alpha=0.5)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\sinh r$")
    ax.set_ylabel(r"$\langle(\Delta \hat{x}_\theta)^2\rangle$")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)
