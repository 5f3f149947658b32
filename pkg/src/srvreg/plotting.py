"""Figures written alongside the CLI's CSV/JSON output. Always renders off-screen."""
from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGSIZE = (5.5, 4.5)
DPI = 120


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_registration(u, path_points, out_path, title=""):
    """Value function as a heat map with the backtracked path on top."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    im = ax.imshow(np.asarray(u).T, origin="lower", extent=(0, 1, 0, 1), cmap="viridis", aspect="equal")
    fig.colorbar(im, ax=ax, label="u_h")
    p = np.asarray(path_points)
    ax.plot(p[:, 0], p[:, 1], color="w", lw=1.5, label="path")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="upper left")
    if title:
        ax.set_title(title)
    return _save(fig, out_path)


def plot_geodesic(curves, taus, out_path, title=""):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    cmap = plt.get_cmap("coolwarm")
    for c, tau in zip(curves, taus):
        pts = c.points
        y = pts[:, 1] if pts.shape[1] > 1 else np.zeros(len(pts))
        ax.plot(pts[:, 0], y, color=cmap(float(tau)), lw=1.2, label=f"tau={tau:.2f}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(fontsize=7, loc="best")
    if title:
        ax.set_title(title)
    return _save(fig, out_path)


def plot_convergence(report, out_path, column="linf_u_error"):
    """Error against N on log axes plus a work-precision panel (error against wall time)."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(2 * FIGSIZE[0], FIGSIZE[1]))
    schemes = list(dict.fromkeys(r["scheme"] for r in report.rows))
    for s in schemes:
        N = report.column(s, "N")
        err = report.column(s, column)
        wall = report.column(s, "wall_time")
        ok = np.isfinite(err) & (err > 0)
        ax1.loglog(N[ok], err[ok], "o-", label=s)
        ax2.loglog(wall[ok], err[ok], "o-", label=s)
    if len(report.rows):
        N = np.array(sorted({r["N"] for r in report.rows}), dtype=float)
        ax1.loglog(N, 1.0 / np.sqrt(N), "k--", lw=0.8, label="sqrt(h)")
    ax1.set_xlabel("N")
    ax1.set_ylabel(column)
    ax2.set_xlabel("wall time [s]")
    ax2.set_ylabel(column)
    ax1.legend(fontsize=7)
    return _save(fig, out_path)


def plot_local_maxima(u_tot, maxima, out_path, paths=()):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    u = np.asarray(u_tot)
    N = u.shape[0] - 1
    im = ax.imshow(u.T, origin="lower", extent=(0, 1, 0, 1), cmap="magma", aspect="equal")
    fig.colorbar(im, ax=ax, label="u_tot")
    for p in paths:
        p = np.asarray(p)
        ax.plot(p[:, 0], p[:, 1], color="c", lw=0.8)
    if maxima:
        m = np.asarray(maxima, dtype=float) / N
        ax.plot(m[:, 0], m[:, 1], "x", color="c", ms=6)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"{len(maxima)} local maxima")
    return _save(fig, out_path)


def convergence_order(N, err) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    N, err = np.asarray(N, dtype=float), np.asarray(err, dtype=float)
    ok = err > 0
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(1.0 / N[ok]), np.log(err[ok]), 1)[0])
