"""Shape distance and discrete geodesics from a registered pair."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .curves import SampledCurve, SrvField
from .registration import ReparamPath, chord_factors, compute_dts

THETA_TOL = 1e-6
ANTIPODAL_TOL = 1e-9


@dataclass
class GeodesicResult:
    distance: float
    Jh: float
    q_registered: tuple[np.ndarray, np.ndarray]
    dts: np.ndarray
    tau_grid: np.ndarray
    curves: list[SampledCurve] = field(default_factory=list)

    def manifest(self, files=None) -> dict:
        out = {
            "tau": [float(t) for t in self.tau_grid],
            "distance": float(self.distance),
            "J_h": float(self.Jh),
            "n_segments": int(len(self.dts)),
        }
        if files is not None:
            out["files"] = list(files)
        return out


def registered_srv(path: ReparamPath, q1: SrvField, q2: SrvField, dts=None):
    """``q_ik = q_i(phi_ik) sqrt(dphi_ik / dt_k)`` for both curves; zero-length segments dropped."""
    dts = compute_dts(path) if dts is None else np.asarray(dts, dtype=float)
    inc = np.clip(np.diff(path.points, axis=0), 0.0, None)
    keep = dts > 0
    out = []
    for axis, q in ((0, q1), (1, q2)):
        vals = q(path.points[1:, axis])[keep]
        out.append(vals * np.sqrt(inc[keep, axis] / dts[keep])[:, None])
    return out[0], out[1], dts[keep]


def registered_srv_curves(path: ReparamPath, c1: SampledCurve, c2: SampledCurve, dts=None):
    """As :func:`registered_srv` but with each segment's SRV taken from the curve chords."""
    dts = compute_dts(path) if dts is None else np.asarray(dts, dtype=float)
    a, b = chord_factors(path, c1, c2)
    keep = dts > 0
    scale = 1.0 / np.sqrt(dts[keep])[:, None]
    return a[keep] * scale, b[keep] * scale, dts[keep]


def shape_distance(Jh: float) -> float:
    return math.acos(min(1.0, max(-1.0, float(Jh))))


def geodesic_weights(theta: float, tau):
    """``sin(tau theta) / sin(theta)``, linear in ``tau`` for tiny ``theta``."""
    if theta >= math.pi - ANTIPODAL_TOL:
        raise ValueError("antipodal SRV fields: the geodesic is not unique")
    if theta < 0:
        raise ValueError("theta must be non-negative")
    tau = np.asarray(tau, dtype=float)
    if theta < THETA_TOL:
        return tau
    return np.sin(tau * theta) / math.sin(theta)


def geodesic_points(q_registered, Jh: float, tau_grid) -> list[np.ndarray]:
    """Pointwise great-circle interpolation ``w(1-tau) q1_k + w(tau) q2_k`` for each tau."""
    q1k, q2k = q_registered[0], q_registered[1]
    theta = shape_distance(Jh)
    out = []
    for tau in np.asarray(tau_grid, dtype=float):
        w0 = geodesic_weights(theta, 1.0 - tau)
        w1 = geodesic_weights(theta, tau)
        out.append(w0 * q1k + w1 * q2k)
    return out


def preshape_curve(gamma: np.ndarray, dts) -> SampledCurve:
    """Discrete inverse SRVT: cumulative sum of ``gamma_l |gamma_l| dt_l`` starting at the origin."""
    dts = np.asarray(dts, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    steps = gamma * np.linalg.norm(gamma, axis=1, keepdims=True) * dts[:, None]
    pts = np.vstack([np.zeros((1, gamma.shape[1])), np.cumsum(steps, axis=0)])
    t = np.concatenate([[0.0], np.cumsum(dts)])
    t = t / t[-1]
    t[-1] = 1.0
    return SampledCurve(pts, t)


def default_tau_grid(n: int = 7) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def geodesic(path: ReparamPath, q1: SrvField, q2: SrvField, Jh: float | None = None,
             tau_grid=None, c1: SampledCurve | None = None, c2: SampledCurve | None = None) -> GeodesicResult:
    """Distance, registered SRV samples and pre-shape curves along the geodesic.

    With curves supplied the per-segment SRV values come from the curve
    chords; otherwise the fields are evaluated at the segment end points.
    """
    tau_grid = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    if c1 is not None and c2 is not None:
        a, b, dts = registered_srv_curves(path, c1, c2)
    else:
        a, b, dts = registered_srv(path, q1, q2)
    if Jh is None:
        Jh = float(np.einsum("kd,kd,k->", a, b, dts))
    gammas = geodesic_points((a, b), Jh, tau_grid)
    curves = [preshape_curve(g, dts) for g in gammas]
    return GeodesicResult(shape_distance(Jh), float(Jh), (a, b), dts, tau_grid, curves)


def write_geodesic(result: GeodesicResult, out_dir: str, prefix: str = "geodesic") -> dict:
    """One CSV of curve points per tau plus ``manifest.json``; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for n, (tau, curve) in enumerate(zip(result.tau_grid, result.curves)):
        name = f"{prefix}_{n:02d}.csv"
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write("# tau=%.17g\n" % tau)
            np.savetxt(fh, curve.points, delimiter=",", fmt="%.17g")
        files.append(name)
    manifest = result.manifest(files)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest
