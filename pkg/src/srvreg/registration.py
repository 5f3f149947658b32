"""Recovering the optimal reparametrisation path and evaluating the discrete objective."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import SampledCurve, SrvField
from .errors import NumericalError
from .solver import PolicyField

_SNAP = 1e-9  # grid units; intersection coordinates this close to a grid line are put on it
_MIN_STEP = 1e-15


@dataclass
class ReparamPath:
    """Monotone piecewise-linear path from (0, 0) to (1, 1), stored in forward order."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)

    @property
    def dts(self) -> np.ndarray:
        return compute_dts(self)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def __len__(self):
        return len(self.points)

    def check(self, N: int | None = None, tol: float = 1e-12) -> None:
        """Raise ``NumericalError`` if an invariant is violated."""
        p = self.points
        if not (np.allclose(p[0], 0.0, atol=tol) and np.allclose(p[-1], 1.0, atol=tol)):
            raise NumericalError(f"path must run from 0 to 1, got {p[0]} -> {p[-1]}")
        if np.any(np.diff(p, axis=0) < -tol):
            raise NumericalError("path is not componentwise non-decreasing")
        if N is not None and len(p) > 2 * N + 1:
            raise NumericalError(f"path has {len(p)} points, more than 2N+1 = {2 * N + 1}")


def _snap(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) < _SNAP else v


def _trace(policy: PolicyField, start_grid: tuple[float, float]) -> list[tuple[float, float]]:
    """Backtrack in grid units from ``start_grid`` to the origin; returns points in backward order."""
    N = policy.N
    p1, p2 = float(start_grid[0]), float(start_grid[1])
    pts = [(p1, p2)]
    for _ in range(4 * N + 4):
        if p1 <= 0.0 and p2 <= 0.0:
            return pts
        if p1 <= 0.0 or p2 <= 0.0:
            # boundary convention: alpha = (0, 1) on x1 = 0 and (1, 0) on x2 = 0
            pts.append((0.0, 0.0))
            return pts
        i, j = math.ceil(p1), math.ceil(p2)
        a1, a2 = policy.alpha[i - 1, j - 1]
        if a1 <= 0.0 and a2 <= 0.0:
            raise NumericalError(f"zero direction in cell ({i}, {j})")
        t1 = (p1 - (i - 1)) / a1 if a1 > 0 else math.inf
        t2 = (p2 - (j - 1)) / a2 if a2 > 0 else math.inf
        if t1 <= t2:
            n1, n2 = float(i - 1), _snap(p2 - t1 * a2)
            if t1 == t2:
                n2 = float(j - 1)
        else:
            n1, n2 = _snap(p1 - t2 * a1), float(j - 1)
        n1, n2 = max(n1, 0.0), max(n2, 0.0)
        if not (p1 - n1 >= _MIN_STEP or p2 - n2 >= _MIN_STEP):
            raise NumericalError(f"backtracking made no progress at ({p1 / N}, {p2 / N})")
        p1, p2 = n1, n2
        pts.append((p1, p2))
    raise NumericalError("backtracking did not reach the origin (cycle?)")


def _trace_jumps(policy: PolicyField, start: tuple[int, int]) -> list[tuple[float, float]]:
    i, j = start
    pts = [(float(i), float(j))]
    while i > 0 and j > 0:
        k, l = policy.jumps[i, j]
        if k == 0 and l == 0:
            raise NumericalError(f"no stored jump at node ({i}, {j})")
        i, j = i - int(k), j - int(l)
        pts.append((float(i), float(j)))
    if i > 0 or j > 0:
        pts.append((0.0, 0.0))
    return pts


def backtrack(policy: PolicyField, start=(1.0, 1.0)) -> ReparamPath:
    """Follow the stored maximisers from ``start`` (default (1, 1)) back to the origin.

    In each half-open cell the ray ``phi - t alpha`` is cut with the cell's left
    and bottom grid lines and the componentwise larger intersection is kept.
    Policies from the fully discrete scheme are followed jump by jump.
    """
    N = policy.N
    g = (float(start[0]) * N, float(start[1]) * N)
    if policy.jumps is not None:
        gi, gj = round(g[0]), round(g[1])
        if abs(gi - g[0]) > 1e-9 or abs(gj - g[1]) > 1e-9:
            raise ValueError("fully discrete paths must start at a grid node")
        pts = _trace_jumps(policy, (gi, gj))
    else:
        pts = _trace(policy, g)
    arr = np.array(pts[::-1]) / N
    return ReparamPath(arr)


def compute_dts(path: ReparamPath) -> np.ndarray:
    """``dt_k = (dphi1 + dphi2) / 2``, i.e. a path with unit 1-norm speed."""
    inc = np.diff(path.points, axis=0)
    return 0.5 * inc.sum(axis=1)


def eval_Jh(path: ReparamPath, q1: SrvField, q2: SrvField) -> float:
    """Discrete objective ``sum_k <q1(phi1_k), q2(phi2_k)> sqrt(dphi1_k dphi2_k)``."""
    inc = np.clip(np.diff(path.points, axis=0), 0.0, None)
    a = q1(path.points[1:, 0])
    b = q2(path.points[1:, 1])
    return float(np.sum(np.einsum("kd,kd->k", a, b) * np.sqrt(inc[:, 0] * inc[:, 1])))


def eval_Jh_dt(path: ReparamPath, q1: SrvField, q2: SrvField, dts) -> float:
    """The same objective written as ``sum_k <q1_k, q2_k> dt_k`` for an arbitrary positive ``dts``."""
    dts = np.asarray(dts, dtype=float)
    inc = np.clip(np.diff(path.points, axis=0), 0.0, None)
    a = q1(path.points[1:, 0]) * np.sqrt(inc[:, :1] / dts[:, None])
    b = q2(path.points[1:, 1]) * np.sqrt(inc[:, 1:] / dts[:, None])
    return float(np.sum(np.einsum("kd,kd->k", a, b) * dts))


def chord_factors(path: ReparamPath, c1: SampledCurve, c2: SampledCurve):
    """Per-segment ``dc / sqrt(|dc| L)`` of both curves along the path (zero for stalled segments).

    ``L`` is the length of the polygon through the sampled points, so each
    factor list has unit norm, as the SRVT of that polygon would.
    """
    out = []
    for axis, c in ((0, c1), (1, c2)):
        pts = c(path.points[:, axis])
        delta = np.diff(pts, axis=0)
        norm = np.linalg.norm(delta, axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            out.append(np.where(norm > 0, delta / np.sqrt(norm * norm.sum()), 0.0))
    return out[0], out[1]


def eval_Jh_curves(path: ReparamPath, c1: SampledCurve, c2: SampledCurve) -> float:
    """Objective along the path with each segment's SRV taken from the curve chords."""
    a, b = chord_factors(path, c1, c2)
    return float(np.einsum("kd,kd->", a, b))


def write_path_csv(path: ReparamPath, fh) -> None:
    t = np.concatenate([[0.0], np.cumsum(compute_dts(path))])
    fh.write("t,phi1,phi2\n")
    for tk, (a, b) in zip(t, path.points):
        fh.write(f"{tk:.17g},{a:.17g},{b:.17g}\n")
