"""Sampled curves, the square-root-velocity transform and the forcing term.

Curves are stored as samples and evaluated off-grid by piecewise-linear
interpolation. SRV fields are stored on a parameter grid; sample ``k`` holds
the transform of the segment ``[t_k, t_{k+1}]`` (the last sample repeats the
final segment), so that left-endpoint quadrature integrates them exactly.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import CurveError, DegenerateDifferenceWarning


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


@dataclass(frozen=True)
class SampledCurve:
    """An open curve given by ``M + 1`` samples in R^d.

    ``params`` defaults to the uniform grid on [0, 1]. Immersion (no repeated
    consecutive samples) is not enforced here because reconstructed curves
    may legitimately stall; operations that need it call
    :meth:`check_immersion`.
    """

    points: np.ndarray
    params: np.ndarray | None = None

    def __post_init__(self):
        pts = _as_points(self.points)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise CurveError(f"curve needs at least 2 samples in R^d, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise CurveError("curve samples must be finite")
        if self.params is None:
            t = np.linspace(0.0, 1.0, pts.shape[0])
        else:
            t = np.asarray(self.params, dtype=float)
            if t.shape != (pts.shape[0],):
                raise CurveError("params must have one entry per sample")
            if t[0] != 0.0 or t[-1] != 1.0:
                raise CurveError("params must start at 0 and end at 1")
            if np.any(np.diff(t) <= 0):
                raise CurveError("params must be strictly increasing")
        pts.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "params", t)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_segments(self) -> int:
        return self.points.shape[0] - 1

    def __call__(self, t) -> np.ndarray:
        """Evaluate the curve at parameter(s) ``t`` by linear interpolation."""
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (self.dim,))
        for a in range(self.dim):
            out[..., a] = np.interp(t, self.params, self.points[:, a])
        return out

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    def length(self) -> float:
        """Polygonal (chord) length."""
        return float(self.segment_lengths().sum())

    def check_immersion(self) -> None:
        seg = self.segment_lengths()
        bad = np.flatnonzero(seg <= 0.0)
        if bad.size:
            raise CurveError(
                f"degenerate curve: samples {bad[0]} and {bad[0] + 1} coincide "
                f"({bad.size} zero-length segment(s))"
            )

    def normalized(self) -> "SampledCurve":
        """Translate to start at the origin and scale to unit length."""
        L = self.length()
        if L <= 0:
            raise CurveError("cannot normalise a curve of zero length")
        return SampledCurve((self.points - self.points[0]) / L, self.params)


@dataclass(frozen=True)
class SrvField:
    """Sampled SRV function on a parameter grid."""

    samples: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        q = _as_points(self.samples)
        g = np.asarray(self.grid, dtype=float)
        if q.shape[0] != g.shape[0] or g.shape[0] < 2:
            raise CurveError("SRV samples and grid must have equal length >= 2")
        q.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "samples", q)
        object.__setattr__(self, "grid", g)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (self.dim,))
        for a in range(self.dim):
            out[..., a] = np.interp(t, self.grid, self.samples[:, a])
        return out

    def l2_norm_sq(self) -> float:
        """Left-endpoint quadrature of |q|^2."""
        dt = np.diff(self.grid)
        return float(np.sum(np.sum(self.samples[:-1] ** 2, axis=1) * dt))


def srvt(c: SampledCurve, grid=None) -> SrvField:
    """Scaled square-root-velocity transform of ``c`` sampled on ``grid``.

    Velocities are divided differences of the interpolated curve on each grid
    segment; the length is the chord length of the resampled polygon so the
    result has unit discrete L2 norm.
    """
    grid = c.params if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
        raise CurveError("SRVT grid must be strictly increasing from 0 to 1")
    pts = c(grid)
    delta = np.diff(pts, axis=0)
    seg = np.linalg.norm(delta, axis=1)
    bad = np.flatnonzero(seg <= 0.0)
    if bad.size:
        raise CurveError(
            f"degenerate curve: zero-length segment between grid points {bad[0]} and {bad[0] + 1}"
        )
    dt = np.diff(grid)
    vel = delta / dt[:, None]
    speed = seg / dt
    q = vel / np.sqrt(seg.sum() * speed)[:, None]
    return SrvField(np.vstack([q, q[-1:]]), grid)


def inverse_srvt(q: SrvField) -> SampledCurve:
    """Curve starting at the origin whose SRVT is ``q``: cumulative sum of |q| q dt."""
    if q.samples.size == 0:
        raise CurveError("empty SRV field")
    dt = np.diff(q.grid)
    qs = q.samples[:-1]
    steps = np.linalg.norm(qs, axis=1)[:, None] * qs * dt[:, None]
    pts = np.vstack([np.zeros((1, q.dim)), np.cumsum(steps, axis=0)])
    return SampledCurve(pts, q.grid)


def eval_f(q1: SrvField, q2: SrvField, x) -> float:
    """Relaxed inner product max(<q1(x1), q2(x2)>, 0)."""
    x1, x2 = (float(v) for v in x)
    if not (0.0 <= x1 <= 1.0 and 0.0 <= x2 <= 1.0):
        raise ValueError(f"point {x!r} lies outside the unit square")
    return max(float(np.dot(q1(x1), q2(x2))), 0.0)


def polygon_length(c: SampledCurve, t) -> float:
    """Length of the polygon through ``c(t)``, the length seen by a discretisation on ``t``."""
    return float(np.linalg.norm(np.diff(c(t), axis=0), axis=1).sum())


def _grid_length(c: SampledCurve, h: float) -> float:
    N = round(1.0 / h)
    if N >= 1 and abs(N * h - 1.0) < 1e-9:
        return polygon_length(c, np.linspace(0.0, 1.0, N + 1))
    return c.length()


def _scaled_difference(c: SampledCurve, t, span, length: float) -> np.ndarray:
    """(c(t) - c(t - span)) / sqrt(|.| length); zero where the difference vanishes."""
    delta = c(t) - c(np.asarray(t) - span)
    norm = np.linalg.norm(delta, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(norm > 0, delta / np.sqrt(norm * length), 0.0)
    return out, norm[..., 0] <= 0


def approx_hf(c1: SampledCurve, c2: SampledCurve, x, h: float) -> float:
    """Backward-difference approximation of ``h * f(x)`` computed from curve samples."""
    return approx_hf_ddp(c1, c2, x, h, 1, 1)


def approx_hf_ddp(c1: SampledCurve, c2: SampledCurve, x, h: float, k: int, l: int) -> float:
    """Approximation of ``h * f(x) * sqrt(k l)`` using differences over spans ``k h`` and ``l h``."""
    if k < 1 or l < 1:
        raise ValueError("jump lengths k and l must be >= 1")
    x1, x2 = (float(v) for v in x)
    eps = 1e-12
    if x1 < k * h - eps or x2 < l * h - eps:
        raise ValueError(f"need x1 >= k h and x2 >= l h, got x={x!r}, h={h}, k={k}, l={l}")
    a, bad1 = _scaled_difference(c1, x1, k * h, _grid_length(c1, h))
    b, bad2 = _scaled_difference(c2, x2, l * h, _grid_length(c2, h))
    if bad1 or bad2:
        warnings.warn("zero-length backward difference, forcing set to 0", DegenerateDifferenceWarning)
        return 0.0
    return max(float(np.dot(a, b)), 0.0)


def difference_factors(c: SampledCurve, N: int, k: int = 1) -> tuple[np.ndarray, int]:
    """Scaled backward differences at every node of the uniform grid with step 1/N.

    Row ``i`` holds ``(c(x_i) - c(x_i - k h)) / sqrt(|.| len(c))`` for ``i >= k``
    and zeros below; the length is that of the polygon through the grid samples.
    Also returns the number of degenerate (zero) differences.
    """
    x = np.arange(N + 1) / N
    out = np.zeros((N + 1, c.dim))
    if k > N:
        return out, 0
    vals, bad = _scaled_difference(c, x[k:], k / N, polygon_length(c, x))
    out[k:] = vals
    return out, int(np.count_nonzero(bad))


class Reparam:
    """Monotone map of [0, 1] fixing the endpoints, analytic or sampled."""

    def __init__(self, fn: Callable | None = None, *, t=None, values=None, name: str = ""):
        if (fn is None) == (values is None):
            raise ValueError("give either an analytic map or sampled values")
        self.name = name
        if fn is not None:
            self._fn = fn
        else:
            t = np.linspace(0.0, 1.0, len(values)) if t is None else np.asarray(t, float)
            v = np.asarray(values, dtype=float)
            if v.shape != t.shape:
                raise ValueError("sampled reparametrisation needs matching t and values")
            if np.any(np.diff(v) < 0):
                raise ValueError("reparametrisation must be non-decreasing")
            self._fn = lambda s: np.interp(s, t, v)
        ends = np.asarray(self._fn(np.array([0.0, 1.0])), dtype=float)
        if not np.allclose(ends, [0.0, 1.0], atol=1e-12):
            raise ValueError(f"reparametrisation must fix 0 and 1, got {ends}")

    def __call__(self, t):
        return self._fn(np.asarray(t, dtype=float))

    def __repr__(self):
        return f"Reparam({self.name or 'custom'})"


psi1 = Reparam(lambda t: 3 * t / (1 + 2 * t), name="psi1")
psi2 = Reparam(lambda t: t / (3 - 2 * t), name="psi2")


def apply_reparam(c: SampledCurve, phi: Reparam) -> SampledCurve:
    """Samples of ``c o phi`` on the original parameter grid."""
    s = np.clip(phi(c.params), 0.0, 1.0)
    return SampledCurve(c(s), c.params)


def _equal_chord_walk(pts: np.ndarray, cum: np.ndarray, ell: float, steps: int):
    """Walk ``steps`` chords of length ``ell`` along the polygon from its start.

    Returns the visited points and the arc position of the last one; stops
    early (returning ``None`` position) when the polygon end is reached.
    """
    out = [pts[0]]
    p = pts[0]
    seg = 0
    nseg = len(pts) - 1
    for _ in range(steps):
        # first point on the polygon beyond p at distance ell from p
        while seg < nseg and np.linalg.norm(pts[seg + 1] - p) < ell:
            seg += 1
        if seg >= nseg:
            return np.array(out), None
        a, b = pts[seg], pts[seg + 1]
        d = b - a
        # solve |a + s d - p| = ell for the largest s in [0, 1]
        w = a - p
        A = d @ d
        B = 2 * (w @ d)
        C = w @ w - ell * ell
        disc = max(B * B - 4 * A * C, 0.0)
        s = (-B + np.sqrt(disc)) / (2 * A)
        s = min(max(s, 0.0), 1.0)
        p = a + s * d
        out.append(p)
    pos = cum[seg] + s * (cum[seg + 1] - cum[seg]) if steps else 0.0
    return np.array(out), pos


def arc_length_parametrise(c: SampledCurve, M: int | None = None) -> SampledCurve:
    """Resample ``c`` so that consecutive samples have equal chord length.

    The common chord is found by root finding so that ``M`` equal chords walk
    exactly from the first to the last sample. Parameters are uniform.
    """
    c.check_immersion()
    M = c.n_segments if M is None else int(M)
    if M < 1:
        raise ValueError("need at least one segment")
    pts = c.points
    cum = np.concatenate([[0.0], np.cumsum(c.segment_lengths())])
    total = cum[-1]
    end = pts[-1]
    if M == 1:
        return SampledCurve(np.vstack([pts[0], end]))

    def residual(ell):
        walked, pos = _equal_chord_walk(pts, cum, ell, M - 1)
        if pos is None:
            return -ell
        return np.linalg.norm(end - walked[-1]) - ell

    hi = total / (M - 1)
    lo = hi * 1e-6
    while residual(lo) < 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise CurveError("equal-chord resampling failed")
    ell = brentq(residual, lo, hi, xtol=1e-15 * total, rtol=1e-15, maxiter=500)
    walked, _ = _equal_chord_walk(pts, cum, ell, M - 1)
    return SampledCurve(np.vstack([walked, end]))
