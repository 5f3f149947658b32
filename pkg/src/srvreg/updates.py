"""Closed-form single-cell updates of the monotone schemes, plus a brute-force oracle.

Cell notation: ``u01 = u(x1 - h, x2)``, ``u10 = u(x1, x2 - h)``,
``u00 = u(x1 - h, x2 - h)`` and ``hf = h f(x1, x2)``. The V-schemes work on
``v = u**2`` throughout. All functions broadcast over numpy arrays and return
``(value, alpha)`` with ``alpha`` of shape ``(..., 2)``.

The returned ``alpha`` is always the exact maximiser of the discrete
functional over the admissible set, since backtracking consumes it.
"""
from __future__ import annotations

import numpy as np


def _stack(a1, a2):
    return np.stack(np.broadcast_arrays(a1, a2), axis=-1)


def _ratio(num, den, default):
    num, den = np.broadcast_arrays(np.asarray(num, float), np.asarray(den, float))
    out = np.full(num.shape, float(default))
    np.divide(num, den, out=out, where=den > 0)
    return out


def update_u1(u01, u10, hf):
    """U-scheme with admissible set ``alpha1 + alpha2 = 1``."""
    u01, u10, hf = (np.asarray(v, dtype=float) for v in (u01, u10, hf))
    d = u01 - u10
    r = np.sqrt(d * d + hf * hf)
    u11 = 0.5 * (u01 + u10 + r)
    a1 = 0.5 * (1.0 + _ratio(d, r, 0.0))
    return u11, _stack(a1, 1.0 - a1)


def _inf_alpha(first_is_max, a):
    one = np.ones_like(a)
    return _stack(np.where(first_is_max, one, a), np.where(first_is_max, a, one))


def update_uinf(u00, u01, u10, hf):
    """U-scheme with admissible set ``max(alpha1, alpha2) = 1``.

    Ties ``u01 == u10`` take the ``u01`` branch, i.e. ``alpha = (1, a)``.
    """
    u00, u01, u10, hf = (np.asarray(v, dtype=float) for v in (u00, u01, u10, hf))
    us = np.maximum(u01, u10)
    d = us - u00
    interior = 2.0 * d > hf
    dd = np.where(interior, d, 1.0)
    u11 = np.where(interior, us + hf * hf / (4.0 * dd), u00 + hf)
    a = np.where(interior, hf * hf / (4.0 * dd * dd), 1.0)
    return u11, _inf_alpha(u01 >= u10, a)


def update_v1(v01, v10, hf):
    """V-scheme (linear interpolation of ``v``) with ``alpha1 + alpha2 = 1``.

    ``v11`` is the largest root of ``v^2 - v (v01 + v10 + hf^2) + v01 v10 = 0``.
    """
    v01, v10, hf = (np.asarray(v, dtype=float) for v in (v01, v10, hf))
    H = hf * hf
    s = v01 + v10
    d = v01 - v10
    v11 = 0.5 * (s + H + np.sqrt(np.maximum(d * d + 2.0 * s * H + H * H, 0.0)))
    a1 = 0.5 * (1.0 + _ratio(d, np.sqrt(d * d + 4.0 * v11 * H), 0.0))
    return v11, _stack(a1, 1.0 - a1)


def update_vinf(v00, v01, v10, hf):
    """V-scheme with ``max(alpha1, alpha2) = 1``.

    The interior branch applies while its maximiser stays admissible,
    ``v** hf^2 <= (v** - v00)(v** - v00 - hf^2)``; otherwise the maximum sits
    at ``alpha = (1, 1)`` where ``sqrt(v11) = hf + sqrt(hf^2 + v00)``.
    """
    v00, v01, v10, hf = (np.asarray(v, dtype=float) for v in (v00, v01, v10, hf))
    H = hf * hf
    vs = np.maximum(v01, v10)
    d = vs - v00
    interior = (d > H) & (vs * H <= d * (d - H))
    dd = np.where(interior, d, 1.0)
    den = np.where(interior, d - H, 1.0)
    v_int = vs * dd / den
    corner = hf + np.sqrt(H + np.maximum(v00, 0.0))
    v11 = np.where(interior, v_int, corner * corner)
    a = np.where(interior, v_int * H / (dd * dd), 1.0)
    a = np.minimum(a, 1.0)
    return v11, _inf_alpha(v01 >= v10, a)


MONOTONE_UPDATES = {
    ("u", "1"): lambda u00, u01, u10, hf: update_u1(u01, u10, hf),
    ("u", "inf"): update_uinf,
    ("v", "1"): lambda v00, v01, v10, hf: update_v1(v01, v10, hf),
    ("v", "inf"): update_vinf,
}


def _normalise(alpha, aset):
    if aset == "1":
        return alpha / alpha.sum(axis=-1, keepdims=True)
    return alpha / alpha.max(axis=-1, keepdims=True)


def update_filtered(u00, u01, u10, hf, h, repr="u", aset="inf", filter_k=1.0):
    """Filtered update: central-difference candidate if the monotone residual allows it.

    The candidate is kept iff the monotone scheme's residual at the candidate
    is at most ``filter_k * sqrt(h)``; otherwise the monotone update is used.
    Returns ``(value, alpha, accepted)``.
    """
    u00, u01, u10, hf = (np.asarray(v, dtype=float) for v in (u00, u01, u10, hf))
    mono, mono_alpha = MONOTONE_UPDATES[(repr, aset)](u00, u01, u10, hf)
    d = u01 - u10
    H = hf * hf
    tol = filter_k * np.sqrt(h)
    if repr == "u":
        cand = u00 + np.sqrt(d * d + H)
        # h S_h(t) = mono - t for the monotone u-schemes
        residual = np.abs(mono - cand) / h
        r = np.sqrt(d * d + H)
    else:
        cand = u00 + 0.5 * H + np.sqrt(np.maximum(d * d + (2.0 * u00 + u01 + u10) * H + 0.25 * H * H, 0.0))
        t = np.sqrt(np.maximum(cand, 0.0))
        # S_h(t) = (max_a [g^2 + 2 t hf sqrt(a1 a2)] - t^2) / (2 t h); the max is a u-type update
        phi, _ = MONOTONE_UPDATES[("u", aset)](u00, u01, u10, 2.0 * t * hf)
        with np.errstate(divide="ignore", invalid="ignore"):
            residual = np.where(t > 0, np.abs(phi - t * t) / (2.0 * np.where(t > 0, t, 1.0) * h),
                                np.where(mono > 0, np.inf, 0.0))
        r = np.sqrt(d * d + 4.0 * np.maximum(cand, 0.0) * H)
    accepted = residual <= tol
    a1 = 0.5 * (1.0 + _ratio(d, r, 0.0))
    cand_alpha = _normalise(_stack(a1, 1.0 - a1), aset)
    value = np.where(accepted, cand, mono)
    alpha = np.where(accepted[..., None], cand_alpha, mono_alpha)
    return value, alpha, accepted


def brute_force_update(u00, u01, u10, hf, aset="1", repr="u", samples=4001):
    """Maximise the scheme functional over a dense sampling of the admissible set.

    The admissible set is parametrised by one scalar: ``alpha1`` on the simplex
    edge for ``aset='1'``, or the free component on each of the two edges of
    the unit square for ``aset='inf'``. The best sample is refined by golden
    section search on its neighbouring interval. Broadcasts over arrays.
    """
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    u00, u01, u10, hf = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (u00, u01, u10, hf)))
    shape = u00.shape
    u00, u01, u10, hf = (v.reshape(-1, 1) for v in (u00, u01, u10, hf))

    def objective(rows, a1, a2):
        g = (a1 + a2 - 1.0) * u00[rows] + (1.0 - a1) * u10[rows] + (1.0 - a2) * u01[rows]
        s = np.sqrt(np.maximum(a1 * a2, 0.0))
        if repr == "u":
            return g + hf[rows] * s
        # g is the interpolated v here
        return hf[rows] * s + np.sqrt(np.maximum((hf[rows] * s) ** 2 + g, 0.0))

    if aset == "1":
        edges = [lambda a: (a, 1.0 - a)]
    elif aset == "inf":
        edges = [lambda a: (np.ones_like(a), a), lambda a: (a, np.ones_like(a))]
    else:
        raise ValueError(f"unknown admissible set {aset!r}")

    n = u00.shape[0]
    grid = np.linspace(0.0, 1.0, samples)
    best_val = np.full(n, -np.inf)
    best_alpha = np.zeros((n, 2))
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    chunk = max(1, 2_000_000 // samples)
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        m = rows.stop - rows.start
        for edge in edges:
            vals = objective(rows, *edge(grid[None, :]))
            k = np.argmax(vals, axis=1)
            lo = grid[np.maximum(k - 1, 0)][:, None]
            hi = grid[np.minimum(k + 1, samples - 1)][:, None]
            a_best = grid[k][:, None]
            v_best = vals[np.arange(m), k][:, None]
            for _ in range(60):
                c = hi - invphi * (hi - lo)
                d = lo + invphi * (hi - lo)
                fc = objective(rows, *edge(c))
                fd = objective(rows, *edge(d))
                left = fc >= fd
                hi = np.where(left, d, hi)
                lo = np.where(left, lo, c)
            for a in (lo, hi, 0.5 * (lo + hi)):
                va = objective(rows, *edge(a))
                better = va > v_best
                v_best = np.where(better, va, v_best)
                a_best = np.where(better, a, a_best)
            improve = v_best[:, 0] > best_val[rows] + 1e-15
            e1, e2 = edge(a_best[:, 0])
            best_val[rows] = np.where(improve, v_best[:, 0], best_val[rows])
            best_alpha[rows] = np.where(improve[:, None], np.stack([e1, e2], axis=-1), best_alpha[rows])
    if repr == "v":
        best_val = best_val * best_val
    if shape == ():
        return float(best_val[0]), best_alpha[0]
    return best_val.reshape(shape), best_alpha.reshape(shape + (2,))
