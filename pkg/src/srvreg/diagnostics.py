"""Total value function, local solutions, error metrics and convergence studies."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .geodesics import registered_srv, registered_srv_curves, shape_distance
from .pipeline import objective
from .problems import CurvePair
from .registration import ReparamPath, backtrack
from .solver import GridSpec, PolicyField, SchemeConfig, ValueField, solve


@dataclass
class TotalValueField:
    u_tot: np.ndarray
    u_fwd: np.ndarray
    u_rev: np.ndarray
    fwd_policy: PolicyField
    rev_policy: PolicyField
    maxima: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.u_tot.shape[0] - 1


def total_value(problem, grid: GridSpec | int, cfg: SchemeConfig | None = None,
                plateau_tol: float | None = None) -> TotalValueField:
    """``u_fwd + u_rev`` where ``u_rev`` solves the reflected problem and is reflected back."""
    cfg = cfg or SchemeConfig()
    fwd, fpol = solve(problem, grid, cfg)
    rev, rpol = solve(problem.reversed(), grid, cfg)
    u_rev = rev.u[::-1, ::-1]
    tv = TotalValueField(fwd.u + u_rev, fwd.u, u_rev, fpol, rpol)
    tv.maxima = find_local_maxima(tv.u_tot, plateau_tol)
    return tv


def find_local_maxima(u_tot: np.ndarray, plateau_tol: float | None = None) -> list[tuple[int, int]]:
    """Interior grid points with no 8-neighbour larger by more than ``plateau_tol``.

    Connected groups of such points form one plateau, reported by its largest
    member (ties: first in row-major order). The test is deliberately
    conservative: flat regions of any height, saddles included, are reported.
    """
    u = np.asarray(u_tot, dtype=float)
    if plateau_tol is None:
        plateau_tol = 1e-3 * float(np.max(u, initial=0.0))
    n1, n2 = u.shape
    if n1 < 3 or n2 < 3:
        return []
    centre = u[1:-1, 1:-1]
    is_max = np.ones(centre.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = u[1 + di:n1 - 1 + di, 1 + dj:n2 - 1 + dj]
            is_max &= nb <= centre + plateau_tol
    labels, count = ndimage.label(is_max, structure=np.ones((3, 3), dtype=int))
    out = []
    for lab in range(1, count + 1):
        idx = np.flatnonzero(labels.ravel() == lab)
        best = idx[np.argmax(centre.ravel()[idx])]
        i, j = np.unravel_index(best, centre.shape)
        out.append((int(i) + 1, int(j) + 1))
    return out


def backtrack_through(x, fwd_policy: PolicyField, rev_policy: PolicyField) -> ReparamPath:
    """Locally optimal path through ``x``: forward backtrack to 0 joined with the reflected reverse one to 1."""
    x = np.asarray(x, dtype=float)
    lower = backtrack(fwd_policy, start=tuple(x)).points
    upper = 1.0 - backtrack(rev_policy, start=tuple(1.0 - x)).points[::-1]
    pts = np.vstack([lower, upper[1:]])
    pts[0], pts[-1] = 0.0, 1.0
    return ReparamPath(pts)


def linf_error(u_h: np.ndarray, u_eps: np.ndarray) -> float:
    """Max difference at the nodes shared by a coarse grid and a nested finer one."""
    u_h, u_eps = np.asarray(u_h, dtype=float), np.asarray(u_eps, dtype=float)
    N, M = u_h.shape[0] - 1, u_eps.shape[0] - 1
    if N <= 0 or M % N != 0:
        raise ValueError(f"grids are not nested: N={N}, reference N={M}")
    step = M // N
    return float(np.max(np.abs(u_h - u_eps[::step, ::step])))


def _piecewise(sample, breaks):
    a, b, dts = sample
    edges = np.concatenate([[0.0], np.cumsum(dts)])
    mids = 0.5 * (breaks[1:] + breaks[:-1])
    k = np.clip(np.searchsorted(edges, mids, side="right") - 1, 0, len(dts) - 1)
    return a[k], b[k]


def geodesic_error_bound(sample_h, sample_eps) -> float:
    """``pi * max(|q1_h - q1_eps|, |q2_h - q2_eps|)`` in L2, each sample ``(q1_k, q2_k, dt_k)``.

    The piecewise-constant samples are compared on the union of their t-partitions.
    """
    t_h = np.cumsum(sample_h[2])
    t_e = np.cumsum(sample_eps[2])
    breaks = np.unique(np.concatenate([[0.0], t_h, t_e]))
    widths = np.diff(breaks)
    a_h, b_h = _piecewise(sample_h, breaks)
    a_e, b_e = _piecewise(sample_eps, breaks)
    e1 = math.sqrt(float(np.sum(np.sum((a_h - a_e) ** 2, axis=1) * widths)))
    e2 = math.sqrt(float(np.sum(np.sum((b_h - b_e) ** 2, axis=1) * widths)))
    return math.pi * max(e1, e2)


COLUMNS = ("scheme", "N", "wall_time", "linf_u_error", "dist_u_error", "dist_J_error", "geodesic_error_bound")


@dataclass
class ConvergenceReport:
    rows: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)

    def for_scheme(self, scheme: str) -> list[dict]:
        return [r for r in self.rows if r["scheme"] == scheme]

    def column(self, scheme: str, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.for_scheme(scheme)], dtype=float)

    def write_csv(self, fh) -> None:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (r[k] if isinstance(r[k], str) else repr(r[k])) for k in COLUMNS})

    def to_json(self) -> dict:
        rows = [{k: (None if isinstance(r[k], float) and math.isnan(r[k]) else r[k]) for k in COLUMNS}
                for r in self.rows]
        return {"columns": list(COLUMNS), "rows": rows, "reference": self.reference}

    def write_json(self, fh) -> None:
        json.dump(self.to_json(), fh, indent=2, sort_keys=True)


def _registration_sample(path, problem, cfg):
    if not isinstance(problem, CurvePair):
        return None
    if cfg.f_source == "fd":
        return registered_srv_curves(path, problem.c1, problem.c2)
    return registered_srv(path, problem.q1, problem.q2)


def _run_cell(problem, scheme, N, base_cfg):
    cfg = SchemeConfig(scheme, base_cfg.ddp_k, base_cfg.ddp_r, base_cfg.ddp_full,
                       base_cfg.filter_k, base_cfg.filter_base, base_cfg.f_source)
    t0 = time.perf_counter()
    value, policy = solve(problem, N, cfg)
    wall = time.perf_counter() - t0
    path = backtrack(policy)
    path.check(N)
    Jh = objective(path, problem, cfg)
    return value, path, Jh, wall, _registration_sample(path, problem, cfg)


def run_convergence(problem, schemes, N_list, reference_N: int, cfg: SchemeConfig | None = None,
                    reference_scheme: str = "FILTERED_V", exact_u=None, exact_distance: float | None = None,
                    workers: int = 1) -> ConvergenceReport:
    """Solve every scheme at every N and compare against a fine reference solve.

    ``exact_u(x1, x2)`` and ``exact_distance`` replace the reference where known.
    Independent (scheme, N) cells run on ``workers`` threads.
    """
    cfg = cfg or SchemeConfig()
    N_list = sorted(int(n) for n in N_list)
    if len(set(N_list)) != len(N_list):
        raise ValueError("N values must be distinct")
    for N in N_list:
        if reference_N % N:
            raise ValueError(f"reference N={reference_N} is not a multiple of N={N}")
    ref_value, ref_path, ref_J, ref_wall, ref_sample = _run_cell(problem, reference_scheme, reference_N, cfg)
    if exact_u is not None:
        x = GridSpec(reference_N).nodes
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        ref_u = np.asarray(exact_u(X1, X2), dtype=float)
    else:
        ref_u = ref_value.u
    d_ref_u = exact_distance if exact_distance is not None else shape_distance(ref_value.u_at_one)
    d_ref_J = exact_distance if exact_distance is not None else shape_distance(ref_J)

    cells = [(s, N) for s in schemes for N in N_list]
    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        results = list(pool.map(lambda sn: _run_cell(problem, sn[0], sn[1], cfg), cells))

    report = ConvergenceReport(reference={
        "scheme": reference_scheme, "N": reference_N, "u_at_one": ref_value.u_at_one, "J_h": ref_J,
        "distance_from_u": d_ref_u, "distance_from_J": d_ref_J, "wall_time": ref_wall,
    })
    for (scheme, N), (value, path, Jh, wall, sample) in zip(cells, results):
        geo = math.nan
        if sample is not None and ref_sample is not None:
            geo = geodesic_error_bound(sample, ref_sample)
        report.rows.append({
            "scheme": scheme,
            "N": N,
            "wall_time": wall,
            "linf_u_error": linf_error(value.u, ref_u),
            "dist_u_error": abs(shape_distance(value.u_at_one) - d_ref_u),
            "dist_J_error": abs(shape_distance(Jh) - d_ref_J),
            "geodesic_error_bound": geo,
        })
    return report
