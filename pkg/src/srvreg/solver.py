"""Sweep solvers for the registration HJB equation on the grid [0, 1]^2_h.

Every scheme is causal: node ``(i, j)`` only reads nodes with smaller index
sum. The sweep therefore runs once over anti-diagonals ``i + j = s``, each
diagonal updated as one vectorised numpy operation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .problems import CurvePair, Forcing
from .updates import MONOTONE_UPDATES, update_filtered

SCHEMES = ("U1", "UINF", "V1", "VINF", "DDP", "FILTERED_U", "FILTERED_V")

# scheme -> (representation, admissible set)
_SEMI = {
    "U1": ("u", "1"),
    "UINF": ("u", "inf"),
    "V1": ("v", "1"),
    "VINF": ("v", "inf"),
}


@dataclass(frozen=True)
class GridSpec:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ConfigError(f"grid needs N >= 2 cells per axis, got {self.N}")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "VINF"
    ddp_k: float = 0.75
    ddp_r: float = 0.5
    ddp_full: bool = False
    filter_k: float = 1.0
    filter_base: str = "inf"
    f_source: str = "fd"

    def __post_init__(self):
        scheme = self.scheme.upper()
        object.__setattr__(self, "scheme", scheme)
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {', '.join(SCHEMES)}")
        if not self.ddp_k > 0:
            raise ConfigError("ddp_k must be positive")
        if not 0 < self.ddp_r < 1:
            raise ConfigError("ddp_r must lie in (0, 1)")
        if not self.filter_k > 0:
            raise ConfigError("filter_k must be positive")
        if self.filter_base not in ("1", "inf"):
            raise ConfigError("filter_base must be '1' or 'inf'")
        if self.f_source not in ("exact", "fd"):
            raise ConfigError("f_source must be 'exact' or 'fd'")

    @property
    def representation(self) -> str:
        if self.scheme in ("V1", "VINF", "FILTERED_V"):
            return "v"
        return "u"

    @property
    def admissible_set(self) -> str:
        if self.scheme == "DDP":
            return "ddp"
        if self.scheme.startswith("FILTERED"):
            return self.filter_base
        return _SEMI[self.scheme][1]

    @property
    def a_max(self) -> float:
        """max of sqrt(alpha1 alpha2) over the admissible set."""
        return {"1": 0.5, "inf": 1.0, "ddp": math.inf}[self.admissible_set]


@dataclass
class ValueField:
    """Grid of value estimates. ``values`` holds ``u`` or ``v = u**2`` depending on ``kind``."""

    values: np.ndarray
    kind: str = "u"
    stats: dict = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        return np.sqrt(self.values) if self.kind == "v" else self.values

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def u_at_one(self) -> float:
        return float(self.u[-1, -1])


@dataclass
class PolicyField:
    """Per-cell maximisers. ``alpha[i-1, j-1]`` belongs to the cell whose upper-right node is ``(i, j)``.

    For the fully discrete scheme ``jumps[i, j]`` stores the optimal integer jump
    ``(k, l)`` into node ``(i, j)``.
    """

    alpha: np.ndarray
    jumps: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.alpha.shape[0]


def admissible_jumps(N: int, ddp_k: float = 0.75, ddp_r: float = 0.5, full: bool = False) -> list[tuple[int, int]]:
    """Integer jumps ``(k, l) != (0, 0)`` with ``|(k, l)| <= ddp_k N**ddp_r``, in lexicographic order.

    ``full`` admits every jump inside the grid. The unit jumps (1,0), (0,1), (1,1)
    are always included so the set keeps a consistent stencil on coarse grids.
    """
    if full:
        return [(k, l) for k in range(N + 1) for l in range(N + 1) if (k, l) != (0, 0)]
    radius = ddp_k * N ** ddp_r
    R = int(math.floor(radius))
    jumps = {(k, l) for k in range(R + 1) for l in range(R + 1)
             if (k, l) != (0, 0) and k * k + l * l <= radius * radius + 1e-12}
    jumps |= {(1, 0), (0, 1), (1, 1)}
    return sorted(j for j in jumps if j[0] <= N and j[1] <= N)


def _diagonal(s: int, N: int):
    i = np.arange(max(1, s - N), min(N, s - 1) + 1)
    return i, s - i


def _sweep_semi(hf: np.ndarray, cfg: SchemeConfig):
    N = hf.shape[0] - 1
    h = 1.0 / N
    U = np.zeros((N + 1, N + 1))
    alpha = np.zeros((N, N, 2))
    accepted = 0
    filtered = cfg.scheme.startswith("FILTERED")
    rep = cfg.representation
    update = None if filtered else MONOTONE_UPDATES[_SEMI[cfg.scheme]]
    for s in range(2, 2 * N + 1):
        i, j = _diagonal(s, N)
        u00, u01, u10, f = U[i - 1, j - 1], U[i - 1, j], U[i, j - 1], hf[i, j]
        if filtered:
            val, a, acc = update_filtered(u00, u01, u10, f, h, rep, cfg.filter_base, cfg.filter_k)
            accepted += int(np.count_nonzero(acc))
        else:
            val, a = update(u00, u01, u10, f)
        U[i, j] = val
        alpha[i - 1, j - 1] = a
    stats = {"nodes": N * N}
    if filtered:
        stats["filter_accepted"] = accepted
        stats["filter_accept_rate"] = accepted / (N * N)
    return ValueField(U, rep, stats), PolicyField(alpha)


def update_ddp(U: np.ndarray, i: int, j: int, forcing: Forcing, jumps) -> tuple[float, tuple[int, int]]:
    """Single-node fully discrete update: ``max over (k, l) of U[i-k, j-l] + w_kl(i, j)``.

    Boundary nodes return ``(0, (0, 0))``. Ties keep the first jump in ``jumps``.
    """
    if i == 0 or j == 0:
        return 0.0, (0, 0)
    best, arg = -math.inf, (0, 0)
    for k, l in jumps:
        if k > i or l > j:
            continue
        cand = U[i - k, j - l] + float(forcing.jump_weight(k, l, np.array([i]), np.array([j]))[0])
        if cand > best:
            best, arg = cand, (k, l)
    return best, arg


def _sweep_ddp(forcing: Forcing, cfg: SchemeConfig):
    N = forcing.N
    jumps = admissible_jumps(N, cfg.ddp_k, cfg.ddp_r, cfg.ddp_full)
    U = np.zeros((N + 1, N + 1))
    best_jump = np.zeros((N + 1, N + 1, 2), dtype=int)
    for s in range(2, 2 * N + 1):
        i, j = _diagonal(s, N)
        best = np.full(i.shape, -np.inf)
        bk = np.zeros(i.shape, dtype=int)
        bl = np.zeros(i.shape, dtype=int)
        for k, l in jumps:
            if k + l > s:
                continue
            ok = (i >= k) & (j >= l)
            if not ok.any():
                continue
            ii, jj = i[ok], j[ok]
            cand = U[ii - k, jj - l] + forcing.jump_weight(k, l, ii, jj)
            # strict comparison keeps the lexicographically smallest jump on ties
            better = cand > best[ok]
            idx = np.flatnonzero(ok)[better]
            best[idx] = cand[better]
            bk[idx] = k
            bl[idx] = l
        U[i, j] = best
        best_jump[i, j, 0] = bk
        best_jump[i, j, 1] = bl
    kl = best_jump[1:, 1:].astype(float)
    alpha = kl / np.maximum(kl.max(axis=-1, keepdims=True), 1.0)
    stats = {"nodes": N * N, "n_jumps": len(jumps)}
    return ValueField(U, "u", stats), PolicyField(alpha, best_jump)


def solve_forcing(forcing: Forcing, cfg: SchemeConfig) -> tuple[ValueField, PolicyField]:
    """Solve on the grid implied by ``forcing`` (``N = forcing.N``)."""
    if cfg.scheme == "DDP":
        return _sweep_ddp(forcing, cfg)
    return _sweep_semi(forcing.hf, cfg)


def solve(problem, grid: GridSpec | int, cfg: SchemeConfig | None = None) -> tuple[ValueField, PolicyField]:
    """Solve the registration problem (a ``CurvePair`` or ``FieldProblem``) on ``grid``."""
    cfg = cfg or SchemeConfig()
    grid = grid if isinstance(grid, GridSpec) else GridSpec(int(grid))
    if isinstance(problem, CurvePair) and problem.f_source != cfg.f_source:
        problem = problem.with_source(cfg.f_source)
    forcing = problem.forcing(grid.N)
    return solve_forcing(forcing, cfg)


def stability_bound(cfg: SchemeConfig, max_f: float) -> float:
    """Upper bound for ``u_h``: ``2 max f A_max`` (semi-discrete) or ``max f`` (DDP)."""
    if cfg.scheme == "DDP":
        return max_f
    return 2.0 * max_f * cfg.a_max
