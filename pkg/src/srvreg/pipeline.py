"""Solve, backtrack and evaluate in one call."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .geodesics import GeodesicResult, geodesic, shape_distance
from .problems import CurvePair, FieldProblem
from .registration import ReparamPath, backtrack, eval_Jh, eval_Jh_curves
from .solver import GridSpec, PolicyField, SchemeConfig, ValueField, solve


@dataclass
class RegistrationResult:
    scheme: str
    N: int
    value: ValueField
    policy: PolicyField
    path: ReparamPath
    Jh: float
    solve_seconds: float

    @property
    def u_at_one(self) -> float:
        return self.value.u_at_one

    @property
    def distance_from_u(self) -> float:
        return shape_distance(self.u_at_one)

    @property
    def distance_from_J(self) -> float:
        return shape_distance(self.Jh)


def eval_Jh_field(path: ReparamPath, problem: FieldProblem) -> float:
    """Objective for a problem given only by its forcing function."""
    p = path.points
    inc = np.clip(np.diff(p, axis=0), 0.0, None)
    f = np.asarray(problem.f(p[1:, 0], p[1:, 1]), dtype=float)
    return float(np.sum(f * np.sqrt(inc[:, 0] * inc[:, 1])))


def objective(path: ReparamPath, problem, cfg: SchemeConfig) -> float:
    if isinstance(problem, CurvePair):
        if cfg.f_source == "fd":
            return eval_Jh_curves(path, problem.c1, problem.c2)
        return eval_Jh(path, problem.q1, problem.q2)
    return eval_Jh_field(path, problem)


def register(problem, N: int, cfg: SchemeConfig | None = None) -> RegistrationResult:
    cfg = cfg or SchemeConfig()
    grid = GridSpec(N)
    t0 = time.perf_counter()
    value, policy = solve(problem, grid, cfg)
    elapsed = time.perf_counter() - t0
    path = backtrack(policy)
    path.check(N)
    return RegistrationResult(cfg.scheme, N, value, policy, path, objective(path, problem, cfg), elapsed)


def registration_geodesic(result: RegistrationResult, problem: CurvePair, cfg: SchemeConfig,
                          tau_grid=None) -> GeodesicResult:
    if cfg.f_source == "fd":
        return geodesic(result.path, problem.q1, problem.q2, result.Jh, tau_grid, problem.c1, problem.c2)
    return geodesic(result.path, problem.q1, problem.q2, result.Jh, tau_grid)
