"""Registration problems and their discretised forcing terms.

A problem knows how to produce, for a grid with ``N`` cells per axis, the
node values ``h f(x_i, x_j)`` used by the semi-discrete schemes and the jump
weights ``h f(x) sqrt(k l)`` used by the fully discrete scheme.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curves import SampledCurve, SrvField, difference_factors, srvt
from .errors import ConfigError, DegenerateDifferenceWarning

F_SOURCES = ("exact", "fd")


class Forcing:
    """Forcing on a fixed grid. ``hf`` has shape (N+1, N+1); row/column 0 are unused."""

    def __init__(self, hf: np.ndarray):
        self.hf = np.asarray(hf, dtype=float)
        self.N = self.hf.shape[0] - 1

    def jump_weight(self, k: int, l: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """``h f(x_ij) sqrt(k l)`` at nodes ``(i, j)``."""
        if k == 0 or l == 0:
            return np.zeros(np.shape(i))
        return self.hf[i, j] * np.sqrt(k * l)

    def max_f(self) -> float:
        return float(self.hf[1:, 1:].max(initial=0.0)) * self.N


class FactoredForcing(Forcing):
    """Forcing of the form ``max(<a_k(x_i), b_l(x_j)>, 0)`` with per-span factors."""

    def __init__(self, factor1: Callable[[int], np.ndarray], factor2: Callable[[int], np.ndarray], N: int):
        self._f1, self._f2 = factor1, factor2
        self._cache1: dict[int, np.ndarray] = {}
        self._cache2: dict[int, np.ndarray] = {}
        a, b = self.factors(1, 1)
        super().__init__(np.maximum(a @ b.T, 0.0))
        self.hf[0, :] = 0.0
        self.hf[:, 0] = 0.0

    def factors(self, k: int, l: int):
        if k not in self._cache1:
            self._cache1[k] = self._f1(k)
        if l not in self._cache2:
            self._cache2[l] = self._f2(l)
        return self._cache1[k], self._cache2[l]

    def jump_weight(self, k, l, i, j):
        if k == 0 or l == 0:
            return np.zeros(np.shape(i))
        a, b = self.factors(k, l)
        return np.maximum(np.einsum("nd,nd->n", a[i], b[j]), 0.0)


@dataclass
class FieldProblem:
    """Problem defined directly by a non-negative forcing function ``f(x1, x2)``."""

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "field"

    def forcing(self, N: int) -> Forcing:
        x = np.arange(N + 1) / N
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        fv = np.broadcast_to(np.asarray(self.f(X1, X2), dtype=float), X1.shape).copy()
        if np.any(fv < 0):
            raise ConfigError("forcing must be non-negative")
        fv[0, :] = 0.0
        fv[:, 0] = 0.0
        return Forcing(fv / N)

    def reversed(self) -> "FieldProblem":
        return FieldProblem(lambda a, b: self.f(1 - a, 1 - b), name=f"{self.name}-reversed")


def constant_problem(value: float = 1.0) -> FieldProblem:
    """``f == value``; for value 1 the value function is ``sqrt(x1 x2)``."""
    return FieldProblem(lambda a, b: np.full(np.broadcast(a, b).shape, float(value)), name=f"const{value:g}")


def random_smooth_problem(rng: np.random.Generator, n_bumps: int = 4) -> FieldProblem:
    """Non-negative sum of random Gaussian bumps plus a random floor."""
    centres = rng.uniform(0, 1, size=(n_bumps, 2))
    widths = rng.uniform(0.1, 0.4, size=n_bumps)
    amps = rng.uniform(0.2, 1.0, size=n_bumps)
    floor = rng.uniform(0.0, 0.3)

    def f(a, b):
        out = np.full(np.broadcast(a, b).shape, floor)
        for (cx, cy), w, A in zip(centres, widths, amps):
            out = out + A * np.exp(-((a - cx) ** 2 + (b - cy) ** 2) / (2 * w * w))
        return out

    return FieldProblem(f, name="random")


@dataclass
class CurvePair:
    """Two open curves to register.

    ``f_source='fd'`` builds the forcing from backward differences of the
    curves; ``'exact'`` evaluates the SRV fields (computed on each curve's own
    parameter grid) at the grid nodes.
    """

    c1: SampledCurve
    c2: SampledCurve
    f_source: str = "fd"
    name: str = "curves"
    q1: SrvField = field(init=False, repr=False)
    q2: SrvField = field(init=False, repr=False)

    def __post_init__(self):
        if self.f_source not in F_SOURCES:
            raise ConfigError(f"f_source must be one of {F_SOURCES}, got {self.f_source!r}")
        if self.c1.dim != self.c2.dim:
            raise ConfigError("curves must live in the same dimension")
        self.c1.check_immersion()
        self.c2.check_immersion()
        self.q1 = srvt(self.c1)
        self.q2 = srvt(self.c2)

    def forcing(self, N: int) -> FactoredForcing:
        h = 1.0 / N
        x = np.arange(N + 1) * h
        if self.f_source == "exact":
            q1x, q2x = self.q1(x), self.q2(x)
            return FactoredForcing(lambda k: np.sqrt(k * h) * q1x, lambda l: np.sqrt(l * h) * q2x, N)
        degenerate = []

        def fac(c):
            def make(k):
                out, bad = difference_factors(c, N, k)
                degenerate.append(bad)
                return out
            return make

        forcing = FactoredForcing(fac(self.c1), fac(self.c2), N)
        if sum(degenerate):
            warnings.warn(
                f"{sum(degenerate)} zero-length backward difference(s); forcing set to 0 there",
                DegenerateDifferenceWarning,
            )
        return forcing

    def with_source(self, f_source: str) -> "CurvePair":
        return CurvePair(self.c1, self.c2, f_source, name=self.name)

    def reversed(self) -> "CurvePair":
        """The same pair traversed backwards; its forcing is the reflection ``f(1-x1, 1-x2)``."""
        r1 = SampledCurve(self.c1.points[::-1], 1.0 - self.c1.params[::-1])
        r2 = SampledCurve(self.c2.points[::-1], 1.0 - self.c2.params[::-1])
        return CurvePair(r1, r2, self.f_source, name=f"{self.name}-reversed")
