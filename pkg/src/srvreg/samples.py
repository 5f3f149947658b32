"""Synthetic test curves bundled with the package."""
from __future__ import annotations

import numpy as np

from .curves import SampledCurve, apply_reparam, arc_length_parametrise, psi1, psi2

DEFAULT_M = 2000


def segment(M: int = DEFAULT_M, direction=(1.0, 0.0)) -> SampledCurve:
    t = np.linspace(0.0, 1.0, M + 1)
    return SampledCurve(np.outer(t, np.asarray(direction, dtype=float)))


def semicircle(M: int = DEFAULT_M) -> SampledCurve:
    t = np.linspace(0.0, 1.0, M + 1)
    return SampledCurve(np.column_stack([np.cos(np.pi * t), np.sin(np.pi * t)]))


def s_curve(M: int = DEFAULT_M) -> SampledCurve:
    """Arc-length parametrised sine wave ``y = 0.3 sin(2 pi x)``."""
    t = np.linspace(0.0, 1.0, 4 * M + 1)
    raw = SampledCurve(np.column_stack([t, 0.3 * np.sin(2 * np.pi * t)]))
    return arc_length_parametrise(raw, M)


def hook(M: int = DEFAULT_M) -> SampledCurve:
    """Arc-length parametrised quarter-turn spiral, used as a non-matching partner."""
    t = np.linspace(0.0, 1.0, 4 * M + 1)
    r = 1.0 - 0.5 * t
    ang = 1.5 * np.pi * t
    raw = SampledCurve(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
    return arc_length_parametrise(raw, M)


BASE = {"segment": segment, "semicircle": semicircle, "scurve": s_curve, "hook": hook}


def mobius_pair(base: SampledCurve) -> tuple[SampledCurve, SampledCurve]:
    """``(c o psi1, c o psi2)``: equal shapes with mutually inverse parametrisations."""
    return apply_reparam(base, psi1), apply_reparam(base, psi2)


def get(name: str, M: int = DEFAULT_M) -> SampledCurve:
    """Look up a bundled curve by name; ``<base>_psi1`` / ``<base>_psi2`` give the reparametrised variants."""
    base, _, suffix = name.partition("_")
    if base not in BASE:
        raise KeyError(f"unknown sample curve {name!r}; available: {', '.join(names())}")
    c = BASE[base](M)
    if suffix == "":
        return c
    if suffix == "psi1":
        return apply_reparam(c, psi1)
    if suffix == "psi2":
        return apply_reparam(c, psi2)
    raise KeyError(f"unknown sample curve {name!r}")


def names() -> list[str]:
    return [n + s for n in BASE for s in ("", "_psi1", "_psi2")]
