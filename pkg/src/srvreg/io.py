"""Reading curve files and writing grid dumps."""
from __future__ import annotations

import struct

import numpy as np

from .curves import SampledCurve
from .errors import CurveError
from .solver import PolicyField, ValueField

GRID_MAGIC = b"SRVUGRID"
_HEADER = struct.Struct("<8sQ")


def parse_curve_csv(text: str, source: str = "<string>", param_column: bool = False) -> SampledCurve:
    """Parse comma-separated points, one per line.

    Lines starting with ``#`` and blank lines are skipped; a first line that is
    not numeric is treated as a header. With ``param_column`` the first column
    holds the parameter values ``t``.
    """
    rows, width, first = [], None, True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [s.strip() for s in line.split(",")]
        try:
            vals = [float(s) for s in fields]
        except ValueError:
            if first:
                first = False
                continue
            raise CurveError(f"{source}:{lineno}: non-numeric value in {raw!r}") from None
        first = False
        if not all(np.isfinite(vals)):
            raise CurveError(f"{source}:{lineno}: non-finite value in {raw!r}")
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise CurveError(f"{source}:{lineno}: expected {width} columns, found {len(vals)}")
        rows.append(vals)
    min_width = 2 if param_column else 1
    if width is None or width < min_width:
        raise CurveError(f"{source}: no curve points found")
    data = np.array(rows, dtype=float)
    if len(data) < 2:
        raise CurveError(f"{source}: a curve needs at least two points")
    try:
        if param_column:
            return SampledCurve(data[:, 1:], data[:, 0])
        return SampledCurve(data)
    except ValueError as exc:
        raise CurveError(f"{source}: {exc}") from None


def read_curve_csv(path: str, param_column: bool = False) -> SampledCurve:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CurveError(f"cannot read curve file {path!r}: {exc.strerror}") from None
    return parse_curve_csv(text, path, param_column)


def write_curve_csv(curve: SampledCurve, fh, with_params: bool = False) -> None:
    data = np.column_stack([curve.params, curve.points]) if with_params else curve.points
    np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def write_grid_csv(value: ValueField, policy: PolicyField, fh) -> None:
    """Rows ``i,j,u,alpha1,alpha2``; nodes on the lower/left boundary get alpha 0."""
    u = value.u
    N = value.N
    alpha = np.zeros((N + 1, N + 1, 2))
    alpha[1:, 1:] = policy.alpha
    I, J = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    fh.write("i,j,u,alpha1,alpha2\n")
    for i, j, uv, a1, a2 in zip(I.ravel(), J.ravel(), u.ravel(), alpha[..., 0].ravel(), alpha[..., 1].ravel()):
        fh.write(f"{i},{j},{uv:.17g},{a1:.17g},{a2:.17g}\n")


def write_grid_binary(value: ValueField, path: str) -> None:
    """Little-endian header (magic, uint64 N) followed by ``u`` as row-major float64."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(GRID_MAGIC, value.N))
        fh.write(np.ascontiguousarray(value.u, dtype="<f8").tobytes())


def read_grid_binary(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CurveError(f"{path}: truncated grid header")
        magic, N = _HEADER.unpack(head)
        if magic != GRID_MAGIC:
            raise CurveError(f"{path}: not a grid dump")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != (N + 1) ** 2:
        raise CurveError(f"{path}: expected {(N + 1) ** 2} values, found {data.size}")
    return data.reshape(N + 1, N + 1)
