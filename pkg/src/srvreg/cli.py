"""Command line interface: ``srvreg {distance,register,geodesic,converge,localmax}``.

Curves are CSV files of points (one per line, optional ``#`` comments and a
header line) or bundled samples written as ``@name``, e.g. ``@semicircle_psi1``.
Exit codes: 0 ok, 2 bad input, 3 numerical failure, 4 bad configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import samples
from .diagnostics import backtrack_through, run_convergence, total_value
from .errors import ConfigError, CurveError, SrvregError
from .io import read_curve_csv, write_grid_binary, write_grid_csv
from .pipeline import eval_Jh_field, objective, register, registration_geodesic
from .problems import CurvePair, constant_problem
from .registration import write_path_csv
from .geodesics import write_geodesic
from .solver import SCHEMES, SchemeConfig

FIELDS = {"const": lambda: constant_problem(1.0)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def load_curve(source: str, param_column: bool = False, M: int = samples.DEFAULT_M):
    if source.startswith("@"):
        try:
            return samples.get(source[1:], M)
        except KeyError as exc:
            raise CurveError(exc.args[0]) from None
    return read_curve_csv(source, param_column)


def _threads(args) -> int:
    raw = args.threads if args.threads is not None else os.environ.get("SRVREG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"--threads / SRVREG_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("--threads must be at least 1")
    return n


def _config(args) -> SchemeConfig:
    return SchemeConfig(args.scheme, ddp_k=args.ddp_k, ddp_r=args.ddp_r, filter_k=args.filter_k,
                        f_source=args.f_source)


def _problem(args):
    if getattr(args, "field", None):
        if args.curves:
            raise ConfigError("give either two curves or --field, not both")
        return FIELDS[args.field]()
    if len(args.curves) != 2:
        raise ConfigError("expected exactly two curves")
    c1 = load_curve(args.curves[0], args.param_column)
    c2 = load_curve(args.curves[1], args.param_column)
    return CurvePair(c1, c2, args.f_source)


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _emit(payload: dict, args, name: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        with open(os.path.join(_out_dir(args), name), "w") as fh:
            fh.write(text + "\n")


def _dump_grid(args, result) -> list[str]:
    if not args.dump_grid:
        return []
    if args.dump_grid.endswith(".bin"):
        write_grid_binary(result.value, args.dump_grid)
    else:
        with open(args.dump_grid, "w") as fh:
            write_grid_csv(result.value, result.policy, fh)
    return [args.dump_grid]


def _objective(path, problem, cfg):
    if isinstance(problem, CurvePair):
        return objective(path, problem, cfg)
    return eval_Jh_field(path, problem)


def cmd_distance(args) -> dict:
    problem, cfg = _problem(args), _config(args)
    t0 = time.perf_counter()
    res = register(problem, args.grid_n, cfg)
    wall_ms = 1e3 * (time.perf_counter() - t0)
    _dump_grid(args, res)
    payload = {
        "scheme": cfg.scheme, "N": args.grid_n, "u_at_one": res.u_at_one, "J_h": res.Jh,
        "distance_from_u": res.distance_from_u, "distance_from_J": res.distance_from_J, "wall_ms": wall_ms,
    }
    _emit(payload, args, "distance.json")
    return payload


def cmd_register(args) -> dict:
    problem, cfg = _problem(args), _config(args)
    res = register(problem, args.grid_n, cfg)
    out = _out_dir(args)
    path_csv = os.path.join(out, "path.csv")
    with open(path_csv, "w") as fh:
        write_path_csv(res.path, fh)
    files = [path_csv] + _dump_grid(args, res)
    if not args.no_plots:
        from .plotting import plot_registration
        files.append(plot_registration(res.value.u, res.path.points, os.path.join(out, "registration.png"),
                                       f"{cfg.scheme}, N={args.grid_n}"))
    payload = {"scheme": cfg.scheme, "N": args.grid_n, "u_at_one": res.u_at_one, "J_h": res.Jh,
               "n_points": len(res.path), "path_csv": path_csv, "files": files}
    _emit(payload, args, "register.json")
    return payload


def cmd_geodesic(args) -> dict:
    problem, cfg = _problem(args), _config(args)
    if not isinstance(problem, CurvePair):
        raise ConfigError("geodesics need two curves")
    if args.tau < 2:
        raise ConfigError("--tau needs at least 2 samples")
    res = register(problem, args.grid_n, cfg)
    geo = registration_geodesic(res, problem, cfg, np.linspace(0.0, 1.0, args.tau))
    out = _out_dir(args)
    manifest = write_geodesic(geo, out)
    if not args.no_plots:
        from .plotting import plot_geodesic
        plot_geodesic(geo.curves, geo.tau_grid, os.path.join(out, "geodesic.png"),
                      f"distance {geo.distance:.4g}")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def cmd_converge(args) -> dict:
    problem, cfg = _problem(args), _config(args)
    schemes = [s.strip().upper() for s in args.schemes.split(",") if s.strip()]
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}")
    N_list = _int_list(args.n_list)
    ref_N = args.reference_n or max(N_list)
    exact_u = None
    if getattr(args, "field", None) == "const":
        exact_u = lambda a, b: np.sqrt(a * b)  # noqa: E731
    report = run_convergence(problem, schemes, N_list, ref_N, cfg, reference_scheme=args.reference_scheme,
                             exact_u=exact_u, workers=_threads(args))
    out = _out_dir(args)
    with open(os.path.join(out, "convergence.csv"), "w") as fh:
        report.write_csv(fh)
    with open(os.path.join(out, "convergence.json"), "w") as fh:
        report.write_json(fh)
    if not args.no_plots:
        from .plotting import plot_convergence
        plot_convergence(report, os.path.join(out, "convergence.png"))
    payload = report.to_json()
    print(json.dumps(payload, indent=2, sort_keys=True))
    return payload


def cmd_localmax(args) -> dict:
    problem, cfg = _problem(args), _config(args)
    N = args.grid_n
    tv = total_value(problem, N, cfg, args.plateau_tol)
    tol = args.plateau_tol if args.plateau_tol is not None else 1e-3 * float(tv.u_tot.max())
    maxima, paths = [], []
    for i, j in tv.maxima:
        p = backtrack_through((i / N, j / N), tv.fwd_policy, tv.rev_policy)
        paths.append(p.points)
        maxima.append({"i": i, "j": j, "x1": i / N, "x2": j / N, "u_tot": float(tv.u_tot[i, j]),
                       "J_h": _objective(p, problem, cfg)})
    payload = {"scheme": cfg.scheme, "N": N, "max_u_tot": float(tv.u_tot.max()),
               "u_fwd_at_one": float(tv.u_fwd[-1, -1]), "plateau_tol": tol, "maxima": maxima}
    out = _out_dir(args)
    if not args.no_plots:
        from .plotting import plot_local_maxima
        plot_local_maxima(tv.u_tot, tv.maxima, os.path.join(out, "localmax.png"), paths)
    _emit(payload, args, "localmax.json")
    return payload


COMMANDS = {"distance": cmd_distance, "register": cmd_register, "geodesic": cmd_geodesic,
            "converge": cmd_converge, "localmax": cmd_localmax}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("curves", nargs="*", help="two curve CSV files or bundled names like @semicircle")
    common.add_argument("--scheme", default="VINF", type=str.upper, choices=SCHEMES,
                        help="solver scheme (default: %(default)s)")
    common.add_argument("--grid-n", type=int, default=320, help="cells per axis (default: %(default)s)")
    common.add_argument("--ddp-k", type=float, default=0.75, help="jump radius factor k (default: %(default)s)")
    common.add_argument("--ddp-r", type=float, default=0.5, help="jump radius exponent r (default: %(default)s)")
    common.add_argument("--filter-k", type=float, default=1.0, help="filter threshold factor (default: %(default)s)")
    common.add_argument("--f-source", choices=("exact", "fd"), default="fd",
                        help="forcing from SRV samples or from curve differences (default: %(default)s)")
    common.add_argument("--param-column", action="store_true", help="first CSV column holds parameter values")
    common.add_argument("--field", choices=sorted(FIELDS), help="use a built-in forcing field instead of curves")
    common.add_argument("--out", help="output directory (JSON, CSV and figures)")
    common.add_argument("--threads", type=int, help="worker threads (default: $SRVREG_THREADS or 1)")
    common.add_argument("--dump-grid", help="write the value grid (CSV, or binary if the name ends in .bin)")
    common.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    parser = _Parser(prog="srvreg", description="Registration and shape distance of open curves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("distance", parents=[common], help="shape distance as JSON")
    sub.add_parser("register", parents=[common], help="optimal reparametrisation path")
    g = sub.add_parser("geodesic", parents=[common], help="geodesic curves, one CSV per tau")
    g.add_argument("--tau", type=int, default=7, help="number of tau samples (default: %(default)s)")
    c = sub.add_parser("converge", parents=[common], help="convergence / work-precision study")
    c.add_argument("--schemes", default="U1,UINF,V1,VINF", help="comma-separated schemes")
    c.add_argument("--n-list", default="20,40,80", help="comma-separated grid sizes")
    c.add_argument("--reference-n", type=int, help="reference grid size (default: largest N)")
    c.add_argument("--reference-scheme", default="FILTERED_V", type=str.upper, choices=SCHEMES)
    lm = sub.add_parser("localmax", parents=[common], help="local maxima of the total value function")
    lm.add_argument("--plateau-tol", type=float, help="default: 1e-3 * max u_tot")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.grid_n < 2:
            raise ConfigError("--grid-n must be at least 2")
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            COMMANDS[args.command](args)
    except SrvregError as exc:
        print(f"srvreg: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
