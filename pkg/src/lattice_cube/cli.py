"""
Command-line front end.

Subcommands::

    lattice-cube integrate        --integrand NAME [--params JSON] --tol EPS
    lattice-cube replicate-asian  --reps R --dims 1,2,4,8,16 --sigma-range 0.1,0.7
    lattice-cube build-vector     --dim D --m-max M [--embedded-from M0] --out FILE
    lattice-cube diagnose         --integrand NAME ... (per-level block sums as CSV)

Exit codes: 0 converged (or success), 2 budget exhausted, 1 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from importlib import resources
from pathlib import Path

from . import __version__
from .cbc import WeightSpec, cbc_construct, write_construction
from .cone import ConeSpec, GeometricInflation
from .engine import CubatureRequest, integrate, integrate_traced
from .errors import LatticeCubeError
from .integrands import make_integrand
from .kappa import block_bounds
from .lattice import GeneratingVector, read_vector
from .replicate import CSV_COLUMNS, replicate_asian

SCHEMA = "lattice-cube/v1"
DEFAULT_VECTOR = "lattice_b2_m20_d64.txt"
VECTOR_DIR_ENV = "LATTICE_CUBE_VECTOR_DIR"

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def default_vector_path() -> Path:
    env = os.environ.get(VECTOR_DIR_ENV)
    if env:
        candidate = Path(env) / DEFAULT_VECTOR
        if candidate.is_file():
            return candidate
    return Path(str(resources.files("lattice_cube") / "data" / DEFAULT_VECTOR))


def load_vector(path: str | None) -> tuple[GeneratingVector, Path]:
    p = Path(path) if path else default_vector_path()
    try:
        return read_vector(p), p
    except OSError as exc:
        raise UsageError(f"cannot read vector file {p}: {exc.strerror}") from None


def _floats(text: str, n: int, name: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{name} must be {n} comma-separated numbers")
    return vals


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return cfg


def _setting(args, cfg: dict, name: str, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return cfg.get(name, default)


def build_cone(args, cfg: dict) -> ConeSpec:
    ell_star = int(_setting(args, cfg, "ell_star", 6))
    lag = int(_setting(args, cfg, "lag", 4))
    c = _setting(args, cfg, "cone_c", "5,2")
    scale, ratio = _floats(c, 2, "--cone-c") if isinstance(c, str) else map(float, c)
    if scale <= 0 or ratio <= 0:
        raise UsageError("--cone-c scale and base must be positive")
    try:
        return ConeSpec(ell_star, lag, GeometricInflation(scale, ratio))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_common(p: argparse.ArgumentParser, integrand: bool = True) -> None:
    if integrand:
        p.add_argument("--integrand", help="registered integrand name")
        p.add_argument("--params", help="JSON parameter block for the integrand")
        p.add_argument("--dim", "-d", type=int, help="integration dimension")
        p.add_argument("--periodization", choices=("none", "tent"))
    p.add_argument("--tol", type=float, help="absolute error tolerance")
    p.add_argument("--vector", help=f"generating-vector file (default: ${VECTOR_DIR_ENV} "
                                    "or the packaged vector)")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--cone-c", dest="cone_c", help="inflation C(m) = scale * base**-m as 'scale,base'")
    p.add_argument("--ell-star", dest="ell_star", type=int)
    p.add_argument("--lag", type=int, help="lag r")
    p.add_argument("--m-budget", dest="m_budget", type=int, help="maximum level")
    p.add_argument("--config", help="JSON file with defaults for any of these options")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lattice-cube", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="integrate a registered integrand")
    _add_common(p)

    p = sub.add_parser("diagnose", help="per-level block sums of the ordered coefficients")
    _add_common(p)

    p = sub.add_parser("replicate-asian", help="randomized geometric Asian call experiment")
    _add_common(p, integrand=False)
    p.add_argument("--reps", type=int)
    p.add_argument("--dims", help="comma-separated dimensions to draw from")
    p.add_argument("--sigma-range", dest="sigma_range", help="'lo,hi' volatility range")
    p.add_argument("--periodization", choices=("none", "tent"))
    p.add_argument("--workers", type=int)
    p.add_argument("--summary", help="summary JSON path (default <out>.summary.json or stderr)")

    p = sub.add_parser("build-vector", help="component-by-component generating vector")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--m-max", dest="m_max", type=int, required=True)
    p.add_argument("--dim", "-d", type=int, required=True)
    p.add_argument("--embedded-from", dest="embedded_from", type=int,
                   help="score candidates over all sizes b**M0..b**m_max")
    p.add_argument("--method", choices=("auto", "fast", "direct"), default="auto")
    p.add_argument("--out", required=True, help="vector file; the log goes to <out>.log.json")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _request(args, cfg):
    name = _setting(args, cfg, "integrand")
    if not name:
        raise UsageError("--integrand is required")
    d = int(_setting(args, cfg, "dim", 1))
    tol = _setting(args, cfg, "tol")
    if tol is None:
        raise UsageError("--tol is required")
    tol = float(tol)
    if not tol > 0:
        raise UsageError("--tol must be positive")
    params = _setting(args, cfg, "params")
    periodization = _setting(args, cfg, "periodization", "none")
    try:
        f = make_integrand(name, params, d, periodization)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"integrand: {exc}") from None
    gv, vpath = load_vector(_setting(args, cfg, "vector"))
    cone = build_cone(args, cfg)
    seed = _setting(args, cfg, "seed")
    if seed is None:
        seed = 0
    try:
        req = CubatureRequest(f, d, tol, gv, cone, seed=int(seed),
                              m_budget=_setting(args, cfg, "m_budget"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta = {
        "schema": SCHEMA,
        "integrand": name,
        "params": json.loads(params) if isinstance(params, str) else params,
        "periodization": periodization,
        "dimension": d,
        "tolerance": tol,
        "vector": {"path": str(vpath), "hash": gv.digest(), "base": gv.base,
                   "max_level": gv.max_level},
        "cone": cone.to_dict(),
    }
    return req, meta


def cmd_integrate(args, cfg) -> int:
    req, meta = _request(args, cfg)
    res = integrate(req)
    doc = dict(meta, command="integrate")
    body = res.to_dict()
    body["n"] = body.pop("n_samples")
    doc.update(body)
    fmt = _setting(args, cfg, "format", "json")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["m", "s_tilde", "bound"])
        for t in res.trace:
            w.writerow([t.m, repr(t.s_tilde), repr(t.bound)])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK if res.converged else EXIT_BUDGET


def diagnose_rows(res, snapshots, base: int) -> list[tuple[int, int, float]]:
    rows = []
    for entry, mags in zip(res.trace, snapshots):
        for ell in range(entry.m + 1):
            lo, hi = block_bounds(ell, base)
            rows.append((entry.m, ell, float(mags[lo:hi].sum())))
    return rows


def cmd_diagnose(args, cfg) -> int:
    req, meta = _request(args, cfg)
    res, snaps = integrate_traced(req)
    rows = diagnose_rows(res, snaps, req.gv.base)
    fmt = _setting(args, cfg, "format", "csv")
    if fmt == "json":
        doc = dict(meta, command="diagnose", converged=res.converged, seed=res.seed,
                   rows=[{"m": m, "ell": l, "s_tilde": s} for m, l, s in rows])
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["m", "ell", "s_tilde"])
        for m, ell, s in rows:
            w.writerow([m, ell, repr(s)])
        _emit(buf.getvalue(), args.out)
    return EXIT_OK if res.converged else EXIT_BUDGET


def cmd_replicate(args, cfg) -> int:
    gv, vpath = load_vector(_setting(args, cfg, "vector"))
    cone = build_cone(args, cfg)
    reps = int(_setting(args, cfg, "reps", 100))
    if reps < 1:
        raise UsageError("--reps must be >= 1")
    dims = _setting(args, cfg, "dims", "1,2,4,8,16")
    dims = [int(x) for x in dims.split(",")] if isinstance(dims, str) else list(dims)
    sr = _setting(args, cfg, "sigma_range", "0.1,0.7")
    sr = _floats(sr, 2, "--sigma-range") if isinstance(sr, str) else list(sr)
    if not 0 < sr[0] <= sr[1]:
        raise UsageError("--sigma-range must lie in (0, inf)")
    tol = float(_setting(args, cfg, "tol", 0.02))
    if not tol > 0:
        raise UsageError("--tol must be positive")
    try:
        rows, summary = replicate_asian(
            gv, reps, dims, tuple(sr), tol, cone,
            seed=int(_setting(args, cfg, "seed", 0)),
            periodization=_setting(args, cfg, "periodization", "none"),
            workers=int(_setting(args, cfg, "workers", 1)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = dict({"schema": SCHEMA, "command": "replicate-asian", "vector_path": str(vpath)},
                   **summary)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([d[c] for c in CSV_COLUMNS])
    _emit(buf.getvalue(), args.out)
    text = json.dumps(summary, indent=1) + "\n"
    if args.summary:
        Path(args.summary).write_text(text)
    elif args.out:
        Path(args.out).with_suffix(".summary.json").write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_build_vector(args, cfg) -> int:
    log: list = []
    weights = WeightSpec.inverse_square(args.dim)
    try:
        gv = cbc_construct(args.base, args.m_max, args.dim, weights, method=args.method,
                           log=log, embedded_from=args.embedded_from)
    except (ValueError, LatticeCubeError) as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    write_construction(gv, log, out, out.with_suffix(".log.json"), weights,
                       embedded_from=args.embedded_from)
    return EXIT_OK


COMMANDS = {
    "integrate": cmd_integrate,
    "diagnose": cmd_diagnose,
    "replicate-asian": cmd_replicate,
    "build-vector": cmd_build_vector,
}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(getattr(args, "config", None))
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"lattice-cube: error: {exc}\n")
        return EXIT_USAGE
    except LatticeCubeError as exc:
        sys.stderr.write(f"lattice-cube: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
