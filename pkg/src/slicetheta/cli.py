"""Command-line front end: ``slicetheta {lattice-info, eval, verify}``.

Exit codes: 0 when everything passed, 1 when a residual check failed,
2 for usage, parse and domain errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .clifford import UnitVector
from .errors import ConvergenceError, DomainError
from .fueter import Quaternion, check_fueter_map, theta_monogenic_bounded, verify_monogenic_functional_eq
from .lattice import Lattice, parse_lattice
from .slice_algebra import Characteristic, SlicePoint
from .theta import (
    ThetaParams,
    discriminant_bounded,
    eta_tilde_bounded,
    theta_H,
    theta_Hr,
    theta_tilde,
    theta_tilde_tilde,
)
from .verify import (
    ResidualReport,
    verify_conjugated_trafo,
    verify_discriminant_trafo,
    verify_eta_trafo,
    verify_heat,
    verify_theta_trafo_H,
    verify_theta_trafo_Hr,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

IDENTITIES = (
    "theta-H",
    "theta-Hr",
    "conjugated",
    "eta",
    "discriminant",
    "heat",
    "monogenic-functional",
    "fueter-map",
)
FUNCTIONS = ("theta", "theta-null", "theta-tilde", "theta-tilde-tilde", "eta", "discriminant", "monogenic")
_QUATERNIONIC = {"monogenic-functional", "fueter-map"}


class UsageError(Exception):
    pass


# -- output ------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj: Any) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    return str(v)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- argument parsing ------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _bits(text: str) -> list[int]:
    try:
        bits = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated 0/1 bits, got {text!r}") from None
    if any(b not in (0, 1) for b in bits):
        raise argparse.ArgumentTypeError("qtilde bits must be 0 or 1")
    return bits


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lattice", help="preset (Z1..Zn, D4), inline rows '1,0;0,1' or a JSON file")
    p.add_argument("--normalization", choices=("gram_det", "sqrt_gram_det"), default="sqrt_gram_det")
    p.add_argument("--tail-tol", type=float, default=1e-12)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report to this file instead of stdout")


def _point_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("H", "Hr"), default="H")
    p.add_argument("--x0", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--omega", type=_floats, help="omega components, normalized if needed")
    p.add_argument("--w-u", type=_floats, help="real parts u of the characteristic")
    p.add_argument("--w-v", type=_floats, help="omega parts v of the characteristic")
    p.add_argument("--qtilde", type=_bits, help="coset bits m_i in {0,1} for qtilde = sum m_i Q_i / 2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicetheta", description="Slice monogenic theta series toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("lattice-info", help="lattice invariants and shell counts")
    _common(info)
    info.add_argument("--radius-sq", type=float, default=4.0, help="shell counts up to this squared norm")

    ev = sub.add_parser("eval", help="evaluate a theta-family function at one point")
    _common(ev)
    _point_flags(ev)
    ev.add_argument("--function", choices=FUNCTIONS, default="theta-null")

    ver = sub.add_parser("verify", help="check an identity at seeded random points")
    ver.add_argument("identity", choices=IDENTITIES)
    _common(ver)
    _point_flags(ver)
    ver.add_argument("--samples", type=int, default=10)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--fd-step", type=float, default=None, help="finite-difference step (heat 1e-3, Fueter 1e-2)")
    ver.add_argument("--tol", type=float, default=None, help="residual tolerance on top of the certified budgets")
    return parser


# -- shared helpers -------------------------------------------------------------------------


def _load_lattice(spec: str | None, default: str) -> Lattice:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return parse_lattice(spec or default)
    except json.JSONDecodeError as e:
        raise UsageError(f"lattice JSON: {e.msg} at line {e.lineno}, column {e.colno}") from None
    except (OSError, ValueError) as e:
        raise UsageError(f"lattice: {e}") from None


def _omega(raw: list[float] | None, n: int) -> UnitVector | None:
    if raw is None:
        return None
    if len(raw) != n:
        raise UsageError(f"--omega needs {n} components, got {len(raw)}")
    length = math.sqrt(sum(c * c for c in raw))
    if length == 0:
        raise UsageError("--omega must be nonzero")
    if abs(length - 1.0) > 1e-6:
        print(f"warning: |omega| = {length:.9g}, normalizing", file=sys.stderr)
    return UnitVector.normalized(raw)


def _vector_dim(lattice: Lattice) -> int:
    return max(lattice.dim - 1, 1)


def _characteristic(args, d: int) -> Characteristic:
    u = args.w_u if args.w_u is not None else [0.0] * d
    v = args.w_v if args.w_v is not None else [0.0] * d
    if len(u) != d or len(v) != d:
        raise UsageError(f"--w-u/--w-v need {d} components")
    return Characteristic(u, v)


def _qtilde(args, lattice: Lattice):
    if args.qtilde is None:
        return lattice.coset_rep([1] * lattice.dim)
    if len(args.qtilde) != lattice.dim:
        raise UsageError(f"--qtilde needs {lattice.dim} bits")
    return lattice.coset_rep(args.qtilde)


def _params(args, lattice: Lattice) -> ThetaParams:
    try:
        return ThetaParams(lattice, tail_tol=args.tail_tol, normalization=args.normalization)
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- lattice-info -------------------------------------------------------------------------------


def cmd_lattice_info(args) -> int:
    L = _load_lattice(args.lattice, "Z2")
    if args.radius_sq < 0:
        raise UsageError("--radius-sq must be non-negative")
    ps = L.point_set(args.radius_sq)
    norms, counts = np.unique(np.round(ps.norm_sq, 9), return_counts=True)
    report = {
        "dim": L.dim,
        "generators": L.generators.tolist(),
        "gram": L.gram.tolist(),
        "gram_det": L.gram_det,
        "covolume": L.covolume,
        "dual_generators": L.dual().generators.tolist(),
        "is_integral_norms": L.is_integral_norms(),
        "is_integral": L.is_integral(),
        "is_even": L.is_even(),
        "is_unimodular": L.is_unimodular(),
        "shells": [{"norm_sq": float(n), "count": int(c)} for n, c in zip(norms, counts)],
    }
    if args.format == "json":
        _write(dumps(report) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in report.items():
            w.writerow([k, _csv_cell(v) if not isinstance(v, (list, dict)) else dumps(v)])
        _write(buf.getvalue(), args.out)
    return EXIT_OK


# -- eval ----------------------------------------------------------------------------------------


def evaluate(args) -> dict:
    """The ``eval`` report as a dict; also used by the tests."""
    quaternionic = args.function == "monogenic"
    L = _load_lattice(args.lattice, "Z4" if quaternionic else "Z2")
    p = _params(args, L)
    x0 = 0.0 if args.x0 is None else args.x0
    r = (0.0 if args.model == "Hr" else 1.0) if args.r is None else args.r
    if r < 0:
        raise UsageError("--r must be non-negative")
    n = 3 if quaternionic else _vector_dim(L)
    omega = _omega(args.omega, n)
    if omega is None:
        if r == 0 and not quaternionic:
            raise UsageError("a real point (r = 0) needs an explicit --omega")
        omega = UnitVector.basis(1, n)
    x = SlicePoint(x0, r, omega)
    out = {"function": args.function, "model": args.model, "lattice": L.generators.tolist(), "x": [x0, r], "omega": omega.components.tolist()}

    if quaternionic:
        q = Quaternion(x0, *(r * omega.components))
        if L.dim != 4:
            raise UsageError("the monogenic theta function needs a 4-dimensional lattice")
        value, bound = theta_monogenic_bounded(q, L, args.tail_tol)
        out.update(value=value.array.tolist(), tail_bound=bound, terms_used=None)
        return out

    w = _characteristic(args, L.dim)
    f = args.function
    if f in ("theta", "theta-null"):
        if f == "theta-null":
            w = Characteristic.zero(L.dim)
        t = (theta_H if args.model == "H" else theta_Hr)(x, w, p)
        out.update(value=t.value.as_pair(), tail_bound=t.tail_bound, terms_used=t.terms_used)
        return out
    if args.model != "H":
        raise UsageError(f"{f} is defined on the H model only")
    qt = _qtilde(args, L)
    out["qtilde"] = list(qt.bits)
    if f in ("theta-tilde", "theta-tilde-tilde"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            t = (theta_tilde if f == "theta-tilde" else theta_tilde_tilde)(x, qt, p)
        out.update(value=t.value.as_pair(), tail_bound=t.tail_bound, terms_used=t.terms_used)
        return out
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value, bound = (eta_tilde_bounded if f == "eta" else discriminant_bounded)(x, qt, p)
    out.update(value=value.as_pair(), tail_bound=bound, terms_used=None)
    return out


def cmd_eval(args) -> int:
    out = evaluate(args)
    if args.format == "json":
        _write(dumps(out) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["function", "x0", "r", "value_re", "value_im", "tail_bound", "terms_used"])
        v = out["value"]
        w.writerow([out["function"], *map(_csv_cell, out["x"]), *map(_csv_cell, v[:2]), _csv_cell(out["tail_bound"]), out["terms_used"]])
        _write(buf.getvalue(), args.out)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    index: int
    x0: float
    r: float
    omega: np.ndarray
    u: np.ndarray
    v: np.ndarray
    bits: tuple[int, ...]


def _draw_samples(args, identity: str, L: Lattice) -> list[Sample]:
    rng = np.random.default_rng(args.seed)
    quaternionic = identity in _QUATERNIONIC
    n = 3 if quaternionic else _vector_dim(L)
    d = L.dim
    ranges = {
        "theta-H": ((-1.0, 1.0), (0.5, 1.5)),
        "theta-Hr": ((0.5, 1.5), (0.0, 1.5)),
        "heat": ((-0.5, 0.5), (0.8, 1.5)),
        "monogenic-functional": ((0.8, 2.0), (0.0, 0.5)),
        "fueter-map": ((0.8, 2.0), (0.0, 0.5)),
    }
    (x_lo, x_hi), (r_lo, r_hi) = ranges.get(identity, ((-0.5, 0.5), (0.7, 1.5)))
    w_scale = 0.1 if identity == "heat" else 0.4
    fixed_omega = _omega(args.omega, n)
    samples = []
    for i in range(args.samples):
        x0 = rng.uniform(x_lo, x_hi)
        r = rng.uniform(r_lo, r_hi)
        om = rng.normal(size=n)
        om /= np.linalg.norm(om)
        u = rng.uniform(-w_scale, w_scale, d)
        v = rng.uniform(-0.75 * w_scale, 0.75 * w_scale, d)
        bits = tuple(int(b) for b in rng.integers(0, 2, d))
        samples.append(
            Sample(
                i,
                x0 if args.x0 is None else args.x0,
                r if args.r is None else args.r,
                om if fixed_omega is None else fixed_omega.components,
                u if args.w_u is None else np.asarray(args.w_u, float),
                v if args.w_v is None else np.asarray(args.w_v, float),
                bits if args.qtilde is None else tuple(args.qtilde),
            )
        )
    return samples


def _row(identity: str, s: Sample, report: ResidualReport | None = None, **cols) -> dict:
    row = {"identity": identity, "sample": s.index, "x0": s.x0, "r": s.r}
    for k, c in enumerate(s.omega, start=1):
        row[f"omega_{k}"] = float(c)
    if report is not None:
        row.update(
            abs_residual=report.abs_residual,
            tail_budget=report.tail_budget,
            passed=report.passed,
            lhs=report.lhs.as_pair(),
            rhs=report.rhs.as_pair(),
        )
    row.update(cols)
    return row


def _runner(args, identity: str, L: Lattice) -> Callable[[Sample], list[dict]]:
    p = _params(args, L)
    tol = args.tol

    def slice_point(s: Sample) -> SlicePoint:
        return SlicePoint(s.x0, s.r, UnitVector(s.omega, tol=1e-9))

    if identity in ("theta-H", "theta-Hr"):
        fn = verify_theta_trafo_H if identity == "theta-H" else verify_theta_trafo_Hr

        def run(s):
            rep = fn(slice_point(s), Characteristic(s.u, s.v), p, tol=tol or 1e-8)
            return [_row(identity, s, rep)]

        return run
    if identity in ("conjugated", "eta", "discriminant"):
        if not L.is_unimodular():
            raise UsageError(f"{identity} needs an integral unimodular lattice")

        def run(s):
            x, qt = slice_point(s), L.coset_rep(s.bits)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                if identity == "conjugated":
                    return [
                        _row(f"conjugated-{which}", s, verify_conjugated_trafo(x, qt, p, which, tol=tol or 1e-8))
                        for which in ("first", "second")
                    ]
                fn = verify_eta_trafo if identity == "eta" else verify_discriminant_trafo
                return [_row(identity, s, fn(x, qt, p, tol=tol or 1e-7))]

        return run
    if identity == "heat":
        h = args.fd_step or 1e-3

        def run(s):
            rep = verify_heat(slice_point(s), Characteristic(s.u, s.v), p, h=h, tol=tol or 0.0)
            return [_row(identity, s, rep, fd_step=h)]

        return run
    if L.dim != 4:
        raise UsageError(f"{identity} needs a 4-dimensional lattice")
    h = args.fd_step or 1e-2

    def quaternion(s: Sample) -> Quaternion:
        return Quaternion(s.x0, *(s.r * s.omega))

    if identity == "monogenic-functional":
        if not L.is_unimodular():
            raise UsageError("monogenic-functional needs a unimodular lattice")

        def run(s):
            rep = verify_monogenic_functional_eq(quaternion(s), L, h=h, tail_tol=args.tail_tol, tol=tol or 1e-2)
            return [_row(identity, s, rep, fd_step=h)]

        return run

    def run(s):
        rep = check_fueter_map(L, quaternion(s), h=h, tail_tol=args.tail_tol)
        budget = tol or 100 * h * h
        best = rep.residuals[rep.best]
        return [
            _row(
                identity,
                s,
                abs_residual=best,
                tail_budget=args.tail_tol,
                passed=best <= budget + args.tail_tol,
                residual_plain=rep.residuals["plain"],
                residual_pi2=rep.residuals["pi2"],
                residual_two_pi2=rep.residuals["two_pi2"],
                best=rep.best,
                fd_step=h,
            )
        ]

    return run


def _threads() -> int:
    raw = os.environ.get("THETA_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"THETA_THREADS must be an integer, got {raw!r}") from None
        return max(1, n)
    return min(4, os.cpu_count() or 1)


def run_verify(args) -> dict:
    default = "Z4" if args.identity in _QUATERNIONIC else "Z2"
    L = _load_lattice(args.lattice, default)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    run = _runner(args, args.identity, L)
    samples = _draw_samples(args, args.identity, L)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = [row for chunk in pool.map(run, samples) for row in chunk]
    return {
        "command": "verify",
        "identity": args.identity,
        "lattice": L.generators.tolist(),
        "normalization": args.normalization,
        "seed": args.seed,
        "samples": args.samples,
        "all_passed": all(r["passed"] for r in rows),
        "rows": rows,
    }


def _csv_rows(rows: list[dict]) -> str:
    nested = {"lhs", "rhs"}
    keys: list[str] = []
    for r in rows:
        for k in r:
            if k not in keys and k not in nested and k != "sample":
                keys.append(k)
    head = ["identity", "x0", "r"] + sorted(k for k in keys if k.startswith("omega_"))
    tail = [k for k in ("abs_residual", "tail_budget", "passed") if k in keys]
    extra = [k for k in keys if k not in head and k not in tail]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head + tail + extra)
    for r in rows:
        w.writerow([_csv_cell(r.get(k, "")) for k in head + tail + extra])
    return buf.getvalue()


def cmd_verify(args) -> int:
    result = run_verify(args)
    if args.format == "json":
        _write(dumps(result) + "\n", args.out)
    else:
        _write(_csv_rows(result["rows"]), args.out)
    return EXIT_OK if result["all_passed"] else EXIT_FAIL


COMMANDS = {"lattice-info": cmd_lattice_info, "eval": cmd_eval, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
