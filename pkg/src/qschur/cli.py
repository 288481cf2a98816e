"""``qschur`` command line: JSON in, JSON verdict report out.

Exit status is 0 when every residual is within its bound, 1 when a check
fails (or the input is outside the domain of the operation) and 2 for usage
and parse errors. A report whose residuals are not all finite has verdict
``indeterminate`` and exits with 1.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .errors import QSchurError
from .jsonio import (
    ParseError,
    dumps,
    load_json,
    matrix_from_json,
    matrix_to_json,
    mseries_to_json,
    parse_inline,
    points_from_json,
    quat_from_json,
    quat_to_json,
    realization_from_json,
    realization_to_json,
    series_from_json,
    series_to_json,
    signal_from_json,
)
from .kernels import certify_multiplier, default_points, ks_gram, toeplitz
from .linsys import simulate, transfer_consistency
from .qlinalg import QMatrix, is_hermitian, min_eigenvalue, operator_norm
from .quaternion import Quaternion, random_in_ball
from .realization import markov_sequence, minimal_realization, transfer_closed, transfer_series
from .scalc import resolvent_residual, s_resolvent, spectrum_probe
from .schur import blaschke, schur_algorithm
from .series import DEFAULT_TRUNC, MatrixQSeries, QSeries, matrix_evaluate, star_mul, star_reciprocal

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
EPS = float(np.finfo(float).eps)


@dataclass
class Residual:
    label: str
    value: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.value <= self.bound

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value) and math.isfinite(self.bound)

    def to_json(self) -> dict:
        # JSON has no NaN or inf; a non-finite entry is written as null
        def num(v):
            return float(v) if math.isfinite(v) else None

        return {"label": self.label, "value": num(self.value), "bound": num(self.bound)}


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    residuals: List[Residual] = field(default_factory=list)
    result: Any = None
    error: Optional[dict] = None
    runtime: Optional[float] = None

    def check(self, label: str, value: float, bound: float) -> None:
        self.residuals.append(Residual(label, float(value), float(bound)))

    @property
    def verdict(self) -> str:
        if self.error is not None:
            return "fail"
        if not all(r.finite for r in self.residuals):
            return "indeterminate"
        return "pass" if all(r.ok for r in self.residuals) else "fail"

    @property
    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "inputs_digest": self.digest,
            "verdict": self.verdict,
            "residuals": [r.to_json() for r in self.residuals],
            "runtime": self.runtime,
            "result": self.result,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


class Inputs:
    """Loads files and inline values, recording them for the digest."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.record: Dict[str, Any] = {
            k: v for k, v in sorted(vars(args).items()) if k not in ("func", "timing") and not _is_file_arg(k)
        }

    def file(self, name: str) -> Any:
        path = getattr(self.args, name)
        obj = load_json(path)
        self.record[name] = obj
        return obj, path

    def inline(self, name: str) -> Any:
        return parse_inline(getattr(self.args, name), name)

    def series(self, name: str):
        obj, path = self.file(name)
        f = series_from_json(obj, path)
        trunc = self.args.trunc
        if trunc is not None:
            f = f.truncate(trunc)
        return f

    def scalar_series(self, name: str) -> QSeries:
        f = self.series(name)
        if isinstance(f, MatrixQSeries):
            if f.shape != (1, 1):
                raise ParseError(getattr(self.args, name), "$.coeffs", "expected a scalar series")
            f = f.to_scalar()
        return f

    def realization(self, name: str):
        obj, path = self.file(name)
        return realization_from_json(obj, path)

    def points(self) -> List[Quaternion]:
        if self.args.points is not None:
            obj, path = self.file("points")
            return points_from_json(obj, path)
        if self.args.npoints:
            rng = np.random.default_rng(self.args.seed)
            return [random_in_ball(rng, 0.8) for _ in range(self.args.npoints)]
        return default_points()


_FILE_ARGS = {"f", "g", "A", "coeffs", "R", "u", "u1", "u2", "s", "points"}


def _is_file_arg(name: str) -> bool:
    return name in _FILE_ARGS


def _trunc(args) -> int:
    return DEFAULT_TRUNC if args.trunc is None else args.trunc


# commands


def cmd_star_mul(inp: Inputs, rep: Report) -> None:
    f, g = inp.scalar_series("f"), inp.scalar_series("g")
    h = star_mul(f, g)
    # independent route: lower-triangular Toeplitz matrix of f times g
    col = QMatrix(g.truncate(h.trunc).coeffs[:, None, :])
    via = (toeplitz(f, h.trunc) @ col).data[:, 0, :]
    scale = max(1.0, float(np.max(np.abs(f.coeffs))) * float(np.max(np.abs(g.coeffs))) * (h.trunc + 1))
    rep.check("toeplitz_route", float(np.max(np.abs(via - h.coeffs))), 64 * EPS * scale)
    rep.result = series_to_json(h)


def cmd_reciprocal(inp: Inputs, rep: Report) -> None:
    f = inp.scalar_series("f")
    g = star_reciprocal(f)
    rep.check("f*g-1", star_mul(f, g).max_abs_diff(QSeries.unit(f.trunc)), 1e-10)
    rep.check("g*f-1", star_mul(g, f).max_abs_diff(QSeries.unit(f.trunc)), 1e-10)
    rep.result = series_to_json(g)


def cmd_s_resolvent(inp: Inputs, rep: Report) -> None:
    r = quat_from_json(inp.inline("r"), "--r")
    obj, path = inp.file("A")
    A = matrix_from_json(obj, path)
    S = s_resolvent(inp.args.side, r, A)
    rep.check(f"{inp.args.side}_resolvent_equation", resolvent_residual(inp.args.side, r, A), 1e-9)
    rep.result = matrix_to_json(S)


def cmd_spectrum_probe(inp: Inputs, rep: Report) -> None:
    obj, path = inp.file("A")
    A = matrix_from_json(obj, path)
    spheres = spectrum_probe(A, grid=inp.args.grid)
    for k, s in enumerate(spheres):
        rep.check(f"sphere[{k}].probe_measure", s.residual, 1e-7)
    rep.result = {"spheres": [{"center": s.center, "radius": s.radius} for s in spheres]}


def cmd_realize(inp: Inputs, rep: Report) -> None:
    f = inp.series("coeffs")
    R = minimal_realization(f, tol=inp.args.tol)
    coeffs = f.coefficients() if isinstance(f, MatrixQSeries) else [QMatrix.scalar(c) for c in f.coefficients()]
    got = markov_sequence(R, len(coeffs) - 1)
    rep.check("coefficient_reproduction", max((a - b).max_abs() for a, b in zip(coeffs, got)), 1e-8)
    rep.result = dict(realization_to_json(R), state_dim=R.state_dim)


def cmd_transfer(inp: Inputs, rep: Report) -> None:
    R = inp.realization("R")
    N = inp.args.N if inp.args.N is not None else _trunc(inp.args)
    H = transfer_series(R, N)
    p = Quaternion(0.0, 0.0, 0.3)
    t = p.norm() * operator_norm(R.A)
    if t < 1.0:
        gap = (matrix_evaluate(H, p) - transfer_closed(R, p)).max_abs()
        tail = operator_norm(R.C) * operator_norm(R.B) * p.norm() * t**N / (1.0 - t)
        rep.check("closed_form_at_0.3j", gap, tail + 1e-12 * max(1.0, operator_norm(R.block())))
    rep.result = mseries_to_json(H)


def cmd_transfer_check(inp: Inputs, rep: Report) -> None:
    R = inp.realization("R")
    u1 = signal_from_json(*inp.file("u1"))
    u2 = signal_from_json(*inp.file("u2"))
    p = quat_from_json(inp.inline("p"), "--p")
    N = _trunc(inp.args)
    tc = transfer_consistency(R, u1, u2, N, p)
    rep.check("star_quotient_gap", tc.star_gap, 1e-9)
    rep.check("star_quotient_vs_transfer", tc.transfer_gap, 1e-9)
    rep.result = {
        "degree": tc.degree,
        "p_sample": quat_to_json(p),
        "star_quotients": [mseries_to_json(q.truncate(tc.degree)) for q in tc.star_quotients],
        "pointwise": [matrix_to_json(v) for v in tc.pointwise],
        "pointwise_gap": tc.pointwise_gap,
        "pointwise_flag": tc.pointwise_flag,
    }


def cmd_simulate(inp: Inputs, rep: Report) -> None:
    R = inp.realization("R")
    u = signal_from_json(*inp.file("u"))
    trace = simulate(R, u, inp.args.T)
    rep.result = {
        "horizon": trace.horizon,
        "outputs": [matrix_to_json(y) for y in trace.outputs],
        "final_state": matrix_to_json(trace.states[-1]),
    }


def cmd_certify(inp: Inputs, rep: Report) -> None:
    s = inp.scalar_series("s")
    cert = certify_multiplier(s, inp.points(), inp.args.N, inp.args.tol)
    rep.check("toeplitz_norm", cert.toeplitz_norm, 1.0 + cert.norm_tol)
    rep.check("gram_negative_eigenvalue", max(0.0, -cert.min_eigenvalue), cert.psd_tol)
    rep.result = {
        "certified": cert.certified,
        "psd": cert.psd,
        "trunc": cert.trunc,
        "toeplitz_norm": cert.toeplitz_norm,
        "min_eigenvalue": cert.min_eigenvalue,
        "points": [quat_to_json(q) for q in cert.points],
    }


def cmd_schur_coeffs(inp: Inputs, rep: Report) -> None:
    s = inp.scalar_series("s")
    sc = schur_algorithm(s, inp.args.kmax)
    for k, r in enumerate(sc.rho):
        rep.check(f"|rho[{k}]|", r.norm(), 1.0 + 1e-12)
    rep.result = {"rho": [quat_to_json(r) for r in sc.rho], "stop": sc.stop}


def cmd_blaschke(inp: Inputs, rep: Report) -> None:
    a = quat_from_json(inp.inline("a"), "--a")
    S, R = blaschke(a, _trunc(inp.args))
    M = R.block()
    rep.check("unitarity_defect", operator_norm(M @ M.H - QMatrix.eye(2)), 1e-12)
    mk = markov_sequence(R, S.series.trunc)
    rep.check("markov_vs_series", max((m[0, 0] - c).norm() for m, c in zip(mk, S.series.coefficients())), 1e-12)
    rep.result = {"series": series_to_json(S.series), "realization": realization_to_json(R)}


def cmd_kernel_gram(inp: Inputs, rep: Report) -> None:
    s = inp.scalar_series("s")
    pts = inp.points()
    G = ks_gram(s, pts)
    scale = max(operator_norm(G), np.finfo(float).tiny)
    rep.check("hermitian_defect", (G - G.H).max_abs(), 1e-12 * max(1.0, scale))
    lam = min_eigenvalue(G) if is_hermitian(G) else -np.inf
    rep.check("gram_negative_eigenvalue", max(0.0, -lam), 1e-8 * scale)
    rep.result = {"gram": matrix_to_json(G), "min_eigenvalue": lam, "points": [quat_to_json(q) for q in pts]}


# parser


def _add_points(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", help="JSON list of quaternions in the unit ball (default: fixed 8-point set)")
    p.add_argument("--npoints", type=int, default=0, help="draw this many random points (uses --seed) instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qschur", description="Quaternionic Schur analysis tools.")
    parser.add_argument("--trunc", type=int, default=None, help=f"series truncation degree (default {DEFAULT_TRUNC})")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sample points")
    parser.add_argument("--timing", action="store_true", help="record wall-clock runtime in the report")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("star-mul", cmd_star_mul, "star product of two series")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = add("reciprocal", cmd_reciprocal, "star reciprocal of a series with nonzero constant term")
    p.add_argument("--f", required=True)

    p = add("s-resolvent", cmd_s_resolvent, "left or right S-resolvent of a matrix")
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--r", required=True, help="quaternion [w,x,y,z]")
    p.add_argument("--A", required=True)

    p = add("spectrum-probe", cmd_spectrum_probe, "locate the spheres of the S-spectrum")
    p.add_argument("--A", required=True)
    p.add_argument("--grid", type=int, default=24)

    p = add("realize", cmd_realize, "minimal realization from series coefficients")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("transfer", cmd_transfer, "transfer series of a realization")
    p.add_argument("--R", required=True)
    p.add_argument("--N", type=int, default=None)

    p = add("transfer-check", cmd_transfer_check, "star quotient versus pointwise quotient for two inputs")
    p.add_argument("--R", required=True)
    p.add_argument("--u1", required=True)
    p.add_argument("--u2", required=True)
    p.add_argument("--p", default="[0,0.5,0,0]")

    p = add("simulate", cmd_simulate, "run the state recursion")
    p.add_argument("--R", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--T", type=int, default=64)

    p = add("certify", cmd_certify, "sampled Schur multiplier certificate")
    p.add_argument("--s", required=True)
    _add_points(p)
    p.add_argument("--N", type=int, default=24)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("schur-coeffs", cmd_schur_coeffs, "Schur coefficients of a multiplier")
    p.add_argument("--s", required=True)
    p.add_argument("--kmax", type=int, default=8)

    p = add("blaschke", cmd_blaschke, "elementary Blaschke factor and its unitary realization")
    p.add_argument("--a", required=True, help="quaternion [w,x,y,z] with |a| < 1")

    p = add("kernel-gram", cmd_kernel_gram, "Gram matrix of the de Branges-Rovnyak kernel")
    p.add_argument("--s", required=True)
    _add_points(p)
    return parser


def run(argv: Optional[List[str]] = None) -> tuple:
    """Parse and dispatch; returns ``(exit_code, report_dict)``."""
    args = build_parser().parse_args(argv)
    inp = Inputs(args)
    rep = Report(args.command, inp.record)
    start = time.perf_counter()
    try:
        args.func(inp, rep)
    except ParseError as exc:
        rep.error = exc.to_json()
        return EXIT_USAGE, rep.to_json()
    except (QSchurError, ArithmeticError, ValueError) as exc:
        rep.error = {"type": type(exc).__name__, "message": str(exc)}
        rep.result = None
    if args.timing:
        rep.runtime = time.perf_counter() - start
    return (EXIT_PASS if rep.verdict == "pass" else EXIT_FAIL), rep.to_json()


def main(argv: Optional[List[str]] = None) -> int:
    code, report = run(argv)
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
