"""Command-line entry point: ``python -m abhardy <command> ...``.

Commands: thresholds, scan, gap, minimize, instability, verify.
Exit codes: 0 success, 1 verification/inclusion/convergence failure,
2 usage or domain error.
"""
from __future__ import annotations

import argparse
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import closed_form as cf
from . import cylinder as cy
from . import minimize as mn
from . import spectral as sp
from . import verify as vf
from .errors import DomainError, NumericError
from .params import Params, reduce_flux

DEFAULT_SEED = 20240101
SCAN_HEADER = "a,lambda_star,lambda_bullet,lambda_fs,minus_a_sq"
GAP_HEADER = "a,gap"


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % x


def _csv(header: str, rows) -> str:
    out = [header]
    out.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _flux(a_raw: float, err) -> float:
    a = reduce_flux(a_raw)
    if a != a_raw:
        print(f"note: flux a={a_raw!r} reduced to {a!r} (periodicity and a -> -a symmetry)", file=err)
    return a


_LAM_EXPR = re.compile(r"^\s*(?:(?P<k>[-+0-9.eE]+)\s*\*\s*)?(?P<name>star|bullet|fs)\s*(?P<off>[-+]\s*[0-9.eE+-]+)?\s*$")


def parse_lambda(text: str, a: float, p: float) -> float:
    """A float, or ``[k*]name[+-offset]`` with ``name`` one of star, bullet, fs."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _LAM_EXPR.match(text)
    if not m:
        raise UsageError(f"cannot parse lambda value {text!r}")
    base = {"star": cf.lambda_star, "bullet": cf.lambda_bullet, "fs": cf.lambda_fs}[m["name"]](a, p)
    k = float(m["k"]) if m["k"] else 1.0
    off = float(m["off"].replace(" ", "")) if m["off"] else 0.0
    return k * base + off


# commands --------------------------------------------------------------------

def cmd_thresholds(args, err) -> tuple[str, int]:
    a = _flux(args.a, err)
    th = cf.thresholds(a, args.p).as_dict()
    if args.format == "json":
        return _json(th), 0
    if args.format == "csv":
        keys = list(th)
        return _csv(",".join(keys), [[th[k] for k in keys]]), 0
    lines = [f"{k}={v:.12g}" for k, v in th.items()]
    return "\n".join(lines) + "\n", 0


def _a_grid(args) -> np.ndarray:
    if not (0.0 < args.a_min < args.a_max <= 0.5):
        raise UsageError(f"need 0 < a_min < a_max <= 0.5, got a_min={args.a_min!r}, a_max={args.a_max!r}")
    if args.steps < 2:
        raise UsageError(f"steps must be >= 2, got {args.steps!r}")
    return np.linspace(args.a_min, args.a_max, args.steps)


def cmd_scan(args, err) -> tuple[str, int]:
    cf._check_p(args.p)
    rows = []
    for a in _a_grid(args):
        a = float(a)
        ls, lb, lf = cf.lambda_star(a, args.p), cf.lambda_bullet(a, args.p), cf.lambda_fs(a, args.p)
        strict = a < 0.5
        ok = (-a * a < ls if strict else -a * a <= ls + args.tol) and ls <= lb + args.tol and lb <= lf + args.tol
        if not ok:
            raise CheckFailure(f"ordering violated at a={a!r}: lambda_star={ls!r}, "
                               f"lambda_bullet={lb!r}, lambda_fs={lf!r}, -a^2={-a * a!r}")
        rows.append((a, ls, lb, lf, -a * a))
    if args.format == "json":
        keys = SCAN_HEADER.split(",")
        return _json({"p": args.p, "rows": [dict(zip(keys, r)) for r in rows]}), 0
    return _csv(SCAN_HEADER, rows), 0


def cmd_gap(args, err) -> tuple[str, int]:
    cf._check_p(args.p)
    rows = [(float(a), cf.gap(float(a), args.p)) for a in _a_grid(args)]
    bad = [r for r in rows if r[1] < -args.tol]
    if bad:
        raise CheckFailure(f"negative gap at a={bad[0][0]!r}: {bad[0][1]!r}")
    a_max, g_max = max(rows, key=lambda r: r[1])
    print(f"note: interior maximum gap {g_max:.12g} at a={a_max:.12g}", file=err)
    if args.format == "json":
        return _json({"p": args.p, "max": {"a": a_max, "gap": g_max},
                      "rows": [{"a": a, "gap": g} for a, g in rows]}), 0
    return _csv(GAP_HEADER, rows), 0


def cmd_minimize(args, err) -> tuple[str, int]:
    a = _flux(args.a, err)
    lam = parse_lambda(args.lam, a, args.p)
    params = Params(a, args.p, lam)
    L = args.L if args.L is not None else cy.default_half_length(params)
    grid = cy.build_grid(L, args.Ns, args.Ntheta)
    opts = mn.MinimizeOptions(tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    res = mn.minimize_magnetic(params, grid, args.init, opts)
    verdict = cy.classify_symmetry(res.field, args.sym_tol)
    report = {
        "a": a, "p": args.p, "lambda": lam,
        "grid": {"L": L, "Ns": args.Ns, "Ntheta": args.Ntheta},
        "init": args.init, "seed": args.seed,
        "energy": res.energy,
        "symmetric_energy": res.report.symmetric_value,
        "recovered_constant": res.report.recovered_constant,
        "closed_form_mu": cf.h_mu(lam, a, args.p),
        "verdict": verdict.label,
        "score": verdict.score,
        **{k: v for k, v in res.report.as_dict().items() if k not in ("recovered_constant", "symmetric_value")},
    }
    if args.dump:
        from .fieldio import write_field
        write_field(args.dump, res.field, {
            "parameters": {"a": a, "p": args.p, "lambda": lam},
            "energy": res.energy, "residual": res.report.residual,
            "iterations": res.report.iterations,
        })
    return _json(report), 0 if res.report.converged else 1


def cmd_instability(args, err) -> tuple[str, int]:
    a = _flux(args.a, err)
    if args.steps < 1 or args.lam_min > args.lam_max:
        raise UsageError(f"empty lambda range [{args.lam_min!r}, {args.lam_max!r}] with {args.steps} steps")
    rep = sp.instability_scan(a, args.p, (args.lam_min, args.lam_max), args.steps,
                              N=args.N, workers=args.workers, xtol=args.tol)
    code = 0 if rep.inclusion_ok else 1
    if args.format == "csv":
        rows = list(zip(rep.lambdas, rep.values, rep.signs))
        return _csv("lambda,Lambda,sign", rows), code
    return _json(rep.as_dict()), code


def cmd_verify(args, err) -> tuple[str, int]:
    results = vf.run_identity_suite(n=args.n, perturb=args.perturb)
    ok = vf.all_passed(results)
    if args.format == "json":
        body = _json({"passed": ok, "checks": [
            {"name": r.name, "residual": r.residual, "tolerance": r.tolerance, "passed": r.passed}
            for r in results]})
    else:
        body = "\n".join(r.line() for r in results) + "\n"
    if not ok:
        for r in results:
            if not r.passed:
                print(f"identity failed: {r.name}", file=err)
    return body, 0 if ok else 1


# parser ----------------------------------------------------------------------

def _common(sp_, tol: float, fmt: str, formats=("csv", "json")):
    sp_.add_argument("--tol", type=float, default=tol, help=f"tolerance (default {tol:g})")
    sp_.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    sp_.add_argument("--format", choices=formats, default=fmt, help=f"output format (default {fmt})")
    sp_.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help=f"seed for randomized parts (default {DEFAULT_SEED})")
    sp_.add_argument("--config", type=Path, default=None,
                     help="JSON file of option values; its entries override flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abhardy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="closed-form thresholds and constants")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    _common(p, 1e-12, "text", ("text", "csv", "json"))

    for name, helptext in (("scan", "threshold curves over a"), ("gap", "lambda_bullet - lambda_star over a")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--p", type=float, default=4.0)
        p.add_argument("--a-min", type=float, default=0.01)
        p.add_argument("--a-max", type=float, default=0.49)
        p.add_argument("--steps", type=int, default=100)
        _common(p, 1e-14, "csv")

    p = sub.add_parser("minimize", help="minimize the magnetic energy on the cylinder")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--lam", required=True,
                   help="lambda: a number or an expression like 'bullet+0.5', '0.5*star'")
    p.add_argument("--L", type=float, default=None, help="half-length (default 12/omega)")
    p.add_argument("--Ns", type=int, default=512)
    p.add_argument("--Ntheta", type=int, default=32)
    p.add_argument("--init", choices=mn.INIT_KINDS, default="ansatz")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--sym-tol", type=float, default=1e-4, help="symmetry score threshold")
    p.add_argument("--dump", type=Path, default=None, help="write the field (binary + .json sidecar)")
    _common(p, 1e-8, "json", ("json",))

    p = sub.add_parser("instability", help="sign of the coupled ground state over lambda")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--lam-min", type=float, required=True)
    p.add_argument("--lam-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=41)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    _common(p, 1e-6, "json")

    p = sub.add_parser("verify", help="closed-form identity suite")
    p.add_argument("--n", type=int, default=50, help="sweep grid size per axis")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    _common(p, 1e-10, "text", ("text", "json"))
    return parser


COMMANDS = {
    "thresholds": cmd_thresholds, "scan": cmd_scan, "gap": cmd_gap,
    "minimize": cmd_minimize, "instability": cmd_instability, "verify": cmd_verify,
}


def _apply_config(args, parser):
    data = json.loads(Path(args.config).read_text())
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in ("command", "config") or not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r} for command {args.command!r}")
        setattr(args, dest, value)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config is not None:
            _apply_config(args, parser)
        body, code = COMMANDS[args.command](args, stderr)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if args.out is not None:
        Path(args.out).write_text(body)
    else:
        stdout.write(body)
    return code


def run(argv) -> tuple[int, str, str]:
    """Run the CLI in-process; returns ``(exit code, stdout, stderr)``."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()
