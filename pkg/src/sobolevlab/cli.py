"""Command-line surface: constants, norms, project, check, sharpness.

Exit codes: 0 all checks pass, 1 a checked inequality failed (the failing CSV
row index is printed), 2 usage or numeric error.  All numeric output is full
double precision in scientific notation; identical argv and seed give
byte-identical CSV.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .bubble import bubble_constants
from .deficit import HypothesisError, proof_constants
from .experiments import THEOREMS, ExperimentError, ScanSummary, constant_scan, sharpness_experiment
from .families import FamilySpec, grid_of
from .norms import grad_lp_norm, lq_norm, weak_norm
from .params import ParameterDomainError, derive_params
from .profiles import DomainBall, load_profile_csv
from .projection import project
from .quadrature import DEFAULT_RTOL, QuadratureError

_COLUMNS = {
    "thm11": ("N", "p", "lam", "R", "grad_p", "crit", "weak", "deficit", "remainder", "ratio"),
    "cor12": ("N", "p", "lam", "R", "t", "grad_p", "crit", "deficit", "remainder", "ratio"),
    "thm13": ("N", "p", "eps", "grad_p", "crit", "distance", "deficit", "remainder", "ratio"),
    "fz19": ("N", "p", "eps", "grad_p", "crit", "distance", "deficit", "remainder", "ratio"),
    "lemma21": ("N", "p", "lam", "R", "grad_p", "crit", "weak", "bound", "deficit", "ratio", "holds"),
    "tail29": ("N", "p", "lamR", "exact", "bound", "ratio", "holds"),
    "pointwise": ("N", "p", "check", "r", "kappa", "C1", "value", "min_margin", "holds"),
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17e}"
    if value is None:
        return "nan"
    return str(value)


def _write_csv(path: str, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col, math.nan)) for col in columns))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _row_violates(theorem: str, row: dict) -> bool:
    if theorem in ("lemma21", "tail29", "pointwise"):
        return not row.get("holds", False)
    if theorem == "thm13":
        return not math.isfinite(row.get("ratio", math.nan))
    return not row.get("ratio", math.nan) > 0.0


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobolevlab",
        description="Numerical checks for the sharp p-Sobolev inequality and its remainder terms.",
    )
    parser.add_argument("--config", type=str, default=None, help="TOML file mirroring the flags")
    parser.add_argument("--tol", type=float, default=DEFAULT_RTOL, help="quadrature relative tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="print bubble constants and chain constants")
    p_const.add_argument("--N", type=int, required=True)
    p_const.add_argument("--p", type=float, required=True)
    p_const.add_argument("--c0", type=float, default=None)
    p_const.add_argument("--C0", type=float, default=None)

    p_norms = sub.add_parser("norms", help="norms of a CSV profile")
    p_norms.add_argument("--in", dest="infile", type=str, required=True)
    p_norms.add_argument("--N", type=int, required=True)
    p_norms.add_argument("--p", type=float, required=True)
    p_norms.add_argument("--R", type=float, required=True)

    p_proj = sub.add_parser("project", help="project a CSV profile onto the extremal manifold")
    p_proj.add_argument("--in", dest="infile", type=str, required=True)
    p_proj.add_argument("--N", type=int, required=True)
    p_proj.add_argument("--p", type=float, required=True)

    p_check = sub.add_parser("check", help="run one family-wise inequality check")
    p_check.add_argument("--theorem", choices=THEOREMS, required=True)
    p_check.add_argument("--N", type=int, required=True)
    p_check.add_argument("--p", type=float, required=True)
    p_check.add_argument(
        "--family",
        choices=("truncated-bubble", "perturbed-bubble", "plateau"),
        default=None,
        help="family kind; defaults to the theorem's natural family",
    )
    p_check.add_argument("--lambdas", type=str, default="2,5,10,50")
    p_check.add_argument("--radii", type=str, default="0.5,1,2,4")
    p_check.add_argument("--lamr", type=str, default="1,10,100,1000")
    p_check.add_argument("--eps-min", type=float, default=1e-3)
    p_check.add_argument("--eps-max", type=float, default=1e-1)
    p_check.add_argument("--steps", type=int, default=9)
    p_check.add_argument("--t", type=float, default=None)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--out", type=str, default=None)

    p_sharp = sub.add_parser("sharpness", help="slope fit of log deficit vs log distance")
    p_sharp.add_argument("--N", type=int, required=True)
    p_sharp.add_argument("--p", type=float, required=True)
    p_sharp.add_argument("--eps-min", type=float, default=1e-3)
    p_sharp.add_argument("--eps-max", type=float, default=1e-1)
    p_sharp.add_argument("--steps", type=int, default=9)
    p_sharp.add_argument("--out", type=str, default=None)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    with open(path, "rb") as handle:
        config = tomllib.load(handle)
    top = {k: v for k, v in config.items() if not isinstance(v, dict)}
    parser.set_defaults(**top)
    for action in parser._subparsers._group_actions:  # noqa: SLF001 - argparse has no public hook
        for name, subparser in action.choices.items():
            if name in config:
                subparser.set_defaults(**config[name])


def run_cli(argv) -> int:
    argv = list(argv)
    parser = _build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, tomllib.TOMLDecodeError, IndexError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ParameterDomainError, HypothesisError, ExperimentError, QuadratureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "constants":
        return _cmd_constants(args)
    if args.command == "norms":
        return _cmd_norms(args)
    if args.command == "project":
        return _cmd_project(args)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "sharpness":
        return _cmd_sharpness(args)
    raise ParameterDomainError(f"unknown command {args.command!r}")


def _cmd_constants(args) -> int:
    params = derive_params(args.N, args.p)
    consts = bubble_constants(params, rtol=args.tol)
    print(f"N = {params.N}, p = {_fmt(params.p)}")
    print(f"pstar = {_fmt(params.pstar)}")
    print(f"pbar = {_fmt(params.pbar)}")
    print(f"gamma = {_fmt(params.gamma)}, zeta = {_fmt(params.zeta)}")
    print(f"weak_norm_valid = {_fmt(params.weak_norm_valid)}")
    print(f"gamma_norm = {_fmt(consts.gamma_norm)}")
    print(f"grad_norm_U = {_fmt(consts.grad_norm)}")
    print(f"crit_norm_U = {_fmt(consts.crit_norm)}")
    print(f"sharp_S = {_fmt(consts.sharp_constant)}")
    print(f"weak_norm_U = {_fmt(consts.weak_norm)}")
    print(f"sphere_measure = {_fmt(consts.sphere)}")
    if args.c0 is not None:
        c0 = args.c0
        C0 = args.C0 if args.C0 is not None else c0
        chain = proof_constants(params, c0, C0, rtol=args.tol)
        print(f"rho = {_fmt(chain.rho)}")
        print(f"C_under = {_fmt(chain.C_under)}")
        print(f"B = {_fmt(chain.B)}")
    return 0


def _cmd_norms(args) -> int:
    params = derive_params(args.N, args.p)
    profile, _meta = load_profile_csv(args.infile)
    dom = DomainBall(params.N, args.R)
    print(f"grad_p = {_fmt(grad_lp_norm(profile, params.p, dom, rtol=args.tol))}")
    print(f"crit = {_fmt(lq_norm(profile, params.pstar, dom, rtol=args.tol))}")
    print(f"lp = {_fmt(lq_norm(profile, params.p, dom, rtol=args.tol))}")
    if params.weak_norm_valid:
        print(f"weak = {_fmt(weak_norm(profile, params.pbar, dom, rtol=args.tol))}")
    else:
        print("weak = inf")
    return 0


def _cmd_project(args) -> int:
    params = derive_params(args.N, args.p)
    profile, _meta = load_profile_csv(args.infile)
    res = project(profile, params)
    print(f"c_opt = {_fmt(res.c_opt)}")
    print(f"lambda_opt = {_fmt(res.lambda_opt)}")
    print(f"distance = {_fmt(res.distance)}")
    print(f"evaluations = {res.evaluations}")
    print(f"converged = {_fmt(res.converged)}")
    return 0


def _family_for(args, params) -> FamilySpec:
    kind = args.family
    if kind is None:
        kind = "perturbed-bubble" if args.theorem in ("thm13", "fz19") else "truncated-bubble"
    if kind == "truncated-bubble":
        grid = grid_of(
            [{"lam": lam, "R": R} for lam in _float_list(args.lambdas) for R in _float_list(args.radii)]
        )
    elif kind == "perturbed-bubble":
        eps = np.geomspace(args.eps_min, args.eps_max, args.steps)
        grid = grid_of([{"eps": float(e)} for e in eps])
    else:
        grid = grid_of(
            [{"a": 0.5 * R, "R": R} for R in _float_list(args.radii)]
        )
    return FamilySpec(kind=kind, params=params, grid=grid, seed=args.seed)


def _cmd_check(args) -> int:
    params = derive_params(args.N, args.p)
    if args.theorem == "tail29":
        spec = FamilySpec(
            kind="truncated-bubble",
            params=params,
            grid=grid_of([{"lamR": a, "lam": a, "R": 1.0} for a in _float_list(args.lamr)]),
            seed=args.seed,
        )
    else:
        spec = _family_for(args, params)
    summary = constant_scan(args.theorem, spec, t=args.t, rtol=args.tol)
    return _report_summary(args, params, summary)


def _report_summary(args, params, summary: ScanSummary) -> int:
    columns = _COLUMNS[summary.theorem]
    rows = [dict(row, N=params.N, p=params.p) for row in summary.rows]
    if args.out:
        _write_csv(args.out, columns, rows)
        print(f"wrote {len(rows)} rows to {args.out}")
    for note in summary.notes:
        print(f"note: {note}")
    for label, reason in summary.filtered:
        print(f"filtered: {label} ({reason})")
    if summary.spread is not None:
        print(f"spread_across_R = {_fmt(summary.spread)}")
    print(f"extremum = {_fmt(summary.extremum)} at {summary.extremizer}")
    violations = [i for i, row in enumerate(rows) if _row_violates(summary.theorem, row)]
    if violations or not summary.passed:
        for i in violations:
            print(f"VIOLATION at row {i}: {rows[i]}")
        print(f"{summary.theorem}: FAIL")
        return 1
    print(f"{summary.theorem}: PASS ({len(rows)} rows)")
    return 0


def _cmd_sharpness(args) -> int:
    params = derive_params(args.N, args.p)
    eps_grid = np.geomspace(args.eps_min, args.eps_max, args.steps)
    fit = sharpness_experiment(params, eps_grid, rtol=args.tol)
    if args.out:
        rows = [
            {"N": params.N, "p": params.p, "log_distance": ld, "log_deficit": lv}
            for ld, lv in fit.points
        ]
        _write_csv(args.out, ("N", "p", "log_distance", "log_deficit"), rows)
        print(f"wrote {len(rows)} rows to {args.out}")
    print(f"slope = {_fmt(fit.slope)}")
    print(f"intercept = {_fmt(fit.intercept)}")
    print(f"residual = {_fmt(fit.residual)}")
    print(f"window = [{_fmt(fit.window[0])}, {_fmt(fit.window[1])}]")
    print(f"empirical_cap_constant = {_fmt(fit.empirical_cap_constant)}")
    return 0


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
