"""Command-line front end.

Exit codes: 0 success (inequality holds), 1 inequality violated, 2 input or
guard error.  Every numeric flag falls back to an ABCMERO_<NAME> environment
variable (e.g. ABCMERO_QUAD_TOL) when not given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import nevanlinna as nv
from . import nt_abc
from .config import RunConfig
from .parser import ParseError, parse_int_triple, parse_mero_triple, parse_rational
from .quadrature import QuadratureError
from .rational_core import MeroTriple, NearPoleError
from .rootfinder import RootFindingError, SiteOnCircleError

SCHEMA = "abcmero.report/1"
PJ_TOL = 1e-6
SLACK_TOL = 1e-6
PRODUCT_TOL = 1e-12

INPUT_ERRORS = (
    ValueError,
    ParseError,
    ZeroDivisionError,
    SiteOnCircleError,
    QuadratureError,
    RootFindingError,
    NearPoleError,
    nt_abc.FactorizationError,
    NotImplementedError,
    TypeError,
)

ORACLES = {"sincos": nv.sincos_triple}


class UsageError(Exception):
    pass


def _round(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        return None if not math.isfinite(x) else float(f"{x:.12g}")
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def dump_json(command: str, result, config: RunConfig) -> str:
    payload = {
        "schema": SCHEMA,
        "command": command,
        "config": {"quad_tol": config.quad_tol, "guard_rel": config.guard_rel, "max_quad_points": config.max_quad_points},
        "result": result,
    }
    return json.dumps(_round(payload), sort_keys=True, indent=2) + "\n"


def dump_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_cell(row.get(k)) for k in header})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return "" if not math.isfinite(v) else f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return v


def _emit(args, command: str, result, header: list[str], rows: list[dict]) -> None:
    if args.config.output_format == "csv":
        sys.stdout.write(dump_csv(header, rows))
    else:
        sys.stdout.write(dump_json(command, result, args.config))


def _read_lines(path: str) -> list[str]:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _functions(args) -> list[tuple[str, object]]:
    texts = list(args.f or [])
    if args.file:
        texts += _read_lines(args.file)
    if not texts:
        raise UsageError("give --f or --file")
    return [(t, parse_rational(t)) for t in texts]


def _triple(args) -> MeroTriple:
    if getattr(args, "oracle", None):
        return ORACLES[args.oracle]()
    if getattr(args, "file", None):
        lines = _read_lines(args.file)
        if len(lines) != 3:
            raise UsageError("triple file must hold exactly three expressions")
        return parse_mero_triple(*lines)
    if None in (args.a, args.b, args.c):
        raise UsageError("give --a, --b and --c (or --file / --oracle)")
    return parse_mero_triple(args.a, args.b, args.c)


# --------------------------------------------------------------------------- commands


def cmd_pj(args) -> int:
    rows = []
    for text, f in _functions(args):
        res = nv.pj_residual(f, args.rho, args.config)
        rows.append({"f": text, "rho": args.rho, "residual": res, "ok": abs(res) < PJ_TOL})
    _emit(args, "pj", rows, ["f", "rho", "residual", "ok"], rows)
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_abc_mero(args) -> int:
    nv._require_rho(args.rho)
    P = _triple(args)
    rep = nv.formal_abc_report(P, args.rho, args.config)
    result = rep.to_dict()
    result["triple"] = [str(f) for f in P.coords]
    result["holds"] = rep.holds(SLACK_TOL)
    header = ["rho", "h", "r_na", "r_arch", "r", "slack", "holds"]
    _emit(args, "abc-mero", result, header, [result])
    return 0 if result["holds"] else 1


def cmd_scan(args) -> int:
    nv._require_rho(args.rho_min)
    P = _triple(args)
    res = nv.rho_scan(P, args.rho_min, args.rho_max, args.steps, args.C, args.config)
    rows = [r.to_dict() for r in res.rows]
    header = ["rho", "h", "r_na", "r_arch", "bound", "exceeds", "masked"]
    summary = res.summary()
    if args.out:
        Path(args.out).write_text(dump_csv(header, rows), encoding="utf-8")
        sys.stdout.write(dump_json("scan", {"summary": summary, "csv": args.out}, args.config))
    elif args.config.output_format == "csv":
        sys.stdout.write(dump_csv(header, rows))
        sys.stderr.write(json.dumps(_round(summary), sort_keys=True) + "\n")
    else:
        sys.stdout.write(dump_json("scan", {"summary": summary, "rows": rows}, args.config))
    return 0


def cmd_proximity(args) -> int:
    rows = [{"f": t, "rho": args.rho, "m": nv.proximity(f, args.rho, args.config)} for t, f in _functions(args)]
    _emit(args, "proximity", rows, ["f", "rho", "m"], rows)
    return 0


def cmd_logder_lemma(args) -> int:
    rows = []
    for t, f in _functions(args):
        lm = nv.logder_lemma_margin(f, args.rho, args.config)
        rows.append({"f": t, "rho": args.rho, "m": lm.m_value, "h": lm.h_value, "margin": lm.margin})
    _emit(args, "logder-lemma", rows, ["f", "rho", "m", "h", "margin"], rows)
    return 0


_NT_HEADER = ["a", "b", "c", "h", "r_na", "psi", "margin", "holds", "quality_paper", "quality_classical"]


def _nt_row(rep: nt_abc.NtReport) -> dict:
    d = rep.to_dict()
    d["a"], d["b"], d["c"] = d["triple"]
    return d


def cmd_abc_int(args) -> int:
    texts = list(args.triple or [])
    if args.file:
        texts += _read_lines(args.file)
    if not texts:
        raise UsageError("give --triple or --file")
    reports = [nt_abc.abc_check(parse_int_triple(t)) for t in texts]
    rows = [_nt_row(r) for r in reports]
    _emit(args, "abc-int", rows, _NT_HEADER, rows)
    return 0 if all(r.holds for r in reports) else 1


def cmd_abc_scan(args) -> int:
    rep = nt_abc.enumerate_scan(args.max_c, args.top, args.config.workers)
    top = [_nt_row(r) for r in rep.top]
    result = {"N": rep.N, "count": rep.count, "top": top, "violations": [_nt_row(r) for r in rep.violations]}
    _emit(args, "abc-scan", result, _NT_HEADER, top)
    return 0 if not rep.violations else 1


def cmd_product_formula(args) -> int:
    rows = []
    for text in args.x:
        x = Fraction(text.strip())
        res = nt_abc.product_formula_residual(x)
        rows.append({"x": x, "residual": res, "ok": abs(res) < PRODUCT_TOL})
    _emit(args, "product-formula", rows, ["x", "residual", "ok"], [{**r, "x": str(r["x"])} for r in rows])
    return 0 if all(r["ok"] for r in rows) else 1


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default=None)
    common.add_argument("--quad-tol", type=float, default=None)
    common.add_argument("--root-tol", type=float, default=None)
    common.add_argument("--cluster-tol", type=float, default=None)
    common.add_argument("--guard-rel", type=float, default=None, help="circle guard, relative to rho")
    common.add_argument("--max-quad-points", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)

    p = argparse.ArgumentParser(prog="abcmero", description="Heights, radicals and abc checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def func_args(sp):
        sp.add_argument("--f", action="append", help="rational expression in z (repeatable)")
        sp.add_argument("--file", help="file with one expression per line")
        sp.add_argument("--rho", type=float, required=True)

    def triple_args(sp):
        sp.add_argument("--a")
        sp.add_argument("--b")
        sp.add_argument("--c")
        sp.add_argument("--file", help="file with the three coordinates, one per line")
        sp.add_argument("--oracle", choices=sorted(ORACLES), help="built-in transcendental triple")

    sp = sub.add_parser("pj", parents=[common], help="Poisson-Jensen residual")
    func_args(sp)
    sp.set_defaults(run=cmd_pj)

    sp = sub.add_parser("abc-mero", parents=[common], help="Formal ABC report at one radius")
    triple_args(sp)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--json", action="store_true", help="JSON output (the default)")
    sp.set_defaults(run=cmd_abc_mero)

    sp = sub.add_parser("scan", parents=[common], help="rho-grid scan against the log-derivative bound")
    triple_args(sp)
    sp.add_argument("--rho-min", type=float, required=True)
    sp.add_argument("--rho-max", type=float, required=True)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--C", type=float, default=10.0)
    sp.add_argument("--out", help="write the row table as CSV here")
    sp.set_defaults(run=cmd_scan)

    sp = sub.add_parser("proximity", parents=[common], help="proximity function m(f, rho)")
    func_args(sp)
    sp.set_defaults(run=cmd_proximity)

    sp = sub.add_parser("logder-lemma", parents=[common], help="log-derivative lemma margin")
    func_args(sp)
    sp.set_defaults(run=cmd_logder_lemma)

    sp = sub.add_parser("abc-int", parents=[common], help="abc test for integer triples")
    sp.add_argument("--triple", action="append", help='"a,b,c" (repeatable)')
    sp.add_argument("--file", help="file with one triple per line")
    sp.set_defaults(run=cmd_abc_int)

    sp = sub.add_parser("abc-scan", parents=[common], help="scan primitive triples with c <= N")
    sp.add_argument("--max-c", type=int, required=True)
    sp.add_argument("--top", type=int, default=10)
    sp.set_defaults(run=cmd_abc_scan)

    sp = sub.add_parser("product-formula", parents=[common], help="product-formula residual over Q")
    sp.add_argument("--x", action="append", required=True, help='nonzero rational "p/q" (repeatable)')
    sp.set_defaults(run=cmd_product_formula)
    return p


# flags whose values are expressions and may legitimately start with "-"
_EXPR_FLAGS = {"--a", "--b", "--c", "--f", "--triple", "--x"}


def _attach_values(argv: list[str]) -> list[str]:
    """Rewrite ``--b -2*z`` as ``--b=-2*z`` so argparse does not read the value as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _EXPR_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        args.config = RunConfig.from_env(
            quad_tol=args.quad_tol,
            root_tol=args.root_tol,
            cluster_tol=args.cluster_tol,
            guard_rel=args.guard_rel,
            max_quad_points=args.max_quad_points,
            output_format=args.output_format,
            workers=args.workers,
        )
        return args.run(args)
    except (UsageError, *INPUT_ERRORS) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
