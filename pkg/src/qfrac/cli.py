"""Command-line front end.

Every subcommand writes one document to stdout (or ``--out``) and diagnostics
to stderr.  Exit status is 0 on success, 1 on a library error (with an
``{"error": {"code", "message", "flag"}}`` record on stdout) and 2 on usage
errors.  Floats are printed in shortest round-trip form, so output is
byte-identical for identical arguments regardless of ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import core, families, gauss, hyper, operators
from .core import Base, DEFAULT_POLICY, Real, TruncationPolicy
from .errors import DomainError, QFracError

ENV_MAX_TERMS = "QFRAC_MAX_TERMS"


class UsageError(Exception):
    pass


# -- argument helpers -------------------------------------------------------------------


def _parse_params(text: Optional[str]) -> Dict[str, float]:
    out: Dict[str, float] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, val = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--params expects k=v pairs, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--params value for {key.strip()!r} is not a number: {val!r}") from None
    return out


def _parse_list(text: Optional[str], flag: str) -> Tuple[float, ...]:
    if text is None or not text.strip():
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _parse_sweep(text: str) -> Tuple[str, List[float]]:
    var, sep, spec = text.partition("=")
    var = var.strip()
    if not sep or not var:
        raise UsageError(f"--sweep expects VAR=start:stop:count or VAR=v1,v2,..., got {text!r}")
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            a, b = float(start), float(stop)
            vals = [a] if n == 1 else [a + i * (b - a) / (n - 1) for i in range(n)]
        else:
            vals = [float(v) for v in spec.split(",")]
    except ValueError:
        raise UsageError(f"malformed --sweep {text!r}") from None
    return var, vals


def _policy(args) -> TruncationPolicy:
    max_terms = DEFAULT_POLICY.max_terms
    env = os.environ.get(ENV_MAX_TERMS)
    if env is not None:
        try:
            max_terms = int(env)
        except ValueError:
            raise UsageError(f"{ENV_MAX_TERMS} must be an integer, got {env!r}") from None
    if getattr(args, "max_terms", None) is not None:
        max_terms = args.max_terms
    rel_tol = args.tol if getattr(args, "tol", None) is not None else DEFAULT_POLICY.rel_tol
    try:
        return TruncationPolicy(rel_tol=rel_tol, abs_floor=DEFAULT_POLICY.abs_floor,
                                max_terms=max_terms,
                                min_terms=min(DEFAULT_POLICY.min_terms, max(max_terms, 0)))
    except DomainError as exc:
        raise DomainError(str(exc), flag=exc.flag or "--max-terms") from exc


def _family(name: Optional[str]) -> families.FamilyId:
    if name is None:
        raise DomainError("--family is required", flag="--family")
    try:
        return families.FamilyId(name)
    except ValueError:
        raise DomainError(
            f"unknown family {name!r}; choose from {[f.value for f in families.FamilyId]}", flag="--family"
        ) from None


def _need(value, flag: str):
    if value is None:
        raise DomainError(f"{flag} is required", flag=flag)
    return value


# -- eval targets -----------------------------------------------------------------------


class Point:
    """Flag values for one evaluation; table sweeps override fields per grid point."""

    SCALARS = ("x", "lambda", "q", "z", "n", "mu", "c")

    def __init__(self, args):
        self.fn = args.fn
        self.x = args.x
        self.lam = args.lam
        self.q = args.q
        self.z = args.z
        self.n = args.n
        self.mu = args.mu
        self.c = args.c
        self.params = _parse_params(args.params)
        self.num = _parse_list(args.num, "--num")
        self.den = _parse_list(args.den, "--den")
        self.family = args.family
        self.path = args.path
        self.sign = args.sign
        self.variant = args.variant
        self.variant_e = args.e_variant

    def with_value(self, var: str, value: float) -> "Point":
        p = object.__new__(Point)
        p.__dict__.update(self.__dict__)
        p.params = dict(self.params)
        if var in self.SCALARS:
            setattr(p, "lam" if var == "lambda" else var, value)
        else:
            p.params[var] = value
        return p


def _int(v: float, flag: str) -> int:
    if v is None or int(v) != v:
        raise DomainError(f"{flag} must be an integer, got {v!r}", flag=flag)
    return int(v)


def _eval_q_gamma(pt: Point, q: float, pol) -> float:
    return core.q_gamma(_need(pt.x, "--x"), q, pol)


def _eval_q_bracket(pt: Point, q: float, pol) -> float:
    return core.q_bracket(_need(pt.x, "--x"), q)


def _eval_q_pochhammer(pt: Point, q: float, pol) -> float:
    a = pt.params.get("a", pt.x)
    order = None if pt.lam is None else Real(pt.lam)
    return core.qpochhammer(_need(a, "--x"), q, order, pol)


def _eval_q_binomial(pt: Point, q: float, pol) -> float:
    return core.q_binomial_general(_need(pt.x, "--x"), _int(pt.n, "--n"), q)


def _eval_q_exp(pt: Point, q: float, pol) -> float:
    return core.q_exponential(_need(pt.x, "--x"), q, pt.variant_e, pol)


def _eval_phi(pt: Point, q: float, pol) -> float:
    return hyper.phi(pt.num, pt.den, q, _need(pt.z, "--z"), pol)


_OPERATOR_VARIANTS = {
    "gl": operators.Variant.GL_DQ,
    "dq_inverse": operators.Variant.DQ_INVERSE,
    "dq_inverse_star": operators.Variant.DQ_INVERSE_STAR,
    "rl": operators.Variant.RL,
    "integral": operators.Variant.INTEGRAL,
}


def _eval_operator(pt: Point, q: float, pol) -> float:
    mu = _need(pt.mu, "--mu")
    f = operators.ScalarFunction.power(mu)
    order = operators.FractionalOrder(_need(pt.lam, "--lambda"), _OPERATOR_VARIANTS[pt.variant], pt.c or 0.0)
    kw = {"sign_convention": pt.sign} if order.variant is operators.Variant.DQ_INVERSE else {}
    return operators.apply(f, order, _need(pt.x, "--x"), q, pol, **kw)


def _eval_family(pt: Point, q: float, pol) -> float:
    fam = _family(pt.family)
    params = families.make_params(fam, pt.params)
    for w in families.admissibility_warnings(fam, params, q):
        print(f"qfrac: warning: {fam.value}: {w}", file=sys.stderr)
    path = families.Path(pt.path)
    sign = "real" if pt.sign == "strict" else pt.sign
    req = families.FamilyEvalRequest(fam, params, _need(pt.lam, "--lambda"), _need(pt.x, "--x"), path, pol, sign)
    return families.eval_family(req, q)


def _eval_classical(pt: Point, q: float, pol) -> float:
    fam = _family(pt.family)
    params = families.make_params(fam, pt.params)
    return families.eval_classical(fam, _int(pt.n, "--n"), params, _need(pt.x, "--x"), q, pol)


FUNCTIONS: Dict[str, Callable[[Point, float, TruncationPolicy], float]] = {
    "q_gamma": _eval_q_gamma,
    "q_bracket": _eval_q_bracket,
    "q_pochhammer": _eval_q_pochhammer,
    "q_binomial": _eval_q_binomial,
    "q_exp": _eval_q_exp,
    "phi": _eval_phi,
    "operator": _eval_operator,
    "family": _eval_family,
    "classical": _eval_classical,
}


def _evaluate(pt: Point, pol: TruncationPolicy) -> float:
    q = Base(_need(pt.q, "--q")).q
    return FUNCTIONS[pt.fn](pt, q, pol)


# -- output -------------------------------------------------------------------------------


def _num(v: float):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _clean(doc):
    if isinstance(doc, dict):
        return {k: _clean(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_clean(v) for v in doc]
    return _num(doc)


def _render(doc: dict, fmt: str, columns: Optional[Sequence[str]] = None) -> str:
    if fmt == "json":
        return json.dumps(_clean(doc), allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if columns is not None:
            w.writerow(columns)
            for row in doc["rows"]:
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        else:
            flat = {k: v for k, v in doc.items() if not isinstance(v, (dict, list))}
            w.writerow(list(flat))
            w.writerow([repr(v) if isinstance(v, float) else v for v in flat.values()])
        return buf.getvalue()
    # text
    if columns is not None:
        lines = ["\t".join(columns)]
        lines += ["\t".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in doc["rows"]]
        return "\n".join(lines) + "\n"
    return "".join(f"{k}: {json.dumps(_clean(v))}\n" for k, v in doc.items())


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------------------


def cmd_eval(args) -> None:
    pol = _policy(args)
    value = _evaluate(Point(args), pol)
    _emit(args, _render({"value": value}, args.format))


def cmd_table(args) -> None:
    pol = _policy(args)
    if not args.sweep:
        raise UsageError("table needs at least one --sweep")
    sweeps = [_parse_sweep(s) for s in args.sweep]
    names = [v for v, _ in sweeps]
    if len(set(names)) != len(names):
        raise UsageError("each --sweep variable may appear once")
    base = Point(args)
    grid = list(itertools.product(*(vals for _, vals in sweeps)))

    def one(values):
        pt = base
        for var, v in zip(names, values):
            pt = pt.with_value(var, v)
        try:
            return _evaluate(pt, pol)
        except QFracError as exc:
            where = ", ".join(f"{n}={v!r}" for n, v in zip(names, values))
            exc.args = (f"{exc} (at {where})",)
            raise

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            values = list(pool.map(one, grid))
    else:
        values = [one(g) for g in grid]
    rows = [list(g) + [v] for g, v in zip(grid, values)]
    columns = names + ["value"]
    if args.format == "json":
        _emit(args, _render({"columns": columns, "rows": rows}, "json"))
    else:
        _emit(args, _render({"rows": rows}, args.format, columns))


def cmd_verify(args) -> None:
    pol = _policy(args)
    if args.list:
        _emit(args, _render(hyper.catalog_document(), "json"))
        return
    ids = args.id or list(hyper.CATALOG)
    for i in ids:
        hyper.get_identity(i)
    if args.grid != "default":
        raise DomainError(f"only the declared grids are available, got --grid {args.grid!r}", flag="--grid")
    tol = args.tol_check if args.tol_check is not None else hyper.IDENTITY_TOL

    def one(i):
        return hyper.verify_case(i, policy=pol, tol=tol)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(one, ids))
    else:
        reports = [one(i) for i in ids]
    doc = {
        "identities": [
            {
                "id": r.id,
                "n_points": r.n_points,
                "max_rel_residual": r.max_rel_residual,
                "worst_point": r.worst_point,
                "passed": r.passed,
                "group": r.group,
            }
            for r in reports
        ],
        "variants": hyper.variant_verdicts(reports),
    }
    if args.format == "json":
        _emit(args, _render(doc, "json"))
    else:
        rows = [[r.id, r.n_points, r.max_rel_residual, "pass" if r.passed else "fail"] for r in reports]
        _emit(args, _render({"rows": rows}, args.format, ["id", "n_points", "max_rel_residual", "status"]))


def _gauss_params(args) -> gauss.GaussParams:
    p = _parse_params(args.params)
    missing = [k for k in ("a", "b", "c") if k not in p]
    unknown = sorted(set(p) - {"a", "b", "c"})
    if missing or unknown:
        raise DomainError("gauss --params needs exactly a, b, c", flag="--params")
    return gauss.GaussParams(p["a"], p["b"], p["c"], _need(args.lam, "--lambda"), _need(args.q, "--q"))


def _scan(text: Optional[str]) -> gauss.Scan:
    if text is None:
        return gauss.Scan()
    vals = _parse_list(text, "--scan")
    if len(vals) != 3:
        raise UsageError("--scan expects rho_min,rho_max,step")
    return gauss.Scan(*vals)


def _load_solution(path: Optional[str]) -> gauss.FrobeniusSolution:
    path = _need(path, "--in")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}", flag="--in") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not JSON: {exc.msg}", flag="--in") from None
    return gauss.FrobeniusSolution.from_json(doc)


def cmd_gauss(args) -> None:
    action = args.action
    if action == "roots":
        p = _gauss_params(args)
        roots = gauss.find_indicial_roots(p, _scan(args.scan))
        doc = {"roots": [{"rho": r.rho, "multiplicity": r.multiplicity, "residual": r.residual} for r in roots]}
        if args.format == "json":
            _emit(args, _render(doc, "json"))
        else:
            rows = [[r.rho, r.multiplicity, r.residual] for r in roots]
            _emit(args, _render({"rows": rows}, args.format, ["rho", "multiplicity", "residual"]))
    elif action == "solve":
        p = _gauss_params(args)
        if args.rho is None:
            roots = gauss.find_indicial_roots(p, _scan(args.scan))
            if not roots:
                raise DomainError("no indicial root in the scan window; pass --rho or widen --scan", flag="--scan")
            rho = roots[-1].rho
        else:
            rho = args.rho
        sol = gauss.frobenius_coefficients(p, rho, args.u0, args.N)
        _emit(args, json.dumps(_clean(sol.to_json()), allow_nan=False) + "\n")
    elif action == "residual":
        sol = _load_solution(args.input)
        z = _need(args.z, "--z")
        _emit(args, _render({"z": z, "residual": gauss.residual_check(sol, z, _policy(args))}, args.format))
    else:  # eval
        sol = _load_solution(args.input)
        z = _need(args.z, "--z")
        ev = gauss.evaluate_solution(sol, z)
        if ev.truncation_warning:
            print(f"qfrac: warning: last term {ev.last_term!r} is large relative to the sum", file=sys.stderr)
        doc = {"z": z, "value": ev.value, "last_term": ev.last_term, "truncation_warning": ev.truncation_warning}
        _emit(args, _render(doc, args.format))


def cmd_limits(args) -> None:
    pol = _policy(args)
    fam = _family(args.family)
    params = families.make_params(fam, _parse_params(args.params))
    n = _int(_need(args.n, "--n"), "--n")
    if args.steps:
        steps = _parse_list(args.steps, "--steps")
    else:
        steps = families.default_steps(n, 1 if args.side == "above" else -1)
    rep = families.limit_transition_report(fam, n, params, _need(args.x, "--x"), _need(args.q, "--q"),
                                           steps, pol, families.Path(args.path))
    doc = {
        "family": fam.value,
        "n": n,
        "target": rep.target,
        "records": [{"lambda": r.lam, "error": r.error} for r in rep.records],
        "monotone": rep.monotone_tail(),
        "final_error": rep.final_error,
    }
    if args.format == "json":
        _emit(args, _render(doc, "json"))
    else:
        rows = [[r.lam, r.error] for r in rep.records]
        _emit(args, _render({"rows": rows}, args.format, ["lambda", "error"]))


# -- parser --------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, fmt_default: str = "json") -> None:
    p.add_argument("--format", choices=("json", "csv", "text"), default=fmt_default)
    p.add_argument("--tol", type=float, help="relative truncation tolerance for series and products")
    p.add_argument("--max-terms", type=int, dest="max_terms", help="term ceiling for any single series")
    p.add_argument("--out", help="write the document to FILE instead of stdout")


def _target(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", choices=sorted(FUNCTIONS), required=True)
    p.add_argument("--q", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--n", type=float)
    p.add_argument("--mu", type=float, help="exponent of the power function for --fn operator")
    p.add_argument("--c", type=float, help="lower limit for --fn operator (integral/rl)")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--params", help="k=v,... family or function parameters")
    p.add_argument("--num", help="numerator parameters for --fn phi")
    p.add_argument("--den", help="denominator parameters for --fn phi")
    p.add_argument("--family", help="family id for --fn family/classical")
    p.add_argument("--path", choices=("rodrigues", "hyper"), default="hyper")
    p.add_argument("--sign", choices=("strict", "magnitude", "real"), default="strict",
                   help="sign convention for inverse-base orders (families treat strict as real)")
    p.add_argument("--variant", choices=sorted(_OPERATOR_VARIANTS), default="gl")
    p.add_argument("--e-variant", dest="e_variant", choices=("small_e", "big_E"), default="small_e")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfrac", description="Fractional q-calculus numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one function")
    _target(p)
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("table", help="evaluate a function over a grid")
    _target(p)
    _common(p, "csv")
    p.add_argument("--sweep", action="append", help="VAR=start:stop:count or VAR=v1,v2,...")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="check catalogued hypergeometric identities")
    p.add_argument("--id", action="append")
    p.add_argument("--grid", default="default")
    p.add_argument("--list", action="store_true", help="print the identity catalog")
    p.add_argument("--check-tol", dest="tol_check", type=float, help="pass threshold for relative residuals")
    p.add_argument("--threads", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gauss", help="fractional q-Gauss equation")
    p.add_argument("action", choices=("roots", "solve", "residual", "eval"))
    p.add_argument("--params", help="a=..,b=..,c=..")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--scan", help="rho_min,rho_max,step")
    p.add_argument("--rho", type=float)
    p.add_argument("--u0", type=float, default=1.0)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--in", dest="input")
    p.add_argument("--z", type=float)
    _common(p)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("limits", help="limit transition of a fractional family to its polynomial")
    p.add_argument("--family")
    p.add_argument("--n", type=float)
    p.add_argument("--params")
    p.add_argument("--x", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--side", choices=("above", "below"), default="above")
    p.add_argument("--steps", help="explicit lambda values approaching n")
    p.add_argument("--path", choices=("rodrigues", "hyper"), default="hyper")
    _common(p)
    p.set_defaults(func=cmd_limits)
    return parser


def _error_record(code: str, message: str, flag: Optional[str]) -> str:
    return json.dumps({"error": {"code": code, "message": message, "flag": flag}}) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        print("qfrac: error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qfrac: error: {exc}", file=sys.stderr)
        return 2
    except QFracError as exc:
        print(f"qfrac: {exc.code}: {exc}", file=sys.stderr)
        sys.stdout.write(_error_record(exc.code, str(exc), exc.flag))
        return 1
    except (ArithmeticError, ValueError, RecursionError) as exc:
        print(f"qfrac: EvaluationError: {type(exc).__name__}: {exc}", file=sys.stderr)
        sys.stdout.write(_error_record("EvaluationError", f"{type(exc).__name__}: {exc}", None))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
