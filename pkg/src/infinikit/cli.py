"""Command-line front end.

Exit codes: 0 success, 1 domain errors, 2 usage or syntax errors.
Every failure prints one line to stderr of the form `error[<code>]:
reason`.  Numeric output uses 12 significant digits; rational values
print exactly as p/q.  Given the same arguments and seed, output is
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import dixmier as dx
from . import hyperseq as hs
from . import levi_civita as lc
from . import opcalc as oc
from .bridge import parse_predicate, run_bridge
from .errors import ExprSyntaxError, InfinikitError, PreconditionError
from .exprs import eval_expr, parse, parse_prefix, print_expr
from ._rat import is_rat, rat_str

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _g12(x: float) -> str:
    return "%.12g" % float(x)


def _number_text(x) -> str:
    if is_rat(x) or isinstance(x, int):
        return rat_str(x)
    return _g12(x)


def _number_doc(x):
    if is_rat(x):
        return rat_str(x)
    if isinstance(x, (int, float)):
        return x
    return str(x)


def _parse_rat(text: str, what: str):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise _UsageError(f"{what} must be a rational like 3 or -1/2, got {text!r}") from exc


def _parse_cap(text: str) -> int:
    # accepts plain integers and the 2^20 power form
    t = text.strip()
    try:
        if "^" in t:
            base, _, exp = t.partition("^")
            return int(base) ** int(exp)
        return int(t)
    except ValueError as exc:
        raise _UsageError(f"bad cap {text!r}: want an integer or 2^k") from exc


def _seed_or_env(value):
    if value is not None:
        return value
    env = os.environ.get("INFINIKIT_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError as exc:
        raise _UsageError(f"INFINIKIT_SEED must be an integer, got {env!r}") from exc


def _emit(args, text: str, doc: dict):
    if args.format == "doc":
        print(json.dumps(doc, sort_keys=True))
    else:
        print(text)


def _seq_from_args(expr_text: str, prefix_path: str | None) -> hs.RateSeq:
    seq = eval_expr(parse(expr_text), "seq")
    if prefix_path is None:
        return seq
    with open(prefix_path, "r", encoding="utf-8") as fh:
        entries = parse_prefix(fh.read())
    return hs.RateSeq(
        seq.monomials,
        entries,
        exact=seq.exact,
        opaque=seq.opaque,
        sampler=seq._sampler,
    )


# -- subcommands ------------------------------------------------------


def _cmd_eval(args) -> int:
    tree = parse(args.expr)
    if args.mode == "lc":
        value = eval_expr(tree, "lc")
        text = lc.format_lc(value)
        doc = {
            "kind": "lc",
            "text": text,
            "terms": [[rat_str(q), rat_str(c)] for q, c in value.terms],
        }
    else:
        value = eval_expr(tree, "seq")
        text = hs.format_rate(value)
        doc = {
            "kind": "rate",
            "text": text,
            "exact": value.exact,
            "opaque": value.opaque,
        }
    _emit(args, text, doc)
    return 0


def _cmd_st(args) -> int:
    value = lc.standard_part(eval_expr(parse(args.expr), "lc"))
    _emit(args, rat_str(value), {"st": rat_str(value)})
    return 0


def _cmd_classify(args) -> int:
    verdict = lc.classify(eval_expr(parse(args.expr), "lc")).value
    _emit(args, verdict, {"class": verdict})
    return 0


def _cmd_diff(args) -> int:
    coeffs = eval_expr(parse(args.f), "poly")
    x0 = _parse_rat(args.x0, "--x0")
    value = lc.derivative(coeffs, x0)
    _emit(
        args,
        rat_str(value),
        {"derivative": rat_str(value), "f": str(coeffs), "x0": rat_str(x0)},
    )
    return 0


def _cmd_seq(args) -> int:
    seq = _seq_from_args(args.expr, args.prefix)
    try:
        limit = _number_text(hs.standard_part_seq(seq))
    except InfinikitError:
        limit = "none"
    text = f"rate: {hs.format_rate(seq)}\nlimit: {limit}"
    doc = {
        "rate": hs.format_rate(seq),
        "exact": seq.exact,
        "opaque": seq.opaque,
        "prefix": [[i, _number_doc(v)] for i, v in seq.prefix],
        "limit": None if limit == "none" else limit,
    }
    _emit(args, text, doc)
    return 0


def _cmd_compare(args) -> int:
    a = eval_expr(parse(args.a), "seq")
    b = eval_expr(parse(args.b), "seq")
    verdict = hs.dominance_compare(a, b).value
    _emit(args, verdict, {"verdict": verdict})
    return 0


def _cmd_spectrum(args) -> int:
    T = oc.read_matrix(args.matrix)
    seed = _seed_or_env(args.conjugate)
    if seed is not None:
        T = oc.conjugate(T, oc.random_orthogonal(T.dim, seed))
    tail = eval_expr(parse(args.tail), "seq") if args.tail else None
    spectral = oc.spectrum_desc(T, tail)
    doc = {
        "dim": T.dim,
        "values": list(spectral.values),
        "tail": hs.format_rate(tail) if tail is not None else None,
    }
    _emit(args, oc.format_spectral(spectral), doc)
    return 0


def _cmd_dixmier(args) -> int:
    tail = eval_expr(parse(args.tail), "seq")
    spectral = oc.SpectralSequence((), tail=tail)
    est = dx.dixmier_estimate(spectral, _parse_cap(args.cap), tol_meas=args.tol)
    if args.points:
        with open(args.points, "w", encoding="utf-8") as fh:
            for n, g in zip(est.schedule, est.gamma_values):
                fh.write(f"{n} {_g12(g)}\n")
    lines = [f"N={n} gamma={_g12(g)}" for n, g in zip(est.schedule, est.gamma_values)]
    lines.append(f"measurable: {'yes' if est.measurable else 'no'}")
    lines.append(f"value: {_g12(est.value) if est.value is not None else 'none'}")
    lines.append(f"liminf: {_g12(est.liminf)}")
    lines.append(f"limsup: {_g12(est.limsup)}")
    lines.append(f"spread: {_g12(est.spread)}")
    _emit(args, "\n".join(lines), est.as_doc())
    return 0


def _cmd_bridge(args) -> int:
    T = oc.read_matrix(args.matrix)
    seed = _seed_or_env(args.seed)
    if seed is not None:
        T = oc.conjugate(T, oc.random_orthogonal(T.dim, seed))
    tail = eval_expr(parse(args.tail), "seq")
    predicates = [parse_predicate(p) for p in _split_predicates(args.predicates)]
    report = run_bridge(T, tail, predicates)
    lines = [f"spectrum: {' '.join(_g12(v) for v in report.spectral.values)}"]
    lines.append(f"robinson: {hs.format_rate(report.robinson)}")
    lines.append(f"H: {hs.format_rate(report.H)}")
    lines.append(f"H_int: {hs.format_rate(report.H_int)}")
    for name, verdict in report.queries:
        lines.append(f"query {name}: {verdict.value}")
    enc = report.enclosure
    lines.append(f"enclosure: {enc} (decided_bits={enc.decided_bits})")
    lines.append(f"note: {report.exhibitability_note}")
    _emit(args, "\n".join(lines), report.as_doc())
    return 0


def _split_predicates(text: str) -> list[str]:
    # commas inside {...} belong to set literals, not the list
    pieces, depth, current = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            pieces.append("".join(current))
            current = []
        else:
            current.append(ch)
    pieces.append("".join(current))
    out = [p.strip() for p in pieces if p.strip()]
    if not out:
        raise PreconditionError("need at least one predicate")
    return out


# -- parser -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="infinikit",
        description="Exact infinitesimal arithmetic, rate sequences, "
        "spectral truncations, and the bridge between them.",
        epilog="INFINIKIT_SEED supplies a default seed where --seed or "
        "--conjugate is omitted; INFINIKIT_PURE=1 forces the pure-python "
        "kernels.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument(
            "--format", choices=("text", "doc"), default="text",
            help="doc switches to the keyed structured-document form",
        )
        return p

    p = add("eval", _cmd_eval, "evaluate an expression and print it canonically")
    p.add_argument("expr")
    p.add_argument("--mode", choices=("lc", "seq"), default="lc")

    p = add("st", _cmd_st, "standard part of a finite expression")
    p.add_argument("expr")

    p = add("classify", _cmd_classify, "magnitude class of an expression")
    p.add_argument("expr")

    p = add("diff", _cmd_diff, "exact derivative of a polynomial at a point")
    p.add_argument("--f", required=True, help="polynomial in x")
    p.add_argument("--x0", required=True, help="rational point, e.g. 3 or -1/2")

    p = add("seq", _cmd_seq, "build a rate sequence, with optional prefix file")
    p.add_argument("--expr", required=True)
    p.add_argument("--prefix", help="file holding overrides like {1:0.5, 2:0.25}")

    p = add("compare", _cmd_compare, "dominance order of two rate sequences")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("spectrum", _cmd_spectrum, "singular values of a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--conjugate", type=int, help="conjugate by a seeded orthogonal first")
    p.add_argument("--tail", help="rate class continuing the spectrum")

    p = add("dixmier", _cmd_dixmier, "logarithmic-mean trace estimate of a tail")
    p.add_argument("--tail", required=True)
    p.add_argument("--cap", default="2^20", help="largest N, accepts 2^20 form")
    p.add_argument("--tol", type=float, default=dx.DEFAULT_TOL_MEAS)
    p.add_argument("--points", help="write (N, gamma) pairs to this file")

    p = add("bridge", _cmd_bridge, "operator to dyadic enclosure, stage by stage")
    p.add_argument("--matrix", required=True)
    p.add_argument("--tail", required=True)
    p.add_argument("--predicates", required=True,
                   help="comma-separated, e.g. 'm>10,evens,squares'")
    p.add_argument("--seed", type=int, help="conjugate by a seeded orthogonal first")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ExprSyntaxError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except _UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2
    except InfinikitError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
