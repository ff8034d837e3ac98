"""Command-line interface: ``charvar <subcommand> ...``.

Exit codes: 0 success, 1 domain error (or failed verification), 2 parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Sequence

from . import __version__
from .errors import CharVarError, ParseError
from .ring import Polynomial
from .tangle import MontesinosKnot, RationalTangle, knot_classify, parse_fraction

SUBCOMMANDS = ("tangle-traces", "theta", "riley", "x1", "x2", "xprime", "genericity", "verify")
DEFAULT_TOLERANCE = 1e-8

_ITEM = re.compile(r"\s*(-?\d+)(?:\s*/\s*(\d+))?\s*")


def parse_knot(spec: str) -> MontesinosKnot:
    """Parse ``M(p1/q1,...,pm/qm)``; q defaults to 1, whitespace is ignored."""
    m = re.match(r"\s*M\s*\(", spec)
    if not m:
        raise ParseError("knot must start with 'M('", 0)
    pos = m.end()
    fractions = []
    while True:
        item = _ITEM.match(spec, pos)
        if not item or not item.group(0).strip():
            raise ParseError("expected an integer or p/q", pos)
        p, q = int(item.group(1)), int(item.group(2) or 1)
        if q == 0:
            raise ParseError("denominator must be positive", item.start(2))
        if p == 0:
            raise ParseError("numerator must be nonzero", item.start(1))
        fractions.append(parse_fraction(f"{p}/{q}"))
        pos = item.end()
        if pos < len(spec) and spec[pos] == ",":
            pos += 1
            continue
        if pos < len(spec) and spec[pos] == ")":
            pos += 1
            break
        raise ParseError("expected ',' or ')'", pos)
    rest = spec[pos:]
    if rest.strip():
        raise ParseError("unexpected trailing characters", pos + len(rest) - len(rest.lstrip()))
    return knot_classify(fractions)


def _parse_tangle(text: str, cf: str | None) -> RationalTangle:
    f = parse_fraction(text)
    if cf is None:
        return RationalTangle.from_fraction(f)
    try:
        ks = [int(k) for k in cf.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad continued fraction {cf!r}") from exc
    return RationalTangle.from_fraction(f, ks)


def _tolerance(args) -> float:
    if args.tolerance is not None:
        return args.tolerance
    env = os.environ.get("CHARVAR_TOLERANCE")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise ParseError(f"CHARVAR_TOLERANCE={env!r} is not a number") from exc
    return DEFAULT_TOLERANCE


# ---- rendering --------------------------------------------------------------

def _poly_doc(p: Polynomial) -> dict:
    return {"text": str(p), "latex": p.to_latex(), "poly": p.to_json()}


def _latex_text(s: str) -> str:
    for a, b in (("\\", r"\textbackslash{}"), ("_", r"\_"), ("^", r"\^{}"), ("{", r"\{"),
                 ("}", r"\}"), ("#", r"\#"), ("&", r"\&"), ("%", r"\%"), ("$", r"\$")):
        s = s.replace(a, b)
    return s


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = []
    if fmt == "latex":
        lines.append(f"% {doc['subcommand']} {doc['input']}")
        if doc.get("polynomials"):
            lines.append(r"\begin{align*}")
            body = [f"{name} &= {p['latex']}" for name, p in doc["polynomials"].items()]
            lines.append(" \\\\\n".join(body))
            lines.append(r"\end{align*}")
        for key in ("equations", "inequations"):
            if doc.get(key):
                rel = "= 0" if key == "equations" else r"\neq 0"
                lines.append(f"% {key}")
                lines.append(r"\begin{align*}")
                body = [f"{e['poly_latex']} &{rel} && \\text{{{_latex_text(e['note'])}}}"
                        for e in doc[key]]
                lines.append(" \\\\\n".join(body))
                lines.append(r"\end{align*}")
        for key in ("report", "systems"):
            if key in doc:
                lines.append("% " + json.dumps(doc[key], sort_keys=True))
        return "\n".join(lines)
    lines.append(f"{doc['subcommand']} {doc['input']}")
    for name, p in doc.get("polynomials", {}).items():
        lines.append(f"  {name} = {p['text']}")
    if "variables" in doc:
        lines.append("  variables: " + ", ".join(doc["variables"]))
    for key in ("equations", "inequations"):
        if doc.get(key):
            lines.append(f"  {key}:")
            rel = "= 0" if key == "equations" else "!= 0"
            for e in doc[key]:
                lines.append(f"    {e['poly_text']} {rel}    [{e['note']}]")
    for key in ("report", "systems", "metadata"):
        if key in doc:
            lines.append(f"  {key}: " + json.dumps(doc[key], sort_keys=True))
    for note in doc.get("notes", []):
        lines.append(f"  note: {note}")
    return "\n".join(lines)


def _system_doc(sys_, sub: str, inp: str) -> dict:
    def eqs(items):
        return [{"note": e.note, "poly": e.poly.to_json(), "poly_text": str(e.poly),
                 "poly_latex": e.poly.to_latex()} for e in items]
    return {"subcommand": sub, "input": inp, "component": sys_.component,
            "variables": list(sys_.variables), "laurent": list(sys_.laurent),
            "equations": eqs(sys_.equations), "inequations": eqs(sys_.inequations),
            "metadata": sys_.metadata}


# ---- subcommands ------------------------------------------------------------

def cmd_tangle_traces(args) -> tuple:
    from .trace_engine import trace_triple
    T = _parse_tangle(args.fraction, args.cf)
    tr = trace_triple(T)
    doc = {"subcommand": "tangle-traces", "input": str(T), "cf": list(T.cf),
           "polynomials": {k: _poly_doc(v) for k, v in tr.as_dict().items()}}
    return doc, 0


def cmd_theta(args) -> tuple:
    from .reducible import theta_pair
    T = _parse_tangle(args.fraction, args.cf)
    th = theta_pair(T)
    doc = {"subcommand": "theta", "input": str(T), "cf": list(T.cf),
           "polynomials": {"theta_ne": _poly_doc(th.theta_ne), "theta_sw": _poly_doc(th.theta_sw)}}
    return doc, 0


def cmd_riley(args) -> tuple:
    from .reducible import riley_even, riley_odd
    T = _parse_tangle(args.fraction, args.cf)
    polys = {}
    if T.is_odd:
        if args.iota is not None:
            raise CharVarError(f"{T} is odd; --iota applies to even tangles only")
        polys["phi"] = _poly_doc(riley_odd(T).body)
    else:
        for iota in ([args.iota] if args.iota is not None else [1, -1]):
            polys[f"phi^{iota:+d}"] = _poly_doc(riley_even(T, iota).body)
    doc = {"subcommand": "riley", "input": str(T), "cf": list(T.cf), "polynomials": polys,
           "notes": ["sign normalized: positive leading coefficient"]}
    return doc, 0


def cmd_x1(args) -> tuple:
    from .variety import build_x1
    K = parse_knot(args.knot)
    return _system_doc(build_x1(K), "x1", str(K)), 0


def cmd_x2(args) -> tuple:
    from .variety import build_x2
    K = parse_knot(args.knot)
    return _system_doc(build_x2(K), "x2", str(K)), 0


def cmd_xprime(args) -> tuple:
    from .variety import SignVector, build_xprime, enumerate_sign_vectors
    K = parse_knot(args.knot)
    if args.epsilon is not None:
        doc = _system_doc(build_xprime(K, SignVector.parse(args.epsilon)), "xprime", str(K))
        return doc, 0
    systems = [_system_doc(build_xprime(K, eps), "xprime", str(K))
               for eps in enumerate_sign_vectors(K)]
    doc = {"subcommand": "xprime", "input": str(K), "systems": systems}
    if args.format != "json":
        doc["systems"] = [{"epsilon": s["metadata"]["epsilon"],
                           "equations": [e["poly_text"] + " = 0" for e in s["equations"]]}
                          for s in systems]
    return doc, 0


def cmd_genericity(args) -> tuple:
    from .variety import genericity_check
    K = parse_knot(args.knot)
    rep = genericity_check(K)
    return {"subcommand": "genericity", "input": str(K), "report": rep.to_json()}, 0


def _load_point(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read point file {path!r}: {exc}") from exc
    point = {}
    for k, v in raw.items():
        if isinstance(v, (list, tuple)) and len(v) == 2:
            point[k] = complex(float(v[0]), float(v[1]))
        elif isinstance(v, (int, float)):
            point[k] = complex(v)
        else:
            raise ParseError(f"point value for {k!r} must be [re, im] or a number")
    return point


def _search_point(K, component, eps, seed, tol):
    """Seeded damped-Newton search; keeps the first admissible point the oracle accepts."""
    import numpy as np
    from .oracle import newton_refine, verify_rep_montesinos
    from .variety import build_x2, build_xprime
    rng = np.random.default_rng(seed)
    if component == "X2":
        system = build_x2(K)
        fixed = {"t": complex(rng.normal(), rng.normal())}
    else:
        system = build_xprime(K, eps)
        fixed = {}
    for _ in range(40):
        start = {v: complex(rng.normal(), rng.normal()) for v in system.variables if v not in fixed}
        try:
            point = newton_refine(system, start, fixed=fixed)
        except CharVarError:
            continue
        if any(abs(e.poly.evaluate(point)) < 1e-3 for e in system.inequations):
            continue
        if verify_rep_montesinos(K, point, component, eps).ok(tol):
            return point
    raise CharVarError("Newton search found no admissible point")


def cmd_verify(args) -> tuple:
    from .oracle import verify_rep_montesinos
    from .variety import SignVector
    K = parse_knot(args.knot)
    tol = _tolerance(args)
    comp = {"x1": "X1", "x2": "X2", "xprime": "XPrime"}[args.component.lower()]
    eps = SignVector.parse(args.epsilon) if args.epsilon else None
    if comp == "XPrime" and eps is None:
        raise CharVarError("--epsilon is required for X' verification")
    notes = []
    if args.point:
        point = _load_point(args.point)
    else:
        if comp == "X1":
            raise CharVarError("X1 verification needs --point")
        point = _search_point(K, comp, eps, args.seed, tol)
        notes.append(f"point found by damped Newton from seed {args.seed} (not certified)")
    rep = verify_rep_montesinos(K, point, comp, eps)
    doc = {"subcommand": "verify", "input": str(K),
           "point": {k: [v.real, v.imag] for k, v in sorted(point.items())},
           "report": {**rep.to_json(), "tolerance": tol, "ok": rep.ok(tol)},
           "notes": notes}
    return doc, 0 if rep.ok(tol) else 1


# ---- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charvar", description=__doc__.splitlines()[0])
    # accept negative fractions such as -7/3 as positionals
    parser._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")
    parser.add_argument("--version", action="version", version=f"charvar {__version__}")
    parser.add_argument("--list-subcommands", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common._negative_number_matcher = parser._negative_number_matcher
    common.add_argument("--format", choices=("text", "json", "latex"), default="text")
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="subcommand")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p._negative_number_matcher = parser._negative_number_matcher
        p.set_defaults(func=func)
        return p

    for name, func, help_ in (("tangle-traces", cmd_tangle_traces, "z, zdot, zgrave of a tangle"),
                              ("theta", cmd_theta, "theta^ne, theta^sw of a tangle"),
                              ("riley", cmd_riley, "Riley polynomial of N(T)")):
        p = add(name, func, help_)
        p.add_argument("fraction")
        p.add_argument("--cf", help="explicit continued fraction k1,...,ks")
        if name == "riley":
            p.add_argument("--iota", type=int, choices=(1, -1))
    for name, func, help_ in (("x1", cmd_x1, "system for X1"), ("x2", cmd_x2, "system for X2"),
                              ("xprime", cmd_xprime, "systems for X'"),
                              ("genericity", cmd_genericity, "genericity test for X'")):
        p = add(name, func, help_)
        p.add_argument("knot")
        if name == "xprime":
            p.add_argument("--epsilon", help="sign vector such as +,-,0")
    p = add("verify", cmd_verify, "verify a variety point with the matrix oracle")
    p.add_argument("knot")
    p.add_argument("--point", help="JSON file mapping variable -> [re, im]")
    p.add_argument("--component", default="X2", choices=("X1", "X2", "XPrime", "x1", "x2", "xprime"))
    p.add_argument("--epsilon")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple:
    """Parse and execute; returns (output text, exit code)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_subcommands:
        return "\n".join(SUBCOMMANDS), 0
    if not args.subcommand:
        return parser.format_usage().rstrip(), 2
    try:
        doc, code = args.func(args)
    except ParseError as exc:
        return f"parse error: {exc}", 2
    except CharVarError as exc:
        return f"error ({type(exc).__name__}): {exc}", 1
    return _render(doc, args.format), code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        text, code = run(argv)
    except SystemExit as exc:  # argparse errors and --help/--version
        return int(exc.code or 0)
    stream = sys.stdout if code == 0 or text and not text.startswith(("error", "parse error")) else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
