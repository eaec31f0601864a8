"""Command-line front end.

Exit codes: 0 when every verdict is positive, 1 when a check or validation
fails, 2 for usage, parse or configuration errors, 3 when fuel or the
enumeration cap left the answer open.  Results go to stdout, diagnostics to
stderr.
"""
from __future__ import annotations

import argparse
import csv
import importlib
import json
import sys
from pathlib import Path
from types import ModuleType
from typing import Optional, Sequence

from . import consequences as C
from .cases import CASES, get_case
from .cases.common import DATA, ParamError, coerce_params
from .dist import DistributionError
from .lang import types as T
from .lang.domains import DomainDecl, DomainError
from .lang.parser import ParseError, parse_assertion, parse_program
from .lang.semantics import FuelExhausted, interpret, pushforward
from .logic.checker import VerifiedJudgment, audit_proof
from .logic.enumerate import DEFAULT_CAP, CapacityError
from .logic.proof import Judgment, script_from_json
from .logic.semantics import validate_semantics
from .values import fmt_prob, to_json

OK, FAIL, USAGE, OPEN = 0, 1, 2, 3
DIST_SCHEMA = "prhl-dist/1"


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _diag(kind: str, msg: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": msg, **extra}, sort_keys=True), file=sys.stderr)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


# libraries -------------------------------------------------------------------

class Library:
    """Functions and constant overrides contributed by ``--lib``."""

    def __init__(self, module: Optional[ModuleType] = None, params: dict = {}):
        self.module = module
        self.params = None
        self.functions = T.Functions()
        self.overrides: dict = {}
        if module is None:
            if params:
                raise UsageError("--param needs --lib (or a proof file naming its case)")
            return
        if hasattr(module, "Params"):
            self.params = coerce_params(module.Params, params)
        elif params:
            raise UsageError(f"library {module.__name__} takes no parameters")
        if hasattr(module, "functions"):
            self.functions = module.functions(self.params)
        if hasattr(module, "overrides"):
            self.overrides = module.overrides(self.params)


def _module(name: str) -> ModuleType:
    if name in CASES:
        return CASES[name]
    try:
        return importlib.import_module(name)
    except ImportError as e:
        raise UsageError(f"cannot load library {name!r}: {e}") from None


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _library(args, script: Optional[dict] = None) -> Library:
    params = _params(args.param)
    name = args.lib
    if name is None and script and isinstance(script.get("library"), dict):
        lib = script["library"]
        name = lib.get("case")
        params = {**{k: _param_text(v) for k, v in lib.get("params", {}).items()}, **params}
    return Library(_module(name) if name else None, params)


def _param_text(v) -> str:
    if isinstance(v, list):
        return ",".join(map(str, v))
    return str(v)


# inputs ----------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _json_arg(text: str, what: str):
    if text.startswith("@"):
        text = _read(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{what} is not valid JSON: {e}") from None


def _program(path: str, lib: Library):
    return parse_program(_read(path), functions=lib.functions, overrides=lib.overrides).check()


def _memory(obj, prog) -> dict:
    if not isinstance(obj, dict):
        raise UsageError("--memory must be a JSON object")
    mem = {}
    for name, val in obj.items():
        t = prog.types.get(name)
        if t is None:
            raise UsageError(f"--memory sets undeclared variable {name!r}")
        try:
            mem[name] = T.decode(val, t)
        except ValueError as e:
            raise UsageError(f"--memory value for {name}: {e}") from None
    return mem


def _judgment(args, need_proof: bool = True):
    script = _json_arg("@" + args.proof, "proof file") if args.proof else None
    lib = _library(args, script)
    p1, p2 = _program(args.prog1, lib), _program(args.prog2, lib)
    enums = {**p1.enums, **p2.enums}
    proof = None
    if script is not None:
        try:
            pre, post, proof = script_from_json(script, functions=lib.functions, enums=enums)
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"bad proof file: {e}") from None
    elif need_proof:
        raise UsageError("--proof is required")
    else:
        pre, post = None, None
    consts = {**lib.overrides}
    if getattr(args, "pre", None):
        pre = parse_assertion(args.pre, functions=lib.functions, enums=enums, consts=consts)
    if getattr(args, "post", None):
        post = parse_assertion(args.post, functions=lib.functions, enums=enums, consts=consts)
    if pre is None or post is None:
        raise UsageError("pre- and postcondition needed (--proof or --pre/--post)")
    if not args.domains:
        raise UsageError("--domains is required")
    try:
        extra = DomainDecl.from_json(_json_arg("@" + args.domains, "domains file"), enums=enums)
    except DomainError as e:
        raise UsageError(f"bad domains file: {e}") from None
    types = {**p2.types, **p1.types}
    dom = p1.domain_decl(extra).with_types(types).with_domains(p2.domains)
    dom = dom.with_domains(extra.domains, extra.sided)
    return Judgment(p1.body, p2.body, pre, post), proof, dom


# commands ----------------------------------------------------------------------

def cmd_interpret(args) -> int:
    lib = _library(args)
    prog = _program(args.prog, lib)
    mem = _memory(_json_arg(args.memory, "--memory"), prog)
    try:
        mu = interpret(prog.body, mem, args.fuel, drop=args.drop)
    except FuelExhausted as e:
        _diag("fuel", str(e), residual=fmt_prob(e.residual))
        return OPEN
    out = pushforward(mu, prog.output)
    rows = [(to_json(v), fmt_prob(q)) for v, q in out.sorted_items()]
    if args.format == "json":
        print(_dump({"schema": DIST_SCHEMA, "entries": [list(r) for r in rows], "mass": fmt_prob(out.mass)}))
    elif args.format == "csv":
        print(f"# {DIST_SCHEMA}")
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["value", "probability"])
        for v, q in rows:
            w.writerow([json.dumps(v, sort_keys=True, separators=(",", ":")), q])
    else:
        for v, q in rows:
            print(f"{json.dumps(v, sort_keys=True):>12}  {q}")
        print(f"{'mass':>12}  {fmt_prob(out.mass)}")
    return OK


def _verdict_code(status: str) -> int:
    return {"accepted": OK, "valid": OK, "rejected": FAIL, "invalid": FAIL}.get(status, OPEN)


def cmd_check(args) -> int:
    j, proof, dom = _judgment(args)
    rep = audit_proof(j, proof, dom, args.fuel, args.cap)
    if args.format == "human":
        print(f"proof {rep.status} ({len(rep.obligations)} obligations)")
        for o in rep.failures:
            print(f"  {o.result}: {o.rule} {o.kind} at {o.path}: {o.detail}")
            if o.counterexample:
                print(f"    counterexample {json.dumps(o.counterexample, sort_keys=True)}")
    else:
        print(_dump(rep.to_json()))
    if rep.status != "accepted":
        first = rep.failures[0]
        _diag("proof " + rep.status, f"{first.rule} {first.kind} at {first.path}: {first.detail}",
              counterexample=first.counterexample)
    return _verdict_code(rep.status)


def cmd_validate(args) -> int:
    j, _, dom = _judgment(args, need_proof=False)
    rep = validate_semantics(j, dom, args.fuel, args.cap)
    js = rep.to_json()
    if args.format == "human":
        print(f"judgment {js['status']} on {rep.checked} input pair(s)")
        if rep.counterexample:
            print(f"  counterexample {json.dumps(rep.counterexample, sort_keys=True)}")
    else:
        print(_dump(js))
    if rep.valid is not True:
        _diag("judgment " + js["status"], rep.detail or js["status"], counterexample=rep.counterexample)
    return _verdict_code(js["status"])


def _verified(args) -> Optional[VerifiedJudgment]:
    j, proof, dom = _judgment(args)
    rep = audit_proof(j, proof, dom, args.fuel, args.cap)
    if rep.status != "accepted":
        first = rep.failures[0]
        _diag("proof " + rep.status, f"{first.rule} {first.kind} at {first.path}: {first.detail}",
              counterexample=first.counterexample)
        return None
    return VerifiedJudgment(j, proof, rep, dom)


def _emit_reports(reports, kind: str, fmt: str, label: str) -> None:
    if fmt == "json":
        print(C.reports_json(reports, kind))
    elif fmt == "csv":
        sys.stdout.write((C.tv_csv if kind == "tv" else C.sd_csv)(reports, label))
    else:
        for r in reports:
            js = r.to_json()
            m = json.dumps(js["m1"], sort_keys=True), json.dumps(js["m2"], sort_keys=True)
            if kind == "tv":
                print(f"{m[0]} vs {m[1]}: tv {fmt_prob(r.tv)} <= {fmt_prob(r.bound)} "
                      f"{'ok' if r.holds else 'FAIL'}")
            else:
                for c in r.components:
                    print(f"{m[0]} vs {m[1]}: {c.left} >=sd {c.right} {'ok' if c.dominates else 'FAIL'}")


def _cmd_report(args, kind: str) -> int:
    vj = _verified(args)
    if vj is None:
        return FAIL
    fn = C.tv_reports if kind == "tv" else C.sd_reports
    reports = fn(vj, args.fuel, args.cap)
    _emit_reports(reports, kind, args.format, Path(args.prog1).stem)
    return OK if all(r.holds for r in reports) else FAIL


def cmd_tv_report(args) -> int:
    return _cmd_report(args, "tv")


def cmd_sd_report(args) -> int:
    return _cmd_report(args, "sd")


def cmd_case_study(args) -> int:
    m = get_case(args.name)
    given = _params(args.param)
    p = coerce_params(m.Params, given)
    rep = m.run(p, fuel=args.fuel, cap=args.cap)
    if args.format == "json":
        print(rep.dumps())
    elif args.format == "csv":
        if rep.tv:
            sys.stdout.write(C.tv_csv(rep.tv, rep.name))
        if rep.sd:
            sys.stdout.write(C.sd_csv(rep.sd, rep.name))
    else:
        print(f"{rep.name} {json.dumps(rep.params, sort_keys=True)}")
        for k, v in sorted(rep.verdicts.items()):
            print(f"  {k}: {v}")
        for k, v in sorted(rep.facts.items()):
            print(f"  {k}: {json.dumps(v)}")
        _emit_reports(rep.tv, "tv", "human", rep.name)
        _emit_reports(rep.sd, "sd", "human", rep.name)
    if not given:
        expected = DATA / rep.name / "expected.json"
        if expected.exists() and json.loads(expected.read_text()) != json.loads(rep.dumps()):
            _diag("expected-mismatch", f"report differs from {expected}")
            return FAIL
    if rep.indeterminate:
        _diag("indeterminate", "a verdict was left open by the fuel or cap limits")
        return OPEN
    if not rep.ok:
        bad = {k: v for k, v in rep.verdicts.items() if v not in rep.POSITIVE}
        _diag("case-study failed", f"{rep.name}: {json.dumps(bad, sort_keys=True)}")
        return FAIL
    return OK


# argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_positive, default=64, help="maximum loop unrollings (default 64)")
    common.add_argument("--cap", type=_positive, default=DEFAULT_CAP,
                        help=f"maximum enumerated memory assignments (default {DEFAULT_CAP})")
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--lib", help="case-study name or module providing functions(params)")
    common.add_argument("--param", action="append", metavar="KEY=VALUE", help="library or case parameter")

    ap = argparse.ArgumentParser(prog="prhl", description="Exact pRHL proof checking and coupling reports.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interpret", parents=[common], help="print the output distribution of a program")
    p.add_argument("prog")
    p.add_argument("--memory", default="{}", help="initial memory as JSON (or @file)")
    p.add_argument("--drop", action="store_true", help="drop mass still looping when fuel runs out")
    p.set_defaults(func=cmd_interpret)

    for name, func, helptext in (
            ("check", cmd_check, "check a proof script"),
            ("validate", cmd_validate, "validate a judgment against the semantics"),
            ("tv-report", cmd_tv_report, "total-variation bounds from a checked judgment"),
            ("sd-report", cmd_sd_report, "stochastic dominance from a checked judgment")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("prog1")
        p.add_argument("prog2")
        p.add_argument("--proof", required=name != "validate", help="proof script (prhl-proof/1 JSON)")
        p.add_argument("--domains", required=True, help="domain declaration (prhl-domains/1 JSON)")
        if name == "validate":
            p.add_argument("--pre", help="precondition (overrides the proof file)")
            p.add_argument("--post", help="postcondition (overrides the proof file)")
        p.set_defaults(func=func)

    p = sub.add_parser("case-study", parents=[common], help="run a packaged case study")
    p.add_argument("name", choices=sorted(CASES))
    p.set_defaults(func=cmd_case_study)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args)
    except (UsageError, ParamError) as e:
        _diag("usage", str(e))
    except ParseError as e:
        _diag("parse", str(e), line=e.line, column=e.col)
    except T.TypeCheckError as e:
        _diag("type", str(e))
    except (C.ShapeError, DomainError, DistributionError) as e:
        _diag("config", str(e))
    except ValueError as e:
        _diag("config", str(e))
    except CapacityError as e:
        _diag("capacity", str(e))
        return OPEN
    except FuelExhausted as e:
        _diag("fuel", str(e))
        return OPEN
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
