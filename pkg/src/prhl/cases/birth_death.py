"""Monotone coupling of two birth-death chains started at ``start1 >= start2``.

Apart from adjacent states the two chains make the same move.  When they are
adjacent, each side's move is rewritten into a projection of a shared pair
distribution that never lets the upper chain step down while the lower one
steps up, and both sides sample that pair identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..consequences import sd_conclude
from ..dist import SubDist
from ..lang import ast as A
from ..lang import types as T
from ..lang.domains import DomainDecl, Lists, Range, Values
from ..lang.parser import parse_assertion, parse_dist
from ..lang.semantics import dist_table, eval_dist
from ..lang.transform import SampleMarginal
from ..logic import proof as P
from ..logic.checker import VerifiedJudgment, audit_proof
from ..logic.semantics import validate_semantics
from .common import CaseReport, ParamError, coerce_params, load_program, params_json, semantic_status

NAME = "birth-death"
MOVE = T.EnumT("Move", ("Left", "Right", "Still"))
LEFT, RIGHT, STILL = MOVE.syms()
FLIP = {"Left": "Right", "Right": "Left", "Still": "Still"}


@dataclass
class Params:
    steps: int = 2
    a: Fraction = Fraction(3, 10)
    b: Fraction = Fraction(1, 5)
    start1: int = 1
    start2: int = 0

    def validate(self):
        self.a, self.b = Fraction(self.a), Fraction(self.b)
        if not 0 <= self.steps <= 4:
            raise ParamError("steps must lie in [0, 4]")
        if not (0 <= self.a <= 1 and 0 <= self.b <= 1 and self.a + self.b <= 1):
            raise ParamError("a and b must be probabilities with a + b <= 1")
        if self.start1 < self.start2:
            raise ParamError("start1 must be at least start2")
        dcouple_table(self.a, self.a, self.b, self.b)


def _lit(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def dcouple_table(a_i, a_succ, b_i, b_succ) -> A.Explicit:
    """The adjacent-state pair table exactly as listed, for states ``i`` and ``i+1``.

    Unlisted pairs, ``(Left, Right)`` among them, get probability 0.
    """
    a_i, a_succ, b_i, b_succ = map(Fraction, (a_i, a_succ, b_i, b_succ))
    for name, v in (("a_i", a_i), ("a_succ", a_succ), ("b_i", b_i), ("b_succ", b_succ)):
        if not 0 <= v <= 1:
            raise ParamError(f"{name} = {v} is not a probability")
    ai, ai1, bi, bi1 = map(_lit, (a_i, a_succ, b_i, b_succ))
    rows = {
        ("Right", "Left"): f"min({bi1}, {ai})",
        ("Still", "Left"): f"pos({bi1} - {ai})",
        ("Right", "Still"): f"pos({ai} - {bi1})",
        ("Still", "Right"): ai1,
        ("Left", "Still"): bi,
        ("Still", "Still"): f"1 - min({bi1}, {ai}) - {ai1} - {bi} - abs({bi1} - {ai})",
    }
    for x in ("Left", "Right", "Still"):
        for y in ("Left", "Right", "Still"):
            rows.setdefault((x, y), "0")
    text = "dist { " + ", ".join(f"({x}, {y}) : {p}" for (x, y), p in rows.items()) + " }"
    table = parse_dist(text, enums={"Move": MOVE})
    residual = 1 - min(b_succ, a_i) - a_succ - b_i - abs(b_succ - a_i)
    if residual < 0:
        raise ParamError(f"entry (Still, Still) = {residual} is negative")
    return table


def reorient(table: A.Explicit) -> A.Explicit:
    """Swap the two components and exchange ``Left`` with ``Right``.

    Read this way the listed table has the upper chain first and ``Left`` as
    the decreasing move, which is the convention of the program.
    """
    rows = []
    for v, p in table.rows:
        x, y = (item.value.name for item in v.items)
        pair = A.TupleE((A.Lit(MOVE.syms()[MOVE.constants.index(FLIP[y])]),
                         A.Lit(MOVE.syms()[MOVE.constants.index(FLIP[x])])))
        rows.append((pair, p))
    return A.Explicit(tuple(rows))


def program(p: Params):
    return load_program(NAME, "program.pwhile", T.Functions(), overrides=overrides(p))


def overrides(p: Params) -> dict:
    return {"a": p.a, "b": p.b}


def bd(p: Params, state: int) -> SubDist:
    prog = program(p)
    loop = A.flatten(prog.body)[3]
    rand = A.flatten(loop.body)[0]
    return eval_dist({"state": state}, rand.dist)


def marginals_match(p: Params, table: A.Explicit, lower: int) -> bool:
    """Projection ``j`` of ``table`` equals ``bd`` of chain ``j`` (chain 1 on top)."""
    joint = dist_table(table, ({}, {}, {}))
    for j, state in ((0, lower + 1), (1, lower)):
        marginal = SubDist((v[j], q) for v, q in joint.items())
        if marginal != bd(p, state):
            return False
    return True


def crossing(table: A.Explicit) -> Fraction:
    return dist_table(table, ({}, {}, {})).get((LEFT, RIGHT), Fraction(0))


def choose_table(p: Params) -> tuple[A.Explicit, dict]:
    """The listed table if its marginals agree with ``bd``, else its reorientation."""
    verbatim = dcouple_table(p.a, p.a, p.b, p.b)
    facts = {"listed table marginals match bd": marginals_match(p, verbatim, p.start2),
             "listed table (Left, Right) entry": str(crossing(verbatim))}
    table = verbatim
    if not facts["listed table marginals match bd"]:
        table = reorient(verbatim)
        facts["reoriented table marginals match bd"] = marginals_match(p, table, p.start2)
    facts["coupling table"] = "listed" if table is verbatim else "reoriented"
    facts["coupling (Left, Right) entry"] = str(crossing(table))
    return table, facts


def domains(p: Params) -> DomainDecl:
    span = Range(p.start2 - p.steps, p.start1 + p.steps)
    return program(p).domain_decl(DomainDecl(
        {"k": Values((p.steps,)), "i": Range(0, p.steps), "state": span, "H": Lists(span, p.steps)},
        {("start", 1): Values((p.start1,)), ("start", 2): Values((p.start2,))}))


def _a(text: str, logic=()):
    return parse_assertion(text, enums={"Move": MOVE}, logic=logic)


def assertions() -> dict:
    inv = "k#1 = k#2 && i#1 = i#2 && 0 <= i#1 && i#1 <= k#1 && state#1 >= state#2"
    step = inv + " && i#1 < k#1"
    return {
        "pre": _a("start#1 >= start#2 && k#1 = k#2"),
        "post": _a("state#1 >= state#2"),
        "inv": _a(inv),
        "equal": _a(step + " && state#1 = state#2 && dir#1 = dir#2"),
        "adjacent": _a(step + " && state#1 = state#2 + 1 && d#1 = d#2 && d#1 != (Left, Right)"),
        "apart": _a(step + " && state#1 >= state#2 + 2"),
    }


def judgment(p: Params) -> P.Judgment:
    prog, a = program(p), assertions()
    return P.Judgment(prog.body, prog.body, a["pre"], a["post"])


def proof(table: A.Explicit) -> P.ProofNode:
    a = assertions()
    same = _a("v", ["v"])
    equal = P.Seq(a["equal"], (1, 1), P.Sample(same), P.Wp())
    apart = P.Seq(a["apart"], (1, 1), P.Sample(same), P.Wp())
    shared = P.Seq(a["adjacent"], (1, 1), P.Sample(same), P.Wp())
    adjacent = P.Equiv(1, SampleMarginal(table, 1, "d"), (0,),
                       P.Equiv(2, SampleMarginal(table, 2, "d"), (0,), shared))
    body = P.Case(_a("state#1 = state#2"), equal,
                  P.Case(_a("state#1 = state#2 + 1"), adjacent, apart))
    return P.Seq(a["inv"], (3, 3), P.Wp(), P.While(a["inv"], body))


def run(params: dict | Params = {}, fuel: int = 64, cap: int | None = None) -> CaseReport:
    p = params if isinstance(params, Params) else coerce_params(Params, params)
    j, dom = judgment(p), domains(p)
    kw = {"cap": cap} if cap else {}
    rep = CaseReport(NAME, params_json(p))
    table, facts = choose_table(p)
    rep.facts.update(facts)
    if not marginals_match(p, table, p.start2):
        rep.verdicts["marginals"] = "mismatch"
        return rep
    rep.verdicts["marginals"] = "ok"
    audit = audit_proof(j, proof(table), dom, fuel, **kw)
    rep.verdicts["proof"] = audit.status
    rep.reports["proof"] = audit
    rep.verdicts["semantics"] = semantic_status(validate_semantics(j, dom, fuel, **kw))
    if audit.status == "accepted":
        vj = VerifiedJudgment(j, proof(table), audit, dom)
        rep.sd.append(sd_conclude(vj, {"start": p.start1, "k": p.steps},
                                  {"start": p.start2, "k": p.steps}, fuel))
    return rep


def corpus(p: Params) -> list:
    table, _ = choose_table(p)
    return [("chain", judgment(p), proof(table), domains(p))]
