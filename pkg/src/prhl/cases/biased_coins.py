"""Stochastic dominance between head counts of two biased coins.

``c1`` flips a ``q1``-coin, ``c2`` a ``q2``-coin with ``q2 <= q1``.  The
intermediate ``c*`` flips a ``q1``-coin and an ``r``-coin (``r = q2/q1``) and
counts a head only when both land heads, so it has the same law as ``c2``.
``c1`` is coupled to ``c*`` by sharing the ``q1``-coin; ``c*`` is reached
from ``c2`` by a coin split.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..consequences import sd_conclude
from ..lang import types as T
from ..lang import ast as A
from ..lang.domains import Bools, DomainDecl, Range, Values
from ..lang.parser import parse_assertion
from ..lang.semantics import semantically_equivalent
from ..lang.transform import CoinSplit, apply_transform
from ..logic import proof as P
from ..logic.checker import VerifiedJudgment, audit_proof
from ..logic.semantics import validate_semantics
from .common import CaseReport, ParamError, coerce_params, load_program, params_json, semantic_status

NAME = "biased-coins"
FILES = ("c1.pwhile", "cstar.pwhile", "c2.pwhile")


@dataclass
class Params:
    k: int = 3
    q1: Fraction = Fraction(7, 10)
    q2: Fraction = Fraction(2, 5)

    def validate(self):
        self.q1, self.q2 = Fraction(self.q1), Fraction(self.q2)
        if not 0 <= self.k <= 6:
            raise ParamError("k must lie in [0, 6]")
        if not 0 < self.q1 <= 1 or not 0 <= self.q2 <= 1:
            raise ParamError("q1 must lie in (0, 1] and q2 in [0, 1]")
        if self.q2 > self.q1:
            raise ParamError("q1 must be at least q2")

    @property
    def r(self) -> Fraction:
        return self.q2 / self.q1


def programs(p: Params = Params()) -> dict:
    fns = T.Functions()
    return {f.split(".")[0]: load_program(NAME, f, fns) for f in FILES}


def domains(p: Params) -> DomainDecl:
    return programs(p)["c1"].domain_decl(DomainDecl(
        {"k": Values((p.k,)), "n": Range(0, p.k), "i": Range(0, p.k),
         "q1": Values((p.q1,)), "q2": Values((p.q2,)), "r": Values((p.r,)),
         "x": Bools(), "y": Bools(), "z": Bools()}))


def _a(text: str, logic=()):
    return parse_assertion(text, logic=logic)


def assertions() -> dict:
    inv = "k#1 = k#2 && i#1 = i#2 && n#1 >= n#2 && q1#1 = q1#2 && 0 <= i#1 && i#1 <= k#1"
    return {
        "pre": _a("k#1 = k#2 && q1#1 = q1#2 && q1#2 >= q2#2 && r#2 = q2#2 / q1#2"),
        "post": _a("n#1 >= n#2"),
        "inv": _a(inv),
        "shared": _a(inv + " && i#1 < k#1 && x#1 = y#2"),
        "below": _a(inv + " && i#1 < k#1 && (x#2 ==> x#1)"),
    }


def judgments(p: Params) -> dict:
    progs, a = programs(p), assertions()
    return {"c1~cstar": P.Judgment(progs["c1"].body, progs["cstar"].body, a["pre"], a["post"]),
            "c1~c2": P.Judgment(progs["c1"].body, progs["c2"].body, a["pre"], a["post"])}


def split_rule() -> CoinSplit:
    return CoinSplit(A.Var("q1"), A.Var("r"), ("y", "z"))


SPLIT_PATH = (2, 0, 0)  # first statement of the loop body


def proof_cstar() -> P.ProofNode:
    a = assertions()
    rest = P.Seq(a["below"], (0, 1), P.Wp(), P.IfL(P.Wp(), P.Wp()))
    body = P.Seq(a["shared"], (1, 1), P.Sample(_a("v", ["v"])), P.SampleR(a["shared"], rest))
    return P.Seq(a["inv"], (2, 2), P.Wp(), P.While(a["inv"], body))


def proof() -> P.ProofNode:
    return P.Equiv(2, split_rule(), SPLIT_PATH, proof_cstar())


def run(params: dict | Params = {}, fuel: int = 64, cap: int | None = None) -> CaseReport:
    p = params if isinstance(params, Params) else coerce_params(Params, params)
    dom, js, progs = domains(p), judgments(p), programs(p)
    kw = {"cap": cap} if cap else {}
    rep = CaseReport(NAME, params_json(p))
    first = audit_proof(js["c1~cstar"], proof_cstar(), dom, fuel, **kw)
    rep.verdicts["c1~cstar"] = first.status
    rep.reports["c1~cstar"] = first
    rewritten = apply_transform(progs["c2"].body, split_rule(), SPLIT_PATH)
    rep.facts["coin-split rewrites c2 to cstar"] = rewritten == progs["cstar"].body
    same = semantically_equivalent(progs["cstar"].body, progs["c2"].body, dom, [A.Var("n")], fuel)
    rep.verdicts["cstar=c2"] = {True: "equivalent", False: "different", None: "indeterminate"}[same]
    composed = audit_proof(js["c1~c2"], proof(), dom, fuel, **kw)
    rep.verdicts["c1~c2"] = composed.status
    rep.reports["c1~c2"] = composed
    rep.verdicts["semantics"] = semantic_status(validate_semantics(js["c1~c2"], dom, fuel, **kw))
    if composed.status == "accepted":
        vj = VerifiedJudgment(js["c1~c2"], proof(), composed, dom)
        m1 = {"k": p.k, "q1": p.q1, "q2": p.q2, "r": p.r}
        rep.sd.append(sd_conclude(vj, m1, dict(m1), fuel))
    return rep


def corpus(p: Params) -> list:
    js, dom = judgments(p), domains(p)
    return [("c1~cstar", js["c1~cstar"], proof_cstar(), dom), ("c1~c2", js["c1~c2"], proof(), dom)]
