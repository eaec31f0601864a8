"""Asynchronous coupling of two balls-into-bins processes.

With ``n1 >= n2`` balls, the first ``n2`` throws are shared; the remaining
``n1 - n2`` throws of the first process run against ``skip``.  The first
program is brought into that two-loop shape by reordering its loop body and
splitting the loop range at a ghost input ``m`` equal to ``n2``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..consequences import sd_conclude
from ..lang import ast as A
from ..lang import types as T
from ..lang.domains import Bools, DomainDecl, Range, Values
from ..lang.parser import parse_assertion
from ..lang.semantics import is_lossless, semantically_equivalent
from ..lang.transform import LoopSplit, Swap, apply_transform
from ..logic import proof as P
from ..logic.checker import VerifiedJudgment, audit_proof
from ..logic.semantics import validate_semantics
from .common import CaseReport, ParamError, coerce_params, load_program, params_json, semantic_status

NAME = "balls-bins"
LOOP = 3  # index of the loop after the three initialising assignments


@dataclass
class Params:
    n1: int = 3
    n2: int = 2

    def validate(self):
        if not 0 <= self.n2 <= self.n1 <= 6:
            raise ParamError("need 0 <= n2 <= n1 <= 6")


def programs() -> dict:
    fns = T.Functions()
    return {"c": load_program(NAME, "program.pwhile", fns),
            "cstar": load_program(NAME, "cstar.pwhile", fns)}


def domains(p: Params) -> DomainDecl:
    top = Range(0, p.n1)
    return programs()["c"].domain_decl(DomainDecl(
        {"i": top, "binA": top, "binB": top, "b": Bools(), "m": Values((p.n2,))},
        {("n", 1): Values((p.n1,)), ("n", 2): Values((p.n2,))}))


def _a(text: str, logic=()):
    return parse_assertion(text, logic=logic)


def assertions() -> dict:
    phi = "binA#1 >= binA#2 && binB#1 >= binB#2"
    sync = ("n#1 >= n#2 && m#1 = n#2 && i#1 = i#2 && 0 <= i#1 && i#1 <= n#2"
            " && binA#1 = binA#2 && binB#1 = binB#2")
    tail = phi + " && i#1 <= n#1"
    return {
        "pre": _a("n#1 >= n#2 && m#1 = n#2"),
        "post": _a(phi),
        "sync": _a(sync),
        "coin": _a(sync + " && i#1 < n#2 && b#1 = b#2"),
        "tail": _a(tail),
        "throw": _a(tail + " && i#1 < n#1"),
        "after": _a(phi + " && i#1 <= n#1 && !(i#2 < n#2)"),
    }


def judgment() -> P.Judgment:
    c, a = programs()["c"], assertions()
    return P.Judgment(c.body, c.body, a["pre"], a["post"])


def reorder(side: int, inner: P.ProofNode) -> P.ProofNode:
    """Move the counter increment to the end of the loop body on ``side``."""
    return P.Equiv(side, Swap(), (LOOP, 0, 0), P.Equiv(side, Swap(), (LOOP, 0, 1), inner))


def split_rule() -> LoopSplit:
    return LoopSplit(A.Binop("<", A.Var("i"), A.Var("m")))


def proof_cstar() -> P.ProofNode:
    """``c* ~ c`` once both loop bodies have the counter last."""
    a = assertions()
    shared = P.Seq(a["coin"], (1, 1), P.Sample(_a("v", ["v"])), P.Wp())
    tail = P.SampleL(a["throw"], P.IfL(P.Wp(), P.Wp()))
    return P.Seq(a["sync"], (LOOP, LOOP), P.Wp(),
                 P.Seq(a["after"], (1, 1), P.While(a["sync"], shared),
                       P.WhileL(a["tail"], tail)))


def proof() -> P.ProofNode:
    return reorder(1, reorder(2, P.Equiv(1, split_rule(), (LOOP,), proof_cstar())))


def run(params: dict | Params = {}, fuel: int = 64, cap: int | None = None) -> CaseReport:
    p = params if isinstance(params, Params) else coerce_params(Params, params)
    dom, j, progs = domains(p), judgment(), programs()
    kw = {"cap": cap} if cap else {}
    rep = CaseReport(NAME, params_json(p))
    audit = audit_proof(j, proof(), dom, fuel, **kw)
    rep.verdicts["proof"] = audit.status
    rep.reports["proof"] = audit
    # the syntactic and semantic sides of the rewrite, reported on their own
    split = apply_transform(_reordered(progs["c"].body), split_rule(), (LOOP,))
    rep.facts["rewrite yields cstar"] = split == progs["cstar"].body
    out = [A.Var("binA"), A.Var("binB")]
    mems = [{"n": p.n1, "m": p.n2}]
    same = semantically_equivalent(progs["c"].body, progs["cstar"].body, dom, out, fuel, memories=mems)
    rep.verdicts["c=cstar"] = {True: "equivalent", False: "different", None: "indeterminate"}[same]
    second = A.flatten(progs["cstar"].body)[LOOP + 1]
    loop_dom = DomainDecl({"i": Range(0, p.n1), "n": Values((p.n1,)), "binA": Range(0, p.n1),
                           "binB": Range(0, p.n1), "b": Bools()})
    rep.verdicts["second loop"] = {True: "lossless", False: "lossy", None: "indeterminate"}[
        is_lossless(second, loop_dom, fuel)]
    rep.verdicts["semantics"] = semantic_status(validate_semantics(j, dom, fuel, **kw))
    if audit.status == "accepted":
        vj = VerifiedJudgment(j, proof(), audit, dom)
        rep.sd.append(sd_conclude(vj, {"n": p.n1, "m": p.n2}, {"n": p.n2}, fuel))
    return rep


def corpus(p: Params) -> list:
    progs, a, dom = programs(), assertions(), domains(p)
    reordered = P.Judgment(progs["cstar"].body, _reordered(progs["c"].body), a["pre"], a["post"])
    return [("cstar~c", reordered, proof_cstar(), dom), ("c~c", judgment(), proof(), dom)]


def _reordered(c):
    return apply_transform(apply_transform(c, Swap(), (LOOP, 0, 0)), Swap(), (LOOP, 0, 1))
