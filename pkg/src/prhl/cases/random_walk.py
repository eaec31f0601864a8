"""Mirror coupling of two simple random walks started an even distance apart.

The second walk copies the first walk's coin negated until the first walk has
drifted ``n`` steps up, which is exactly when the two positions meet; from then
on both walks use the same coin.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..consequences import tv_bound
from ..lang import types as T
from ..lang.domains import DomainDecl, Lists, Bools, Range, Values
from ..lang.parser import parse_assertion
from ..logic import proof as P
from ..logic.checker import audit_proof, VerifiedJudgment
from ..logic.semantics import validate_semantics
from .common import CaseReport, ParamError, coerce_params, fn, load_program, params_json, semantic_status

NAME = "random-walk"


@dataclass
class Params:
    k: int = 2
    n: int = 1
    start: int = 0

    def validate(self):
        if not 0 <= self.k <= 6:
            raise ParamError("k must lie in [0, 6]")
        if not 0 <= self.n <= 4:
            raise ParamError("n must lie in [0, 4]")


def sigma(h) -> int:
    """Number of heads minus number of tails."""
    return sum(1 if b else -1 for b in h)


def reached(h, n: int) -> bool:
    """Some chronological prefix of the flips has drift exactly ``n``.

    ``h`` is newest-first, so chronological prefixes are suffixes of ``h``.
    """
    total = 0
    if n == 0:
        return True
    for b in reversed(h):
        total += 1 if b else -1
        if total == n:
            return True
    return False


def functions(p: Params) -> T.Functions:
    hist = T.ListT(T.BOOL)
    return T.Functions([
        fn("Sigma", [hist], T.INT, sigma),
        fn("P", [hist], T.BOOL, lambda h: reached(h, p.n)),
    ])


def program(p: Params):
    return load_program(NAME, "program.pwhile", functions(p))


def domains(p: Params) -> DomainDecl:
    prog = program(p)
    lo, hi = p.start - p.k, p.start + 2 * p.n + p.k
    return prog.domain_decl(DomainDecl(
        {"k": Values((p.k,)), "i": Range(0, p.k), "pos": Range(lo, hi),
         "H": Lists(Bools(), p.k)},
        {("start", 1): Values((p.start,)), ("start", 2): Values((p.start + 2 * p.n,))}))


def _a(p: Params, text: str, logic=()):
    return parse_assertion(text, functions=functions(p), logic=logic)


def assertions(p: Params) -> dict:
    two_n = 2 * p.n
    inv = (f"start#2 = start#1 + {two_n} && k#2 = k#1 && i#2 = i#1 && 0 <= i#1 && i#1 <= k#1"
           f" && len(H#1) = i#1 && pos#1 = start#1 + Sigma(H#1)"
           f" && pos#2 = (P(H#1) ? pos#1 : start#2 - Sigma(H#1))")
    return {
        "pre": _a(p, f"start#1 + {two_n} = start#2 && k#1 = k#2"),
        "post": _a(p, "P(H#1) ==> pos#1 = pos#2"),
        "inv": _a(p, inv),
        "mid": _a(p, inv + " && i#1 < k#1 && b#2 = (P(H#1) ? b#1 : !b#1)"),
    }


def judgment(p: Params) -> P.Judgment:
    prog = program(p)
    a = assertions(p)
    return P.Judgment(prog.body, prog.body, a["pre"], a["post"])


def proof(p: Params, swap_bijections: bool = False) -> P.ProofNode:
    a = assertions(p)
    same, mirror = _a(p, "v", ["v"]), _a(p, "!v", ["v"])
    if swap_bijections:
        same, mirror = mirror, same
    body = P.Seq(a["mid"], (1, 1),
                 P.Case(_a(p, "P(H#1)"), P.Sample(same), P.Sample(mirror)),
                 P.Wp())
    return P.Seq(a["inv"], (3, 3), P.Wp(), P.While(a["inv"], body))


def run(params: dict | Params = {}, fuel: int = 64, cap: int | None = None) -> CaseReport:
    p = params if isinstance(params, Params) else coerce_params(Params, params)
    j, dom = judgment(p), domains(p)
    kw = {"cap": cap} if cap else {}
    rep = CaseReport(NAME, params_json(p))
    audit = audit_proof(j, proof(p), dom, fuel, **kw)
    rep.verdicts["proof"] = audit.status
    rep.reports["proof"] = audit
    sem = validate_semantics(j, dom, fuel, **kw)
    rep.verdicts["semantics"] = semantic_status(sem)
    if audit.status == "accepted":
        vj = VerifiedJudgment(j, proof(p), audit, dom)
        m1 = {"start": p.start, "k": p.k}
        m2 = {"start": p.start + 2 * p.n, "k": p.k}
        rep.tv.append(tv_bound(vj, m1, m2, fuel))
    return rep


def corpus(p: Params) -> list:
    """``(label, judgment, proof, domains)`` for every proof shipped with the case."""
    return [("walk", judgment(p), proof(p), domains(p))]
