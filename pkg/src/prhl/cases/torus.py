"""Coupling two lazy random walks on the discrete torus ``(Z/K)^d``.

Both walks pick the same coordinate and direction each step.  The laziness
coin is shared while the walks agree on the chosen coordinate and mirrored
otherwise, so each coordinate closes its gap independently and then stays
glued.  The coin is sampled first in the program text; the proof reorders
the samples with two ``swap`` steps on each side before coupling them.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..consequences import tv_bound
from ..lang import types as T
from ..lang.domains import Bools, DomainDecl, Lists, Range, Tuples, Values
from ..lang.parser import parse_assertion
from ..lang.transform import Swap
from ..logic import proof as P
from ..logic.checker import VerifiedJudgment, audit_proof
from ..logic.semantics import validate_semantics
from .common import CaseReport, ParamError, coerce_params, fn, load_program, params_json, semantic_status

NAME = "torus"


@dataclass
class Params:
    d: int = 1
    K: int = 3
    k: int = 2
    delta: tuple = (1,)
    start: tuple = ()

    def validate(self):
        if not 1 <= self.d <= 3:
            raise ParamError("d must lie in [1, 3]")
        if not 2 <= self.K <= 5:
            raise ParamError("K must lie in [2, 5]")
        if not 0 <= self.k <= 4:
            raise ParamError("k must lie in [0, 4]")
        if len(self.delta) != self.d or any(not 0 <= x < self.K for x in self.delta):
            raise ParamError(f"delta must have {self.d} entries in [0, {self.K - 1}]")
        if self.start and (len(self.start) != self.d or any(not 0 <= x < self.K for x in self.start)):
            raise ParamError(f"start must have {self.d} entries in [0, {self.K - 1}]")

    @property
    def start1(self) -> tuple:
        return tuple(self.start) if self.start else (0,) * self.d

    @property
    def start2(self) -> tuple:
        return tuple((a + b) % self.K for a, b in zip(self.start1, self.delta))


def unit(d: int, c: int) -> tuple:
    return tuple(1 if j == c else 0 for j in range(1, d + 1))


def drifts(p: Params, h) -> tuple[tuple, tuple]:
    """Net displacement of each walk given the first walk's history.

    ``h`` holds ``(mov, dir, crd)`` triples newest first.  The second walk
    is replayed from the initial offset ``delta``: it copies the coin when
    the chosen coordinate already agrees and flips it otherwise.
    """
    d1, d2 = [0] * p.d, [0] * p.d
    gap = list(p.delta)
    for mov, up, crd in reversed(h):
        c = crd - 1
        step = 1 if up else -1
        mov2 = mov if gap[c] % p.K == 0 else not mov
        if mov:
            d1[c] += step
        if mov2:
            d2[c] += step
        gap[c] = (p.delta[c] + d2[c] - d1[c]) % p.K
    return tuple(d1), tuple(d2)


def functions(p: Params) -> T.Functions:
    hist = T.ListT(T.TupleT((T.BOOL, T.BOOL, T.INT)))
    v = T.vec(p.d)
    return T.Functions([
        fn("u", [T.INT], v, lambda c: unit(p.d, c)),
        fn("Drift1", [hist], v, lambda h: drifts(p, h)[0]),
        fn("Drift2", [hist], v, lambda h: drifts(p, h)[1]),
        fn("Sigma1", [T.INT, hist], T.INT, lambda i, h: drifts(p, h)[0][i - 1]),
        fn("Sigma2", [T.INT, hist], T.INT, lambda i, h: drifts(p, h)[1][i - 1]),
    ])


def program(p: Params):
    return load_program(NAME, "program.pwhile", functions(p), overrides=overrides(p))


def domains(p: Params) -> DomainDecl:
    cell = Range(0, p.K - 1)
    step = Tuples((Bools(), Bools(), Range(1, p.d)))
    return program(p).domain_decl(DomainDecl(
        {"k": Values((p.k,)), "i": Range(0, p.k), "pos": Tuples((cell,) * p.d),
         "H": Lists(step, p.k)},
        {("start", 1): Values((p.start1,)), ("start", 2): Values((p.start2,))}))


def _tuple(t) -> str:
    return "(" + ", ".join(map(str, t)) + ("," if len(t) == 1 else "") + ")"


def _a(p: Params, text: str, logic=()):
    return parse_assertion(text, functions=functions(p), logic=logic)


def assertions(p: Params) -> dict:
    K, d, D = p.K, p.d, _tuple(p.delta)
    met = f"(Sigma1(j, H#1) - Sigma2(j, H#1)) mod {K} = {D}[j]"
    inv = (f"start#2 = (start#1 + {D}) mod {K} && k#2 = k#1 && i#2 = i#1 && 0 <= i#1 && i#1 <= k#1"
           f" && len(H#1) = i#1"
           f" && pos#1 = (start#1 + Drift1(H#1)) mod {K}"
           f" && pos#2 = (start#2 + Drift2(H#1)) mod {K}"
           f" && forall j in [1, {d}]. ({met} ==> pos#1[j] = pos#2[j])")
    m1 = inv + " && i#1 < k#1 && dir#1 = dir#2"
    m2 = m1 + " && crd#1 = crd#2"
    m3 = m2 + " && mov#2 = (pos#1[crd#1] = pos#2[crd#1] ? mov#1 : !mov#1)"
    return {
        "pre": _a(p, f"(start#2 - start#1) mod {K} = {D} && k#1 = k#2"),
        "post": _a(p, f"(forall j in [1, {d}]. {met}) ==> pos#1 = pos#2"),
        "inv": _a(p, inv), "dir": _a(p, m1), "crd": _a(p, m2), "mov": _a(p, m3),
    }


def judgment(p: Params) -> P.Judgment:
    prog = program(p)
    a = assertions(p)
    return P.Judgment(prog.body, prog.body, a["pre"], a["post"])


# loop body sits at index 3 of the top-level sequence
_FIRST, _SECOND = (3, 0, 0), (3, 0, 1)


def proof(p: Params, glue: bool = True) -> P.ProofNode:
    a = assertions(p)
    same = _a(p, "v", ["v"])
    coin = _a(p, "pos#1[crd#1] = pos#2[crd#2] ? v : !v", ["v"]) if glue else same
    body = P.Seq(a["dir"], (1, 1), P.Sample(same),
                 P.Seq(a["crd"], (1, 1), P.Sample(same),
                       P.Seq(a["mov"], (1, 1), P.Sample(coin), P.Wp())))
    core = P.Seq(a["inv"], (3, 3), P.Wp(), P.While(a["inv"], body))
    for side in (2, 1):
        core = P.Equiv(side, Swap(), _SECOND, core)
        core = P.Equiv(side, Swap(), _FIRST, core)
    return core


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
        m1 = {"start": p.start1, "k": p.k}
        m2 = {"start": p.start2, "k": p.k}
        rep.tv.append(tv_bound(vj, m1, m2, fuel))
    return rep


def overrides(p: Params) -> dict:
    return {"K": p.K, "d": p.d}


def corpus(p: Params) -> list:
    return [("walk", judgment(p), proof(p), domains(p))]
