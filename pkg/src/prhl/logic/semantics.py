"""Brute-force validity of judgments: run both programs, ask the lifting oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..dist import Coupling, lifting_exists
from ..lang import ast as A
from ..lang.domains import DomainDecl
from ..lang.semantics import DEFAULT_FUEL, FuelExhausted, compile_expr, interpret, project
from ..values import Memory, to_json
from .enumerate import DEFAULT_CAP, pairs
from .proof import Judgment


@dataclass
class SemanticReport:
    valid: Optional[bool]  # None: fuel ran out somewhere
    checked: int = 0
    counterexample: Optional[dict] = None
    detail: str = ""
    witnesses: list = field(default_factory=list, repr=False)

    def __bool__(self) -> bool:
        return self.valid is True

    def to_json(self) -> dict:
        d = {"schema": "prhl-validation/1",
             "status": {True: "valid", False: "invalid", None: "indeterminate"}[self.valid],
             "checked": self.checked}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.detail:
            d["detail"] = self.detail
        return d


def input_keys(j: Judgment) -> set:
    keys = {k for k in A.free_vars(j.pre) if k[1] is not None}
    keys |= {(n, 1) for n in A.live_in(j.c1, A.side_vars(j.post, 1))}
    keys |= {(n, 2) for n in A.live_in(j.c2, A.side_vars(j.post, 2))}
    return keys


def output_coupling(j: Judgment, m1: Mapping, m2: Mapping, fuel: int = DEFAULT_FUEL,
                    drop: bool = False) -> Optional[Coupling]:
    """A coupling of the two output distributions supported in the post, or ``None``."""
    post = compile_expr(j.post, "logic")
    v1, v2 = A.side_vars(j.post, 1), A.side_vars(j.post, 2)
    mu1 = project(interpret(A.slice_dead(j.c1, v1)[0], m1, fuel, drop), v1)
    mu2 = project(interpret(A.slice_dead(j.c2, v2)[0], m2, fuel, drop), v2)
    return lifting_exists(lambda a, b: bool(post(({}, a, b))), mu1, mu2)


def validate_semantics(j: Judgment, dom: DomainDecl, fuel: int = DEFAULT_FUEL,
                       cap: int = DEFAULT_CAP, keep_witnesses: bool = False) -> SemanticReport:
    """Check the judgment directly against its definition on every domain pair."""
    rep = SemanticReport(True)
    for m1, m2 in pairs(dom, input_keys(j), j.pre, cap=cap):
        rep.checked += 1
        try:
            w = output_coupling(j, m1, m2, fuel)
        except FuelExhausted as e:
            rep.valid = None
            rep.detail = str(e)
            rep.counterexample = {"m1": to_json(Memory(m1)), "m2": to_json(Memory(m2))}
            continue
        if w is None:
            rep.valid = False
            rep.detail = "no coupling of the outputs is supported in the postcondition"
            rep.counterexample = {"m1": to_json(Memory(m1)), "m2": to_json(Memory(m2))}
            return rep
        if keep_witnesses:
            rep.witnesses.append((m1, m2, w))
    return rep
