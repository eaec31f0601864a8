"""Evaluation and validity of relational assertions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..lang import ast as A
from ..lang.domains import DomainDecl
from ..lang.semantics import compile_expr, eval_assertion
from ..values import Memory, to_json
from .enumerate import DEFAULT_CAP, CapacityError, pairs

__all__ = ["eval_assertion", "validity_check", "Validity", "CapacityError"]


@dataclass
class Validity:
    valid: bool
    checked: int
    counterexample: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        d = {"valid": self.valid, "checked": self.checked}
        if self.counterexample:
            m1, m2 = self.counterexample
            d["counterexample"] = {"m1": to_json(Memory(m1)), "m2": to_json(Memory(m2))}
        return d


def validity_check(a: A.Expr, dom: DomainDecl, cap: int = DEFAULT_CAP) -> Validity:
    """Is ``a`` true on every memory pair drawn from ``dom``?

    A top-level implication uses its hypothesis to prune the enumeration.
    Raises :class:`CapacityError` rather than answering when the cap is hit.
    """
    hyp, concl = A.TRUE, a
    if isinstance(a, A.Binop) and a.op == "==>":
        hyp, concl = a.left, a.right
    keys = {k for k in A.free_vars(a) if k[1] is not None}
    f = compile_expr(concl, "logic")
    n = 0
    for m1, m2 in pairs(dom, keys, hyp, cap=cap):
        n += 1
        if not f(({}, m1, m2)):
            return Validity(False, n, (m1, m2))
    return Validity(True, n)
