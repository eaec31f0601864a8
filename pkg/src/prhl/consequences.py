"""Probability-level conclusions drawn from verified judgments.

``tv_bound`` turns a judgment with post ``Phi ==> e1#1 = e2#2`` into an exact
total-variation bound; ``sd_conclude`` turns a post made of ``e1#1 >= e2#2``
conjuncts into stochastic-dominance verdicts with explicit witnesses.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .dist import (Coupling, InconsistencyError, SubDist, geq_relation, lifting_exists,
                   stochastically_dominates, tv_distance)
from .lang import ast as A
from .lang.printer import show
from .lang.semantics import DEFAULT_FUEL, compile_expr, interpret, pushforward
from .logic.checker import VerifiedJudgment
from .logic.enumerate import DEFAULT_CAP, pairs
from .logic.semantics import input_keys
from .values import Memory, fmt_prob, to_json

REPORT_SCHEMA = "prhl-report/1"


class ShapeError(ValueError):
    """The postcondition does not have the form the conclusion needs."""


def _mem_json(m: Mapping) -> dict:
    return to_json(Memory(m))


@dataclass
class TvReport:
    m1: Mapping
    m2: Mapping
    tv: Fraction
    bound: Fraction
    holds: bool
    left: SubDist = field(repr=False, default=None)
    right: SubDist = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"m1": _mem_json(self.m1), "m2": _mem_json(self.m2), "tv": fmt_prob(self.tv),
                "bound": fmt_prob(self.bound), "verdict": "ok" if self.holds else "fail"}


@dataclass
class SdComponent:
    left: str
    right: str
    dominates: bool
    witness: Optional[Coupling]

    def to_json(self) -> dict:
        d = {"left": self.left, "right": self.right, "dominates": self.dominates}
        if self.witness is not None:
            d["witness"] = self.witness.to_json()
        return d


@dataclass
class SdReport:
    m1: Mapping
    m2: Mapping
    components: list

    @property
    def holds(self) -> bool:
        return all(c.dominates for c in self.components)

    def to_json(self) -> dict:
        return {"m1": _mem_json(self.m1), "m2": _mem_json(self.m2),
                "verdict": "ok" if self.holds else "fail",
                "components": [c.to_json() for c in self.components]}


def split_tv_post(post: A.Expr) -> tuple[A.Expr, A.Expr, A.Expr]:
    """``Phi ==> e1 = e2`` -> (Phi, e1, e2), with Phi over the first memory only."""
    phi, eq = A.TRUE, post
    if isinstance(post, A.Binop) and post.op == "==>":
        phi, eq = post.left, post.right
    if not (isinstance(eq, A.Binop) and eq.op == "="):
        raise ShapeError(f"postcondition {show(post)} is not of the form 'Phi ==> e1#1 = e2#2'")
    tags = {t for _, t in A.free_vars(phi)}
    if tags - {1}:
        raise ShapeError(f"the premise {show(phi)} must mention only first-memory variables")
    e1, e2 = eq.left, eq.right
    t1, t2 = {t for _, t in A.free_vars(e1)}, {t for _, t in A.free_vars(e2)}
    if t1 == {2} and t2 <= {1}:
        e1, e2, t1, t2 = e2, e1, t2, t1
    if not (t1 <= {1} and t2 <= {2}):
        raise ShapeError(f"{show(eq)} must compare a first-memory and a second-memory expression")
    return phi, A.untag_expr(e1, 1), A.untag_expr(e2, 2)


def split_sd_post(post: A.Expr) -> list[tuple[A.Expr, A.Expr]]:
    out = []
    for c in A.conjuncts(post):
        if not (isinstance(c, A.Binop) and c.op in (">=", "<=")):
            raise ShapeError(f"conjunct {show(c)} is not of the form 'e1#1 >= e2#2'")
        hi, lo = (c.left, c.right) if c.op == ">=" else (c.right, c.left)
        if {t for _, t in A.free_vars(hi)} - {1} or {t for _, t in A.free_vars(lo)} - {2}:
            raise ShapeError(f"conjunct {show(c)} must compare a first-memory expression with a second")
        out.append((A.untag_expr(hi, 1), A.untag_expr(lo, 2)))
    if not out:
        raise ShapeError("postcondition has no dominance conjunct")
    return out


def _check_pre(vj: VerifiedJudgment, m1, m2) -> None:
    if not compile_expr(vj.pre, "logic")(({}, m1, m2)):
        raise ValueError("the initial memories do not satisfy the precondition")


def tv_bound(vj: VerifiedJudgment, m1: Mapping, m2: Mapping, fuel: int = DEFAULT_FUEL) -> TvReport:
    """Exact distance between the two outputs and the bound ``Pr[not Phi]`` on the left."""
    phi, e1, e2 = split_tv_post(vj.post)
    _check_pre(vj, m1, m2)
    need1 = A.expr_vars(e1) | A.side_vars(phi, 1)
    mu1 = interpret(A.slice_dead(vj.judgment.c1, need1)[0], m1, fuel)
    mu2 = interpret(A.slice_dead(vj.judgment.c2, A.expr_vars(e2))[0], m2, fuel)
    left, right = pushforward(mu1, e1), pushforward(mu2, e2)
    tv = tv_distance(left, right)
    good = compile_expr(A.untag_expr(phi, 1)) if phi != A.TRUE else None
    bound = Fraction(0) if good is None else mu1.prob(lambda m: not good(({}, m, m)))
    return TvReport(dict(m1), dict(m2), tv, bound, tv <= bound, left, right)


def sd_conclude(vj: VerifiedJudgment, m1: Mapping, m2: Mapping, fuel: int = DEFAULT_FUEL) -> SdReport:
    """Dominance of each ``e1#1 >= e2#2`` conjunct on the exact output laws."""
    comps = split_sd_post(vj.post)
    _check_pre(vj, m1, m2)
    need1 = set().union(*(A.expr_vars(h) for h, _ in comps))
    need2 = set().union(*(A.expr_vars(l) for _, l in comps))
    mu1 = interpret(A.slice_dead(vj.judgment.c1, need1)[0], m1, fuel)
    mu2 = interpret(A.slice_dead(vj.judgment.c2, need2)[0], m2, fuel)
    out = []
    for hi, lo in comps:
        a, b = pushforward(mu1, hi), pushforward(mu2, lo)
        verdict = stochastically_dominates(a, b)
        witness = lifting_exists(geq_relation, a, b)
        if verdict != (witness is not None):
            raise InconsistencyError(f"dominance test and lifting oracle disagree on {show(hi)}")
        out.append(SdComponent(show(hi), show(lo), verdict, witness))
    return SdReport(dict(m1), dict(m2), out)


def initial_pairs(vj: VerifiedJudgment, cap: int = DEFAULT_CAP) -> Iterable[tuple[dict, dict]]:
    return pairs(vj.dom, input_keys(vj.judgment), vj.pre, cap=cap)


def tv_reports(vj: VerifiedJudgment, fuel: int = DEFAULT_FUEL, cap: int = DEFAULT_CAP) -> list[TvReport]:
    return [tv_bound(vj, m1, m2, fuel) for m1, m2 in initial_pairs(vj, cap)]


def sd_reports(vj: VerifiedJudgment, fuel: int = DEFAULT_FUEL, cap: int = DEFAULT_CAP) -> list[SdReport]:
    return [sd_conclude(vj, m1, m2, fuel) for m1, m2 in initial_pairs(vj, cap)]


# serialization ---------------------------------------------------------------

def _cell(m: Mapping) -> str:
    return json.dumps(_mem_json(m), sort_keys=True, separators=(",", ":"))


def tv_csv(reports: Iterable[TvReport], label: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# {REPORT_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "m1", "m2", "tv", "bound", "verdict"])
    for r in reports:
        w.writerow([label, _cell(r.m1), _cell(r.m2), fmt_prob(r.tv), fmt_prob(r.bound),
                    "ok" if r.holds else "fail"])
    return buf.getvalue()


def sd_csv(reports: Iterable[SdReport], label: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# {REPORT_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "m1", "m2", "left", "right", "verdict"])
    for r in reports:
        for c in r.components:
            w.writerow([label, _cell(r.m1), _cell(r.m2), c.left, c.right, "ok" if c.dominates else "fail"])
    return buf.getvalue()


def reports_json(reports: Iterable, kind: str) -> str:
    return json.dumps({"schema": REPORT_SCHEMA, "kind": kind,
                       "reports": [r.to_json() for r in reports]}, sort_keys=True, indent=2)
