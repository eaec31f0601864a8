"""Judgments and proof trees, with their JSON encoding.

Proof scripts are JSON trees::

    {"schema": "prhl-proof/1", "pre": "...", "post": "...",
     "proof": {"rule": "While", "inv": "...", "body": {...}}}

Assertions and expressions inside a script are strings in the concrete syntax.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, Mapping, Optional

from ..lang import ast as A
from ..lang import transform as X
from ..lang.parser import parse_assertion, parse_dist, parse_expr
from ..lang.printer import show, show_dist

SCHEMA = "prhl-proof/1"


@dataclass(frozen=True)
class Judgment:
    c1: A.Command
    c2: A.Command
    pre: A.Expr
    post: A.Expr


class ProofNode:
    rule = ""

    def subproofs(self) -> list["ProofNode"]:
        return [getattr(self, f.name) for f in fields(self) if isinstance(getattr(self, f.name), ProofNode)]


def _rule(name: str):
    def deco(cls):
        cls.rule = name
        RULES[name] = cls
        return dataclass(frozen=True)(cls)
    return deco


RULES: dict[str, type] = {}


@_rule("Skip")
class Skip(ProofNode):
    pass


@_rule("Assign")
class Assign(ProofNode):
    pass


@_rule("AssignL")
class AssignL(ProofNode):
    pass


@_rule("AssignR")
class AssignR(ProofNode):
    pass


@_rule("Wp")
class Wp(ProofNode):
    """Deterministic loop-free code on both sides, checked by execution."""


@_rule("Seq")
class Seq(ProofNode):
    mid: A.Expr
    split: tuple
    first: ProofNode
    second: ProofNode


@_rule("Sample")
class Sample(ProofNode):
    f: A.Expr
    var: str = "v"


@_rule("SampleL")
class SampleL(ProofNode):
    inner: A.Expr
    rest: ProofNode


@_rule("SampleR")
class SampleR(ProofNode):
    inner: A.Expr
    rest: ProofNode


@_rule("If")
class If(ProofNode):
    then: ProofNode
    orelse: ProofNode


@_rule("IfL")
class IfL(ProofNode):
    then: ProofNode
    orelse: ProofNode


@_rule("IfR")
class IfR(ProofNode):
    then: ProofNode
    orelse: ProofNode


@_rule("While")
class While(ProofNode):
    inv: A.Expr
    body: ProofNode


@_rule("WhileL")
class WhileL(ProofNode):
    inv: A.Expr
    body: ProofNode
    fuel: Optional[int] = None


@_rule("WhileR")
class WhileR(ProofNode):
    inv: A.Expr
    body: ProofNode
    fuel: Optional[int] = None


@_rule("Case")
class Case(ProofNode):
    split: A.Expr
    yes: ProofNode
    no: ProofNode


@_rule("Conseq")
class Conseq(ProofNode):
    sub: ProofNode
    pre: Optional[A.Expr] = None
    post: Optional[A.Expr] = None


@_rule("Equiv")
class Equiv(ProofNode):
    side: int
    transform: X.Transform
    path: tuple
    sub: ProofNode


# JSON -----------------------------------------------------------------------



def transform_to_json(t: X.Transform) -> dict:
    if isinstance(t, X.LoopSplit):
        return {"rule": "loop-split", "cond": show(t.cond)}
    if isinstance(t, X.LoopMerge):
        return {"rule": "loop-merge"}
    if isinstance(t, X.CoinSplit):
        d = {"rule": "coin-split", "p1": show(t.p1), "p2": show(t.p2)}
        if t.names:
            d["names"] = list(t.names)
        return d
    if isinstance(t, X.CoinMerge):
        return {"rule": "coin-merge"}
    if isinstance(t, X.Swap):
        return {"rule": "swap"}
    if isinstance(t, X.SampleMarginal):
        return {"rule": "sample-marginal", "table": show_dist(t.table), "proj": t.proj, "name": t.name}
    raise TypeError(t)


def transform_from_json(obj: Mapping, **ctx) -> X.Transform:
    r = obj.get("rule")
    if r == "loop-split":
        return X.LoopSplit(parse_expr(obj["cond"], **ctx))
    if r == "loop-merge":
        return X.LoopMerge()
    if r == "coin-split":
        names = tuple(obj["names"]) if obj.get("names") else None
        return X.CoinSplit(parse_expr(obj["p1"], **ctx), parse_expr(obj["p2"], **ctx), names)
    if r == "coin-merge":
        return X.CoinMerge()
    if r == "swap":
        return X.Swap()
    if r == "sample-marginal":
        return X.SampleMarginal(parse_dist(obj["table"], **ctx), int(obj["proj"]), obj["name"])
    raise ValueError(f"unknown transform {r!r}")


def node_to_json(p: ProofNode) -> dict:
    out: dict[str, Any] = {"rule": p.rule}
    for f in fields(p):
        v = getattr(p, f.name)
        if v is None:
            continue
        if isinstance(v, ProofNode):
            out[f.name] = node_to_json(v)
        elif isinstance(v, A.Expr):
            out[f.name] = show(v)
        elif isinstance(v, X.Transform):
            out[f.name] = transform_to_json(v)
        elif isinstance(v, tuple):
            out[f.name] = list(v)
        else:
            out[f.name] = v
    return out


def node_from_json(obj: Mapping, functions=None, enums: Mapping = {}) -> ProofNode:
    rule = obj.get("rule")
    cls = RULES.get(rule)
    if cls is None:
        raise ValueError(f"unknown proof rule {rule!r}")
    ctx = {"functions": functions, "enums": enums}
    kw: dict[str, Any] = {}
    for f in fields(cls):
        if f.name not in obj:
            continue
        v = obj[f.name]
        if f.name == "f":
            kw[f.name] = parse_assertion(v, logic=[obj.get("var", "v")], **ctx)
        elif f.name in ("mid", "inv", "inner", "pre", "post") or (f.name == "split" and rule == "Case"):
            kw[f.name] = parse_assertion(v, **ctx)
        elif f.name in ("split", "path"):
            kw[f.name] = tuple(int(x) for x in v)
        elif f.name == "transform":
            kw[f.name] = transform_from_json(v, **ctx)
        elif isinstance(v, dict):
            kw[f.name] = node_from_json(v, functions, enums)
        else:
            kw[f.name] = v
    try:
        return cls(**kw)
    except TypeError as e:
        raise ValueError(f"malformed {rule} node: {e}") from None


def script_to_json(pre: A.Expr, post: A.Expr, proof: ProofNode, library: Optional[Mapping] = None) -> dict:
    out: dict[str, Any] = {"schema": SCHEMA, "pre": show(pre), "post": show(post)}
    if library:
        out["library"] = dict(library)
    out["proof"] = node_to_json(proof)
    return out


def script_from_json(obj: Mapping, functions=None, enums: Mapping = {}) -> tuple:
    if obj.get("schema") != SCHEMA:
        raise ValueError(f"expected schema {SCHEMA!r}, found {obj.get('schema')!r}")
    pre = parse_assertion(obj["pre"], functions=functions, enums=enums)
    post = parse_assertion(obj["post"], functions=functions, enums=enums)
    return pre, post, node_from_json(obj["proof"], functions, enums)
