"""Syntactic program rewrites used by the Equiv rule.

A path addresses a statement: the first number indexes the flattened
statement sequence; if more numbers follow, the next one picks a branch of the
selected statement (``0``/``1`` for then/else of an ``if``, ``0`` for a loop
body) and the rest addresses a statement inside that branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import ast as A


class TransformError(Exception):
    pass


class Transform:
    span = 1  # number of consecutive statements matched

    def rewrite(self, items: list[A.Command]) -> list[A.Command]:
        raise NotImplementedError


@dataclass(frozen=True)
class LoopSplit(Transform):
    """``while e do c``  ->  ``while e && e' do c; while e do c``."""

    cond: A.Expr

    def rewrite(self, items):
        (w,) = items
        if not isinstance(w, A.While):
            raise TransformError(f"loop-split expects a while loop, found {type(w).__name__}")
        return [A.While(A.Binop("&&", w.test, self.cond), w.body), A.While(w.test, w.body)]


@dataclass(frozen=True)
class LoopMerge(Transform):
    """Inverse of :class:`LoopSplit`."""

    span = 2

    def rewrite(self, items):
        a, b = items
        if not (isinstance(a, A.While) and isinstance(b, A.While)):
            raise TransformError("loop-merge expects two consecutive loops")
        if not (isinstance(a.test, A.Binop) and a.test.op == "&&" and a.test.left == b.test
                and a.body == b.body):
            raise TransformError("loops do not have the shape 'while e && e2 do c; while e do c'")
        return [b]


@dataclass(frozen=True)
class CoinSplit(Transform):
    """``x ~~ Bern(p)``  ->  ``y ~~ Bern(p1); z ~~ Bern(p2); x := y && z``.

    The syntactic match only requires a Bernoulli sample. The identity
    ``p = p1 * p2`` is exact when ``p`` is literally that product; otherwise it
    has to be established by the semantic check under the precondition.
    """

    p1: A.Expr
    p2: A.Expr
    names: Optional[tuple] = None

    def rewrite(self, items):
        (r,) = items
        if not (isinstance(r, A.Rand) and isinstance(r.dist, A.Bern)):
            raise TransformError("coin-split expects 'x ~~ Bern(p)'")
        y, z = self.names or (f"_{r.var}1", f"_{r.var}2")
        return [A.Rand(y, A.Bern(self.p1)), A.Rand(z, A.Bern(self.p2)),
                A.Assign(r.var, A.Binop("&&", A.Var(y), A.Var(z)))]

    def is_syntactic(self, r: A.Rand) -> bool:
        p = r.dist.p
        return isinstance(p, A.Binop) and p.op == "*" and (p.left, p.right) == (self.p1, self.p2)


@dataclass(frozen=True)
class CoinMerge(Transform):
    """Inverse of :class:`CoinSplit`."""

    span = 3

    def rewrite(self, items):
        a, b, c = items
        ok = (isinstance(a, A.Rand) and isinstance(a.dist, A.Bern)
              and isinstance(b, A.Rand) and isinstance(b.dist, A.Bern)
              and isinstance(c, A.Assign)
              and c.expr == A.Binop("&&", A.Var(a.var), A.Var(b.var)))
        if not ok:
            raise TransformError("coin-merge expects 'y ~~ Bern(p1); z ~~ Bern(p2); x := y && z'")
        return [A.Rand(c.var, A.Bern(A.Binop("*", a.dist.p, b.dist.p)))]


def _reads(c: A.Command) -> set[str]:
    return A.command_vars(c) - A.written_vars(c) | A.live_in(c, set())


@dataclass(frozen=True)
class Swap(Transform):
    """Exchange two adjacent independent statements."""

    span = 2

    def rewrite(self, items):
        a, b = items
        wa, wb = A.written_vars(a), A.written_vars(b)
        if wa & (wb | _reads(b)) or wb & _reads(a):
            raise TransformError("swap of dependent statements")
        return [b, a]


@dataclass(frozen=True)
class SampleMarginal(Transform):
    """``x ~~ d``  ->  ``t ~~ table; x := t[proj]`` when ``d`` is that marginal."""

    table: A.DistExpr
    proj: int
    name: str

    def rewrite(self, items):
        (r,) = items
        if not isinstance(r, A.Rand):
            raise TransformError("sample-marginal expects a sampling statement")
        if self.proj not in (1, 2):
            raise TransformError("projection must be 1 or 2")
        return [A.Rand(self.name, self.table),
                A.Assign(r.var, A.Index(A.Var(self.name), A.Lit(self.proj)))]


def _rewrite_at(c: A.Command, path: Sequence[int], t: Transform) -> A.Command:
    if not path:
        raise TransformError("empty path")
    items = A.flatten(c)
    i = path[0]
    if not 0 <= i or i + (t.span if len(path) == 1 else 1) > len(items):
        raise TransformError(f"path index {i} outside a sequence of {len(items)} statement(s)")
    if len(path) == 1:
        new = t.rewrite(items[i:i + t.span])
        return A.seq(*items[:i], *new, *items[i + t.span:])
    node, branch, rest = items[i], path[1], path[2:]
    if isinstance(node, A.While) and branch == 0:
        node = A.While(node.test, _rewrite_at(node.body, rest, t), node.loc)
    elif isinstance(node, A.If) and branch in (0, 1):
        if branch == 0:
            node = A.If(node.test, _rewrite_at(node.then, rest, t), node.orelse, node.loc)
        else:
            node = A.If(node.test, node.then, _rewrite_at(node.orelse, rest, t), node.loc)
    else:
        raise TransformError(f"path step {branch} does not select a branch of {type(node).__name__}")
    return A.seq(*items[:i], node, *items[i + 1:])


def apply_transform(c: A.Command, rule: Transform, path: Sequence[int] = (0,)) -> A.Command:
    return _rewrite_at(c, tuple(path), rule)


def node_at(c: A.Command, path: Sequence[int]) -> A.Command:
    items = A.flatten(c)
    if not path or not 0 <= path[0] < len(items):
        raise TransformError(f"bad path {list(path)}")
    node = items[path[0]]
    if len(path) == 1:
        return node
    branch = path[1]
    if isinstance(node, A.While) and branch == 0:
        return node_at(node.body, path[2:])
    if isinstance(node, A.If) and branch in (0, 1):
        return node_at(node.then if branch == 0 else node.orelse, path[2:])
    raise TransformError(f"bad path {list(path)}")
