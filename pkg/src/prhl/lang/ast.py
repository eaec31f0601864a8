"""Abstract syntax of pWhile expressions, distribution expressions and commands.

Expressions double as relational assertions: a :class:`Var` with ``tag`` 1 or 2
refers to the first or second memory, an untagged variable is a program
variable (in programs) or a logical variable (in assertions).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional, Tuple


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: Any


@dataclass(frozen=True)
class Var(Expr):
    name: str
    tag: Optional[int] = None

    def __str__(self) -> str:
        return self.name if self.tag is None else f"{self.name}#{self.tag}"


@dataclass(frozen=True)
class Unop(Expr):
    op: str  # 'neg' | 'not'
    arg: Expr


@dataclass(frozen=True)
class Binop(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Cond(Expr):
    test: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class TupleE(Expr):
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class Index(Expr):
    """1-based component access ``e[i]``."""

    base: Expr
    index: Expr


@dataclass(frozen=True)
class Cons(Expr):
    head: Expr
    tail: Expr


@dataclass(frozen=True)
class ListE(Expr):
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: Tuple[Expr, ...]
    fn: Optional[Callable] = field(default=None, compare=False, hash=False, repr=False)


@dataclass(frozen=True)
class Quant(Expr):
    kind: str  # 'forall' | 'exists'
    var: str
    lo: Expr
    hi: Expr
    body: Expr


TRUE = Lit(True)
FALSE = Lit(False)


# distribution expressions ---------------------------------------------------

class DistExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Bern(DistExpr):
    p: Expr


@dataclass(frozen=True)
class UniformSet(DistExpr):
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class UniformRange(DistExpr):
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class Explicit(DistExpr):
    rows: Tuple[Tuple[Expr, Expr], ...]


# commands ---------------------------------------------------------------------

class Command:
    __slots__ = ()


@dataclass(frozen=True)
class Skip(Command):
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assign(Command):
    var: str
    expr: Expr
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Rand(Command):
    var: str
    dist: DistExpr
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If(Command):
    test: Expr
    then: Command
    orelse: Command
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class While(Command):
    test: Expr
    body: Command
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq(Command):
    first: Command
    second: Command
    loc: Any = field(default=None, compare=False, repr=False)


SKIP = Skip()


def flatten(c: Command) -> list[Command]:
    """The command as a list of non-Seq, non-Skip statements."""
    if isinstance(c, Seq):
        return flatten(c.first) + flatten(c.second)
    if isinstance(c, Skip):
        return []
    return [c]


def seq(*cs: Command) -> Command:
    items = [x for c in cs for x in flatten(c)]
    if not items:
        return SKIP
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Seq(c, out)
    return out


def conj(*es: Expr) -> Expr:
    parts = [e for e in es if e != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for e in parts[1:]:
        out = Binop("&&", out, e)
    return out


def neg(e: Expr) -> Expr:
    return Unop("not", e)


def implies(a: Expr, b: Expr) -> Expr:
    return Binop("==>", a, b)


def conjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, Binop) and e.op == "&&":
        return conjuncts(e.left) + conjuncts(e.right)
    if e == TRUE:
        return []
    return [e]


# traversal helpers ------------------------------------------------------------

def children(e: Expr) -> Iterator[Expr]:
    if isinstance(e, Unop):
        yield e.arg
    elif isinstance(e, Binop):
        yield e.left
        yield e.right
    elif isinstance(e, Cond):
        yield e.test
        yield e.then
        yield e.orelse
    elif isinstance(e, (TupleE, ListE)):
        yield from e.items
    elif isinstance(e, Index):
        yield e.base
        yield e.index
    elif isinstance(e, Cons):
        yield e.head
        yield e.tail
    elif isinstance(e, Call):
        yield from e.args
    elif isinstance(e, Quant):
        yield e.lo
        yield e.hi
        yield e.body


def free_vars(e: Expr, bound: frozenset = frozenset()) -> set[tuple[str, Optional[int]]]:
    """Free variables as ``(name, tag)`` pairs; quantifier-bound names excluded."""
    if isinstance(e, Var):
        if e.tag is None and e.name in bound:
            return set()
        return {(e.name, e.tag)}
    if isinstance(e, Quant):
        out = free_vars(e.lo, bound) | free_vars(e.hi, bound)
        return out | free_vars(e.body, bound | {e.var})
    out: set = set()
    for c in children(e):
        out |= free_vars(c, bound)
    return out


def map_vars(e: Expr, f: Callable[[Var], Expr], bound: frozenset = frozenset()) -> Expr:
    """Rebuild ``e`` replacing each free variable occurrence by ``f(var)``."""
    if isinstance(e, Var):
        if e.tag is None and e.name in bound:
            return e
        return f(e)
    if isinstance(e, Lit):
        return e
    if isinstance(e, Unop):
        return Unop(e.op, map_vars(e.arg, f, bound))
    if isinstance(e, Binop):
        return Binop(e.op, map_vars(e.left, f, bound), map_vars(e.right, f, bound))
    if isinstance(e, Cond):
        return Cond(*(map_vars(x, f, bound) for x in (e.test, e.then, e.orelse)))
    if isinstance(e, TupleE):
        return TupleE(tuple(map_vars(x, f, bound) for x in e.items))
    if isinstance(e, ListE):
        return ListE(tuple(map_vars(x, f, bound) for x in e.items))
    if isinstance(e, Index):
        return Index(map_vars(e.base, f, bound), map_vars(e.index, f, bound))
    if isinstance(e, Cons):
        return Cons(map_vars(e.head, f, bound), map_vars(e.tail, f, bound))
    if isinstance(e, Call):
        return Call(e.name, tuple(map_vars(x, f, bound) for x in e.args), e.fn)
    if isinstance(e, Quant):
        return Quant(e.kind, e.var, map_vars(e.lo, f, bound), map_vars(e.hi, f, bound),
                     map_vars(e.body, f, bound | {e.var}))
    raise TypeError(f"unknown expression {e!r}")


def tag_expr(e: Expr, tag: int) -> Expr:
    """Program expression -> assertion about memory ``tag``."""
    return map_vars(e, lambda v: Var(v.name, tag) if v.tag is None else v)


def untag_expr(e: Expr, tag: int) -> Expr:
    """Assertion mentioning only ``tag`` -> program expression."""
    def f(v: Var) -> Expr:
        if v.tag is None:
            raise ValueError(f"logical variable {v.name} is free")
        if v.tag != tag:
            raise ValueError(f"{v} refers to the other memory")
        return Var(v.name)
    return map_vars(e, f)


def side_vars(e: Expr, tag: int) -> set[str]:
    return {n for n, t in free_vars(e) if t == tag}


def dist_exprs(d: DistExpr) -> list[Expr]:
    if isinstance(d, Bern):
        return [d.p]
    if isinstance(d, UniformSet):
        return list(d.items)
    if isinstance(d, UniformRange):
        return [d.lo, d.hi]
    if isinstance(d, Explicit):
        return [x for row in d.rows for x in row]
    raise TypeError(d)


def dist_vars(d: DistExpr) -> set[str]:
    out: set[str] = set()
    for e in dist_exprs(d):
        out |= {n for n, _ in free_vars(e)}
    return out


def map_dist(d: DistExpr, f: Callable[[Expr], Expr]) -> DistExpr:
    if isinstance(d, Bern):
        return Bern(f(d.p))
    if isinstance(d, UniformSet):
        return UniformSet(tuple(f(x) for x in d.items))
    if isinstance(d, UniformRange):
        return UniformRange(f(d.lo), f(d.hi))
    return Explicit(tuple((f(a), f(b)) for a, b in d.rows))


def expr_vars(e: Expr) -> set[str]:
    return {n for n, _ in free_vars(e)}


def command_vars(c: Command) -> set[str]:
    """All program variables read or written by ``c``."""
    if isinstance(c, Skip):
        return set()
    if isinstance(c, Assign):
        return {c.var} | expr_vars(c.expr)
    if isinstance(c, Rand):
        return {c.var} | dist_vars(c.dist)
    if isinstance(c, If):
        return expr_vars(c.test) | command_vars(c.then) | command_vars(c.orelse)
    if isinstance(c, While):
        return expr_vars(c.test) | command_vars(c.body)
    if isinstance(c, Seq):
        return command_vars(c.first) | command_vars(c.second)
    raise TypeError(c)


def written_vars(c: Command) -> set[str]:
    if isinstance(c, (Assign, Rand)):
        return {c.var}
    if isinstance(c, If):
        return written_vars(c.then) | written_vars(c.orelse)
    if isinstance(c, While):
        return written_vars(c.body)
    if isinstance(c, Seq):
        return written_vars(c.first) | written_vars(c.second)
    return set()


def _lossless_dist(d: DistExpr) -> bool:
    return isinstance(d, (Bern, UniformSet, UniformRange))


def slice_dead(c: Command, live_out: set[str]) -> tuple[Command, set[str]]:
    """Drop assignments whose target is dead; return the slice and its live-in set.

    Samples from explicit tables are kept even when dead, since they may
    carry mass below one. Loops are always kept.
    """
    if isinstance(c, Skip):
        return c, set(live_out)
    if isinstance(c, Assign):
        if c.var not in live_out:
            return SKIP, set(live_out)
        return c, (live_out - {c.var}) | expr_vars(c.expr)
    if isinstance(c, Rand):
        if c.var not in live_out and _lossless_dist(c.dist):
            return SKIP, set(live_out)
        return c, (live_out - {c.var}) | dist_vars(c.dist)
    if isinstance(c, If):
        t, lt = slice_dead(c.then, live_out)
        e, le = slice_dead(c.orelse, live_out)
        if isinstance(t, Skip) and isinstance(e, Skip):
            return SKIP, set(live_out)
        return If(c.test, t, e, c.loc), expr_vars(c.test) | lt | le
    if isinstance(c, Seq):
        second, mid = slice_dead(c.second, live_out)
        first, live = slice_dead(c.first, mid)
        return seq(first, second), live
    if isinstance(c, While):
        live = set(live_out) | expr_vars(c.test)
        while True:
            body, inner = slice_dead(c.body, live)
            nxt = live | inner
            if nxt == live:
                return While(c.test, body, c.loc), live
            live = nxt
    raise TypeError(c)


def live_in(c: Command, live_out: set[str]) -> set[str]:
    """Variables whose initial value can influence the final ``live_out``
    (or the termination behaviour) of ``c``."""
    return slice_dead(c, set(live_out))[1]


def is_deterministic(c: Command, allow_loops: bool = False) -> bool:
    if isinstance(c, Rand):
        return False
    if isinstance(c, While):
        return allow_loops and is_deterministic(c.body, allow_loops)
    if isinstance(c, If):
        return is_deterministic(c.then, allow_loops) and is_deterministic(c.orelse, allow_loops)
    if isinstance(c, Seq):
        return is_deterministic(c.first, allow_loops) and is_deterministic(c.second, allow_loops)
    return True
