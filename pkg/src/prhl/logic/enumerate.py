"""Enumeration of memory pairs satisfying a conjunction, with pruning.

The search assigns variables one at a time. A conjunct is evaluated as soon as
all of its variables are assigned and prunes the branch when false. A conjunct
of the shape ``x#t = e`` whose right side is already determined fixes ``x#t``
directly instead of enumerating its domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

from ..lang import ast as A
from ..lang.domains import DomainDecl
from ..lang.semantics import EvalError, compile_expr

DEFAULT_CAP = 5_000_000

Key = tuple  # (name, tag)


class CapacityError(Exception):
    """Enumeration exceeded the configured cap; nothing was concluded."""


def unroll(e: A.Expr) -> list[A.Expr]:
    """Conjuncts of ``e`` with literal-bounded universal quantifiers expanded."""
    out: list[A.Expr] = []
    for c in A.conjuncts(e):
        if (isinstance(c, A.Quant) and c.kind == "forall" and isinstance(c.lo, A.Lit)
                and isinstance(c.hi, A.Lit) and c.hi.value - c.lo.value < 64):
            for i in range(c.lo.value, c.hi.value + 1):
                body = A.map_vars(c.body, lambda v, i=i, q=c.var: A.Lit(i) if v == A.Var(q) else v)
                out.extend(unroll(body))
        else:
            out.append(c)
    return out


def _binders(c: A.Expr) -> list[tuple[Key, A.Expr]]:
    out = []
    if isinstance(c, A.Binop) and c.op == "=":
        for lhs, rhs in ((c.left, c.right), (c.right, c.left)):
            if isinstance(lhs, A.Var) and lhs.tag is not None:
                key = (lhs.name, lhs.tag)
                if key not in A.free_vars(rhs):
                    out.append((key, rhs))
    return out


@dataclass
class _Step:
    key: Key
    bind: Optional[object]  # compiled expression, or None to enumerate
    values: Optional[list]
    checks: list  # compiled conjuncts that become closed after this step
    domain: object = None


def _plan(keys: set, conjs: Sequence[A.Expr], dom: DomainDecl, logic: Mapping) -> tuple[list, list]:
    fv = [{k for k in A.free_vars(c) if k[1] is not None} for c in conjs]
    binders = [(i, b) for i, c in enumerate(conjs) for b in _binders(c)]
    assigned: set = set()
    steps: list[_Step] = []
    remaining = set(keys)
    sizes = {k: dom.domain(*k).size() for k in keys}
    done = [False] * len(conjs)
    # closed conjuncts (no memory variables at all)
    first = [compile_expr(c, "logic") for i, c in enumerate(conjs) if not fv[i]]
    for i in range(len(conjs)):
        if not fv[i]:
            done[i] = True
    while remaining:
        pick, bind = None, None
        for i, b in binders:
            if not done[i] and b[0] in remaining:
                rhs_keys = {k for k in A.free_vars(b[1]) if k[1] is not None}
                if rhs_keys <= assigned:
                    pick, bind = b[0], b[1]
                    done[i] = True  # the binder holds by construction
                    break
        if pick is None:
            # defer keys that some pending binder could fix later
            bindable = {b[0] for i, b in binders if not done[i]}
            pick = min(remaining, key=lambda k: (k in bindable, sizes[k], -sum(k in f for f in fv), k))
        remaining.discard(pick)
        assigned.add(pick)
        checks = []
        for i, c in enumerate(conjs):
            if not done[i] and fv[i] <= assigned:
                done[i] = True
                checks.append(compile_expr(c, "logic"))
        if bind is not None:
            steps.append(_Step(pick, compile_expr(bind, "logic"), None, checks, dom.domain(*pick)))
        else:
            steps.append(_Step(pick, None, dom.domain(*pick).values(), checks))
    leftovers = [compile_expr(c, "logic") for i, c in enumerate(conjs) if not done[i]]
    return first + leftovers, steps


def _holds(f, env) -> bool:
    try:
        return bool(f(env))
    except (EvalError, TypeError, IndexError, ZeroDivisionError):
        return False


def pairs(dom: DomainDecl, keys: set, guard: A.Expr = A.TRUE, logic: Mapping = {},
          cap: int = DEFAULT_CAP, counter: Optional[list] = None) -> Iterator[tuple[dict, dict]]:
    """All (m1, m2) over ``keys`` (``(name, tag)`` pairs) satisfying ``guard``.

    Guard conjuncts that fail to evaluate count as false. ``counter`` (a
    one-element list) accumulates the number of search nodes visited.
    """
    conjs = unroll(guard)
    keys = set(keys) | {k for c in conjs for k in A.free_vars(c) if k[1] is not None}
    pre, steps = _plan(keys, conjs, dom, logic)
    m1: dict = {}
    m2: dict = {}
    mems = {1: m1, 2: m2}
    env = (dict(logic), m1, m2)
    count = counter if counter is not None else [0]
    if not all(_holds(f, env) for f in pre):
        return

    def rec(i: int):
        if i == len(steps):
            yield dict(m1), dict(m2)
            return
        st = steps[i]
        name, tag = st.key
        mem = mems[tag]
        if st.bind is not None:
            try:
                v = st.bind(env)
            except (EvalError, TypeError, IndexError, ZeroDivisionError):
                return
            candidates = [v] if v in st.domain else []
        else:
            candidates = st.values
        for v in candidates:
            count[0] += 1
            if count[0] > cap:
                raise CapacityError(f"enumeration exceeded the cap of {cap} memory assignments")
            mem[name] = v
            if all(_holds(f, env) for f in st.checks):
                yield from rec(i + 1)
        mem.pop(name, None)

    yield from rec(0)


def total_size(dom: DomainDecl, keys) -> int:
    n = 1
    for k in keys:
        n *= dom.domain(*k).size()
    return n
