"""Exact denotational semantics: expressions, distributions, commands.

Expressions are compiled once into Python closures over an environment
``(logic, m1, m2)``. In program mode an untagged variable reads ``m1``; in
assertion mode it reads the logical environment (quantifier variables and
the distinguished sample variable of the Sample rule).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from ..dist import DistributionError, SubDist, ZERO
from ..values import Memory, PList, vkey
from . import ast as A
from .domains import DomainDecl


class EvalError(Exception):
    pass


class FuelExhausted(Exception):
    def __init__(self, residual: Fraction, partial: Optional[SubDist] = None):
        super().__init__(f"loop fuel exhausted with residual mass {residual}")
        self.residual = residual
        self.partial = partial


Env = tuple  # (logic: dict, m1: Mapping, m2: Mapping)
Compiled = Callable[[Env], object]

_cache: dict = {}


def _num(x):
    if isinstance(x, bool):
        raise EvalError(f"boolean {x} used as a number")
    return x


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _add(a, b):
    if isinstance(a, tuple):
        return tuple(_norm(x + y) for x, y in zip(a, b))
    return _norm(_num(a) + _num(b))


def _sub(a, b):
    if isinstance(a, tuple):
        return tuple(_norm(x - y) for x, y in zip(a, b))
    return _norm(_num(a) - _num(b))


def _mul(a, b):
    if isinstance(b, tuple):
        return tuple(_norm(a * y) for y in b)
    return _norm(_num(a) * _num(b))


def _div(a, b):
    if b == 0:
        raise EvalError("division by zero")
    return _norm(Fraction(_num(a)) / _num(b))


def _mod(a, m):
    if not isinstance(m, int) or m <= 0:
        raise EvalError(f"modulus {m!r} is not a positive integer")
    if isinstance(a, tuple):
        return tuple(x % m for x in a)
    return a % m


def _lt(a, b):
    return vkey(a) < vkey(b) if not _both_num(a, b) else a < b


def _le(a, b):
    return vkey(a) <= vkey(b) if not _both_num(a, b) else a <= b


def _both_num(a, b):
    return (isinstance(a, (int, Fraction)) and not isinstance(a, bool)
            and isinstance(b, (int, Fraction)) and not isinstance(b, bool))


def _eq(a, b):
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def _index(base, i):
    if not isinstance(i, int) or not 1 <= i <= len(base):
        raise EvalError(f"index {i!r} out of range for {base!r}")
    return base[i - 1]


def compile_expr(e: A.Expr, untagged: str = "mem", bound: frozenset = frozenset()) -> Compiled:
    key = (id(e), untagged, bound)
    hit = _cache.get(key)
    if hit is not None and hit[0] is e:
        return hit[1]
    fn = _compile(e, untagged, bound)
    _cache[key] = (e, fn)
    return fn


def _compile(e: A.Expr, untagged: str, bound: frozenset) -> Compiled:
    c = lambda x: compile_expr(x, untagged, bound)  # noqa: E731
    if isinstance(e, A.Lit):
        v = e.value
        return lambda env: v
    if isinstance(e, A.Var):
        name = e.name
        if e.tag is None:
            if name in bound or untagged == "logic":
                def logic_var(env):
                    try:
                        return env[0][name]
                    except KeyError:
                        raise EvalError(f"unbound logical variable {name}") from None
                return logic_var
            slot = 1
        else:
            slot = e.tag

        def mem_var(env):
            try:
                return env[slot][name]
            except KeyError:
                shown = name if e.tag is None else f"{name}#{e.tag}"
                raise EvalError(f"unbound variable {shown}") from None
        return mem_var
    if isinstance(e, A.Unop):
        a = c(e.arg)
        if e.op == "not":
            return lambda env: not a(env)
        def negate(env):
            x = a(env)
            return tuple(-y for y in x) if isinstance(x, tuple) else -_num(x)
        return negate
    if isinstance(e, A.Binop):
        l, r = c(e.left), c(e.right)
        op = e.op
        if op == "&&":
            return lambda env: bool(l(env)) and bool(r(env))
        if op == "||":
            return lambda env: bool(l(env)) or bool(r(env))
        if op == "==>":
            return lambda env: (not l(env)) or bool(r(env))
        if op == "<=>":
            return lambda env: bool(l(env)) == bool(r(env))
        f = {
            "+": _add, "-": _sub, "*": _mul, "/": _div, "mod": _mod,
            "=": _eq, "!=": lambda a, b: not _eq(a, b),
            "<": _lt, "<=": _le, ">": lambda a, b: _lt(b, a), ">=": lambda a, b: _le(b, a),
        }.get(op)
        if f is None:
            raise EvalError(f"unknown operator {op}")
        return lambda env: f(l(env), r(env))
    if isinstance(e, A.Cond):
        t, a, b = c(e.test), c(e.then), c(e.orelse)
        return lambda env: a(env) if t(env) else b(env)
    if isinstance(e, A.TupleE):
        parts = [c(x) for x in e.items]
        return lambda env: tuple(p(env) for p in parts)
    if isinstance(e, A.ListE):
        parts = [c(x) for x in e.items]
        return lambda env: PList(p(env) for p in parts)
    if isinstance(e, A.Index):
        b, i = c(e.base), c(e.index)
        return lambda env: _index(b(env), i(env))
    if isinstance(e, A.Cons):
        h, t = c(e.head), c(e.tail)
        return lambda env: PList((h(env),) + tuple(t(env)))
    if isinstance(e, A.Call):
        if e.fn is None:
            raise EvalError(f"function {e.name} is not bound to an implementation")
        impl = e.fn.impl if hasattr(e.fn, "impl") else e.fn
        args = [c(x) for x in e.args]
        return lambda env: impl(*(a(env) for a in args))
    if isinstance(e, A.Quant):
        lo, hi = c(e.lo), c(e.hi)
        body = compile_expr(e.body, untagged, bound | {e.var})
        var = e.var
        if e.kind == "forall":
            def forall(env):
                logic = dict(env[0])
                for i in range(lo(env), hi(env) + 1):
                    logic[var] = i
                    if not body((logic, env[1], env[2])):
                        return False
                return True
            return forall

        def exists(env):
            logic = dict(env[0])
            for i in range(lo(env), hi(env) + 1):
                logic[var] = i
                if body((logic, env[1], env[2])):
                    return True
            return False
        return exists
    raise EvalError(f"cannot compile {e!r}")


def eval_expr(m: Mapping, e: A.Expr):
    """Value of a program expression in memory ``m``."""
    return compile_expr(e)(({}, m, m))


def eval_assertion(m1: Mapping, m2: Mapping, a: A.Expr, logic: Mapping = {}) -> bool:
    return bool(compile_expr(a, "logic")((dict(logic), m1, m2)))


def _prob(x, what: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise DistributionError(f"{what} is not a number: {x!r}")
    return Fraction(x)


def dist_table(d: A.DistExpr, env: Env, untagged: str = "mem") -> SubDist:
    c = lambda x: compile_expr(x, untagged)(env)  # noqa: E731
    if isinstance(d, A.Bern):
        p = _prob(c(d.p), "Bern parameter")
        if not 0 <= p <= 1:
            raise DistributionError(f"Bern parameter {p} outside [0, 1]")
        return SubDist({True: p, False: 1 - p}, _trusted=True) if 0 < p < 1 else \
            SubDist({p == 1: Fraction(1)}, _trusted=True)
    if isinstance(d, A.UniformSet):
        vals = [c(x) for x in d.items]
        if not vals:
            raise DistributionError("uniform distribution over an empty set")
        w = Fraction(1, len(vals))
        out: dict = {}
        for v in vals:
            out[v] = out.get(v, ZERO) + w
        return SubDist(out, _trusted=True)
    if isinstance(d, A.UniformRange):
        lo, hi = c(d.lo), c(d.hi)
        if hi < lo:
            raise DistributionError(f"empty range [{lo}, {hi}]")
        w = Fraction(1, hi - lo + 1)
        return SubDist({v: w for v in range(lo, hi + 1)}, _trusted=True)
    if isinstance(d, A.Explicit):
        out = {}
        for ve, pe in d.rows:
            v = c(ve)
            p = _prob(c(pe), "table entry")
            if p < 0:
                raise DistributionError(f"negative table entry {p} for {v!r}")
            if p:
                out[v] = out.get(v, ZERO) + p
        total = sum(out.values(), ZERO)
        if total > 1:
            raise DistributionError(f"table mass {total} exceeds 1")
        return SubDist(out, _trusted=True)
    raise DistributionError(f"unknown distribution expression {d!r}")


def eval_dist(m: Mapping, d: A.DistExpr) -> SubDist:
    return dist_table(d, ({}, m, m))


# commands --------------------------------------------------------------------

def _add_mass(out: dict, m, p) -> None:
    out[m] = out.get(m, ZERO) + p


def _run(c: A.Command, states: dict, fuel: int, drop: bool) -> dict:
    if isinstance(c, A.Skip):
        return states
    if isinstance(c, A.Seq):
        return _run(c.second, _run(c.first, states, fuel, drop), fuel, drop)
    if isinstance(c, A.Assign):
        f = compile_expr(c.expr)
        out: dict = {}
        for m, p in states.items():
            _add_mass(out, m.set(c.var, f(({}, m, m))), p)
        return out
    if isinstance(c, A.Rand):
        out = {}
        for m, p in states.items():
            for v, q in eval_dist(m, c.dist).items():
                _add_mass(out, m.set(c.var, v), p * q)
        return out
    if isinstance(c, A.If):
        g = compile_expr(c.test)
        yes, no = {}, {}
        for m, p in states.items():
            (yes if g(({}, m, m)) else no)[m] = p
        out = _run(c.then, yes, fuel, drop) if yes else {}
        for m, p in (_run(c.orelse, no, fuel, drop) if no else {}).items():
            _add_mass(out, m, p)
        return out
    if isinstance(c, A.While):
        g = compile_expr(c.test)
        exited: dict = {}
        current = states
        for _ in range(fuel + 1):
            live: dict = {}
            for m, p in current.items():
                if g(({}, m, m)):
                    live[m] = p
                else:
                    _add_mass(exited, m, p)
            if not live:
                return exited
            if _ is fuel:
                break
            current = _run(c.body, live, fuel, drop)
        residual = sum(live.values(), ZERO)
        if drop:
            return exited
        raise FuelExhausted(residual, SubDist(exited, _trusted=True))
    raise EvalError(f"unknown command {c!r}")


DEFAULT_FUEL = 64


def interpret(c: A.Command, m: Mapping, fuel: int = DEFAULT_FUEL, drop: bool = False) -> SubDist:
    """Output sub-distribution over memories of running ``c`` from ``m``.

    Each loop is unrolled at most ``fuel`` times. If guard-true mass remains,
    :class:`FuelExhausted` is raised, or with ``drop=True`` that mass is
    discarded (the sub-distribution reading of non-termination).
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    start = m if isinstance(m, Memory) else Memory(m)
    return SubDist(_run(c, {start: Fraction(1)}, fuel, drop), _trusted=True)


def pushforward(mu: SubDist, e: A.Expr) -> SubDist:
    f = compile_expr(e)
    return mu.map(lambda m: f(({}, m, m)))


def project(mu: SubDist, names: Iterable[str]) -> SubDist:
    names = sorted(set(names))
    return mu.map(lambda m: m.project(names))


def is_lossless(c: A.Command, dom: DomainDecl, fuel: int = DEFAULT_FUEL) -> Optional[bool]:
    """``True`` if every domain memory yields mass exactly 1.

    ``False`` when some memory definitely loses mass; ``None`` when fuel ran
    out before the residual vanished (not provably lossless).
    """
    c, names = A.slice_dead(c, set())
    undecided = False
    for m in dom.memories(names):
        try:
            mu = interpret(c, m, fuel)
        except FuelExhausted:
            undecided = True
            continue
        if mu.mass != 1:
            return False
    return None if undecided else True


def semantically_equivalent(c1: A.Command, c2: A.Command, dom: DomainDecl,
                            out: Sequence[A.Expr], fuel: int = DEFAULT_FUEL,
                            memories: Optional[Iterable[Mapping]] = None) -> Optional[bool]:
    """Exact equivalence of the output pushforwards on every domain memory.

    Returns ``None`` when fuel is exhausted before a difference is found.
    """
    obs = A.TupleE(tuple(out))
    outvars = A.expr_vars(obs)
    c1, live1 = A.slice_dead(c1, outvars)
    c2, live2 = A.slice_dead(c2, outvars)
    if memories is None:
        memories = dom.memories(live1 | live2)
    undecided = False
    for m in memories:
        try:
            d1 = pushforward(interpret(c1, m, fuel), obs)
            d2 = pushforward(interpret(c2, m, fuel), obs)
        except FuelExhausted:
            undecided = True
            continue
        if d1 != d2:
            return False
    return None if undecided else True
