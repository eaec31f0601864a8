"""Simple types, the registry of pure functions, and the type checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from . import ast as A
from ..values import PList, Sym


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class IntT(Type):
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class RatT(Type):
    def __str__(self):
        return "rat"


@dataclass(frozen=True)
class BoolT(Type):
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class EnumT(Type):
    name: str
    constants: tuple[str, ...] = field(default=(), compare=False)

    def syms(self) -> list[Sym]:
        return [Sym(self.name, c, i) for i, c in enumerate(self.constants)]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ListT(Type):
    elem: Type

    def __str__(self):
        return f"list {self.elem}"


@dataclass(frozen=True)
class TupleT(Type):
    items: tuple[Type, ...]

    def __str__(self):
        return "(" + ", ".join(map(str, self.items)) + ")"


@dataclass(frozen=True)
class AnyT(Type):
    """Unknown element type (the empty list literal)."""

    def __str__(self):
        return "?"


INT, RAT, BOOL, ANY = IntT(), RatT(), BoolT(), AnyT()


def vec(n: int) -> TupleT:
    return TupleT((INT,) * n)


def is_num(t: Type) -> bool:
    return isinstance(t, (IntT, RatT, AnyT))


def is_int_vec(t: Type) -> bool:
    return isinstance(t, TupleT) and all(isinstance(x, (IntT, AnyT)) for x in t.items)


def assignable(src: Type, dst: Type) -> bool:
    """Can a value of type ``src`` be stored where ``dst`` is expected?"""
    if isinstance(src, AnyT) or isinstance(dst, AnyT):
        return True
    if isinstance(src, IntT) and isinstance(dst, RatT):
        return True
    if isinstance(src, ListT) and isinstance(dst, ListT):
        return assignable(src.elem, dst.elem)
    if isinstance(src, TupleT) and isinstance(dst, TupleT):
        return len(src.items) == len(dst.items) and all(
            assignable(a, b) for a, b in zip(src.items, dst.items))
    return src == dst


def join(a: Type, b: Type) -> Optional[Type]:
    if assignable(a, b):
        return a if isinstance(b, AnyT) else b
    if assignable(b, a):
        return b if isinstance(a, AnyT) else a
    return None


def value_type_ok(v, t: Type) -> bool:
    if isinstance(t, AnyT):
        return True
    if isinstance(t, BoolT):
        return isinstance(v, bool)
    if isinstance(t, IntT):
        return isinstance(v, int) and not isinstance(v, bool) or (
            isinstance(v, Fraction) and v.denominator == 1)
    if isinstance(t, RatT):
        return isinstance(v, (int, Fraction)) and not isinstance(v, bool)
    if isinstance(t, EnumT):
        return isinstance(v, Sym) and v.enum == t.name
    if isinstance(t, ListT):
        return isinstance(v, PList) and all(value_type_ok(x, t.elem) for x in v)
    if isinstance(t, TupleT):
        return (isinstance(v, tuple) and not isinstance(v, PList) and len(v) == len(t.items)
                and all(value_type_ok(x, s) for x, s in zip(v, t.items)))
    return False


# registered functions --------------------------------------------------------

ResultType = Union[Type, Callable[[Sequence[Type]], Optional[Type]]]


@dataclass(frozen=True)
class Function:
    name: str
    params: Optional[tuple[Type, ...]]  # None: checked by ``result`` alone
    result: ResultType
    impl: Callable = field(compare=False)

    def result_type(self, args: Sequence[Type]) -> Optional[Type]:
        if self.params is not None:
            if len(args) != len(self.params):
                return None
            if not all(assignable(a, p) for a, p in zip(args, self.params)):
                return None
        if callable(self.result) and not isinstance(self.result, Type):
            return self.result(args)
        return self.result


def _num_result(args):
    if len(args) == 2 and all(is_num(a) for a in args):
        return RAT if any(isinstance(a, RatT) for a in args) else INT
    return None


def _unary_num(args):
    if len(args) == 1 and is_num(args[0]):
        return args[0]
    return None


def _len_result(args):
    if len(args) == 1 and isinstance(args[0], (ListT, TupleT, AnyT)):
        return INT
    return None


BUILTINS: dict[str, Function] = {
    "min": Function("min", None, _num_result, min),
    "max": Function("max", None, _num_result, max),
    "abs": Function("abs", None, _unary_num, abs),
    "pos": Function("pos", None, _unary_num, lambda x: x if x > 0 else 0),
    "len": Function("len", None, _len_result, len),
}


class Functions(dict):
    """Name -> :class:`Function`; always includes the builtins."""

    def __init__(self, extra: Mapping[str, Function] | Sequence[Function] = ()):
        super().__init__(BUILTINS)
        items = extra.values() if isinstance(extra, Mapping) else extra
        for f in items:
            self[f.name] = f


# type checking ---------------------------------------------------------------

class TypeCheckError(Exception):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


_ARITH = {"+", "-", "*"}
_CMP = {"<", "<=", ">", ">="}
_EQ = {"=", "!="}
_BOOLOPS = {"&&", "||", "==>", "<=>"}


class Checker:
    def __init__(self, env: Mapping[str, Type], functions: Mapping[str, Function],
                 tagged: Optional[Mapping[int, Mapping[str, Type]]] = None):
        self.env = env
        self.functions = functions
        self.tagged = tagged or {}
        self.errors: list[str] = []

    def err(self, msg: str) -> Type:
        self.errors.append(msg)
        return ANY

    def typeof(self, e: A.Expr, logic: Mapping[str, Type] = {}) -> Type:
        if isinstance(e, A.Lit):
            return literal_type(e.value)
        if isinstance(e, A.Var):
            if e.tag is None:
                if e.name in logic:
                    return logic[e.name]
                if e.name in self.env:
                    return self.env[e.name]
                return self.err(f"unknown identifier {e.name}")
            env = self.tagged.get(e.tag, self.env)
            if e.name not in env:
                return self.err(f"unknown identifier {e}")
            return env[e.name]
        if isinstance(e, A.Unop):
            t = self.typeof(e.arg, logic)
            if e.op == "not":
                if not assignable(t, BOOL):
                    return self.err(f"'not' applied to {t}")
                return BOOL
            if not (is_num(t) or is_int_vec(t)):
                return self.err(f"negation applied to {t}")
            return t
        if isinstance(e, A.Binop):
            return self._binop(e, logic)
        if isinstance(e, A.Cond):
            if not assignable(self.typeof(e.test, logic), BOOL):
                self.err("conditional test is not boolean")
            a, b = self.typeof(e.then, logic), self.typeof(e.orelse, logic)
            j = join(a, b)
            return j if j is not None else self.err(f"conditional branches {a} and {b} differ")
        if isinstance(e, A.TupleE):
            return TupleT(tuple(self.typeof(x, logic) for x in e.items))
        if isinstance(e, A.ListE):
            t: Type = ANY
            for x in e.items:
                j = join(t, self.typeof(x, logic))
                if j is None:
                    return self.err("list literal with mixed element types")
                t = j
            return ListT(t)
        if isinstance(e, A.Index):
            base = self.typeof(e.base, logic)
            it = self.typeof(e.index, logic)
            if not isinstance(it, (IntT, AnyT)):
                self.err("index is not an integer")
            if isinstance(base, TupleT):
                if isinstance(e.index, A.Lit) and isinstance(e.index.value, int):
                    k = e.index.value
                    if not 1 <= k <= len(base.items):
                        return self.err(f"index {k} out of range for {base}")
                    return base.items[k - 1]
                first = base.items[0] if base.items else ANY
                if any(x != first for x in base.items):
                    return self.err("dynamic index into heterogeneous tuple")
                return first
            if isinstance(base, ListT):
                return base.elem
            if isinstance(base, AnyT):
                return ANY
            return self.err(f"cannot index {base}")
        if isinstance(e, A.Cons):
            h, tl = self.typeof(e.head, logic), self.typeof(e.tail, logic)
            if not isinstance(tl, (ListT, AnyT)):
                return self.err(f"'::' onto non-list {tl}")
            if isinstance(tl, AnyT):
                return ListT(h)
            j = join(h, tl.elem)
            return ListT(j) if j is not None else self.err(f"'::' of {h} onto {tl}")
        if isinstance(e, A.Call):
            f = self.functions.get(e.name)
            if f is None:
                return self.err(f"unknown function {e.name}")
            args = [self.typeof(x, logic) for x in e.args]
            r = f.result_type(args)
            if r is None:
                return self.err(f"bad arguments to {e.name}: ({', '.join(map(str, args))})")
            return r
        if isinstance(e, A.Quant):
            for b in (e.lo, e.hi):
                if not isinstance(self.typeof(b, logic), (IntT, AnyT)):
                    self.err("quantifier bound is not an integer")
            inner = dict(logic)
            inner[e.var] = INT
            if not assignable(self.typeof(e.body, inner), BOOL):
                self.err("quantifier body is not boolean")
            return BOOL
        return self.err(f"unknown expression {e!r}")

    def _binop(self, e: A.Binop, logic) -> Type:
        a, b = self.typeof(e.left, logic), self.typeof(e.right, logic)
        op = e.op
        if op in _BOOLOPS:
            if not (assignable(a, BOOL) and assignable(b, BOOL)):
                return self.err(f"'{op}' on {a}, {b}")
            return BOOL
        if op in _EQ:
            if join(a, b) is None:
                return self.err(f"comparing {a} with {b}")
            return BOOL
        if op in _CMP:
            if join(a, b) is None:
                return self.err(f"ordering {a} against {b}")
            return BOOL
        if op in _ARITH:
            if is_num(a) and is_num(b):
                return _num_result([a, b])
            if is_int_vec(a) and is_int_vec(b) and op != "*":
                if len(a.items) != len(b.items):
                    return self.err("vector length mismatch")
                return a
            if op == "*" and isinstance(a, (IntT, AnyT)) and is_int_vec(b):
                return b
            return self.err(f"'{op}' on {a}, {b}")
        if op == "/":
            if is_num(a) and is_num(b):
                return RAT
            return self.err(f"'/' on {a}, {b}")
        if op == "mod":
            if not isinstance(b, (IntT, AnyT)):
                return self.err("modulus is not an integer")
            if isinstance(a, (IntT, AnyT)) or is_int_vec(a):
                return a
            return self.err(f"'mod' on {a}")
        return self.err(f"unknown operator {op}")

    def dist_type(self, d: A.DistExpr, logic: Mapping[str, Type] = {}) -> Type:
        if isinstance(d, A.Bern):
            if not is_num(self.typeof(d.p, logic)):
                self.err("Bern parameter is not numeric")
            if isinstance(d.p, A.Lit) or _const(d.p) is not None:
                p = _const(d.p)
                if p is not None and not 0 <= p <= 1:
                    self.err(f"Bern parameter {p} outside [0, 1]")
            return BOOL
        if isinstance(d, A.UniformSet):
            t: Type = ANY
            for x in d.items:
                j = join(t, self.typeof(x, logic))
                if j is None:
                    return self.err("uniform set with mixed element types")
                t = j
            return t
        if isinstance(d, A.UniformRange):
            for x in (d.lo, d.hi):
                if not isinstance(self.typeof(x, logic), (IntT, AnyT)):
                    self.err("range bound is not an integer")
            return INT
        if isinstance(d, A.Explicit):
            t = ANY
            for v, p in d.rows:
                if not is_num(self.typeof(p, logic)):
                    self.err("probability entry is not numeric")
                j = join(t, self.typeof(v, logic))
                if j is None:
                    return self.err("explicit table with mixed value types")
                t = j
            return t
        return self.err(f"unknown distribution {d!r}")

    def command(self, c: A.Command) -> None:
        where = f" (line {c.loc[0]}, col {c.loc[1]})" if getattr(c, "loc", None) else ""
        if isinstance(c, A.Skip):
            return
        if isinstance(c, A.Assign):
            dst = self._decl(c.var, where)
            src = self.typeof(c.expr)
            if dst is not None and not assignable(src, dst):
                self.err(f"cannot assign {src} to {c.var} : {dst}{where}")
        elif isinstance(c, A.Rand):
            dst = self._decl(c.var, where)
            src = self.dist_type(c.dist)
            if dst is not None and not assignable(src, dst):
                self.err(f"cannot sample {src} into {c.var} : {dst}{where}")
        elif isinstance(c, (A.If, A.While)):
            if not assignable(self.typeof(c.test), BOOL):
                self.err(f"guard is not boolean{where}")
            if isinstance(c, A.If):
                self.command(c.then)
                self.command(c.orelse)
            else:
                self.command(c.body)
        elif isinstance(c, A.Seq):
            self.command(c.first)
            self.command(c.second)

    def _decl(self, name: str, where: str) -> Optional[Type]:
        if name not in self.env:
            self.err(f"undeclared variable {name}{where}")
            return None
        return self.env[name]


def _const(e: A.Expr):
    """Evaluate a closed arithmetic literal expression, else ``None``."""
    if isinstance(e, A.Lit) and isinstance(e.value, (int, Fraction)) and not isinstance(e.value, bool):
        return Fraction(e.value)
    if isinstance(e, A.Binop) and e.op in {"+", "-", "*", "/"}:
        a, b = _const(e.left), _const(e.right)
        if a is None or b is None or (e.op == "/" and b == 0):
            return None
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b if b else None}[e.op]
    if isinstance(e, A.Unop) and e.op == "neg":
        a = _const(e.arg)
        return None if a is None else -a
    return None


def literal_type(v) -> Type:
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, Fraction):
        return INT if v.denominator == 1 else RAT
    if isinstance(v, Sym):
        return EnumT(v.enum, ())
    if isinstance(v, PList):
        return ListT(literal_type(v[0]) if v else ANY)
    if isinstance(v, tuple):
        return TupleT(tuple(literal_type(x) for x in v))
    return ANY


def decode(obj, t: Type):
    """Read a JSON value as a value of type ``t`` (arrays become lists or tuples by type)."""
    if isinstance(t, BoolT):
        if not isinstance(obj, bool):
            raise ValueError(f"expected a boolean, got {obj!r}")
        return obj
    if isinstance(t, IntT):
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise ValueError(f"expected an integer, got {obj!r}")
        return obj
    if isinstance(t, RatT):
        if isinstance(obj, bool) or not isinstance(obj, (int, str)):
            raise ValueError(f"expected a rational such as \"3/10\", got {obj!r}")
        q = Fraction(obj)
        return int(q) if q.denominator == 1 else q
    if isinstance(t, EnumT):
        for s in t.syms():
            if s.name == obj:
                return s
        raise ValueError(f"{obj!r} is not a constant of {t.name}")
    if isinstance(t, ListT):
        items = obj["list"] if isinstance(obj, dict) and set(obj) == {"list"} else obj
        if not isinstance(items, list):
            raise ValueError(f"expected a list, got {obj!r}")
        return PList(decode(x, t.elem) for x in items)
    if isinstance(t, TupleT):
        if not isinstance(obj, list) or len(obj) != len(t.items):
            raise ValueError(f"expected {len(t.items)}-element array, got {obj!r}")
        return tuple(decode(x, u) for x, u in zip(obj, t.items))
    raise ValueError(f"cannot decode a value of type {t}")
