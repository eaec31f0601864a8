"""Render ASTs back to the concrete syntax accepted by the parser."""
from __future__ import annotations

from fractions import Fraction

from ..values import PList, Sym
from . import ast as A

_PREC = {"<=>": 2, "==>": 3, "||": 4, "&&": 5, "=": 7, "!=": 7, "<": 7, "<=": 7, ">": 7,
         ">=": 7, "+": 9, "-": 9, "*": 10, "/": 10, "mod": 10}
_RIGHT = {"==>"}


def show_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, PList):
        return "[" + ", ".join(show_value(x) for x in v) + "]"
    if isinstance(v, tuple):
        return "(" + ", ".join(show_value(x) for x in v) + ("," if len(v) == 1 else "") + ")"
    return str(v)


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.Quant):
        return 0
    if isinstance(e, A.Cond):
        return 1
    if isinstance(e, A.Binop):
        return _PREC[e.op]
    if isinstance(e, A.Unop):
        return 6 if e.op == "not" else 11
    if isinstance(e, A.Cons):
        return 8
    if isinstance(e, A.Lit):
        v = e.value
        if isinstance(v, Fraction) and v.denominator != 1:
            return 10
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool) and v < 0:
            return 11
    return 13


def _wrap(e: A.Expr, need: int) -> str:
    s = show(e)
    return f"({s})" if _prec(e) < need else s


def show(e: A.Expr) -> str:
    if isinstance(e, A.Lit):
        return show_value(e.value)
    if isinstance(e, A.Var):
        return str(e)
    if isinstance(e, A.Unop):
        if e.op == "not":
            return "!" + _wrap(e.arg, 7)
        return "-" + _wrap(e.arg, 12)
    if isinstance(e, A.Binop):
        p = _PREC[e.op]
        if p == 7:
            return f"{_wrap(e.left, 8)} {e.op} {_wrap(e.right, 8)}"
        if e.op in _RIGHT:
            return f"{_wrap(e.left, p + 1)} {e.op} {_wrap(e.right, p)}"
        return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"
    if isinstance(e, A.Cond):
        return f"{_wrap(e.test, 2)} ? {_wrap(e.then, 1)} : {_wrap(e.orelse, 1)}"
    if isinstance(e, A.TupleE):
        return "(" + ", ".join(show(x) for x in e.items) + ("," if len(e.items) == 1 else "") + ")"
    if isinstance(e, A.ListE):
        return "[" + ", ".join(show(x) for x in e.items) + "]"
    if isinstance(e, A.Index):
        return f"{_wrap(e.base, 12)}[{show(e.index)}]"
    if isinstance(e, A.Cons):
        return f"{_wrap(e.head, 9)} :: {_wrap(e.tail, 8)}"
    if isinstance(e, A.Call):
        return f"{e.name}(" + ", ".join(show(x) for x in e.args) + ")"
    if isinstance(e, A.Quant):
        return f"{e.kind} {e.var} in [{show(e.lo)}, {show(e.hi)}]. {show(e.body)}"
    raise TypeError(e)


def show_dist(d: A.DistExpr) -> str:
    if isinstance(d, A.Bern):
        return f"Bern({show(d.p)})"
    if isinstance(d, A.UniformSet):
        return "{" + ", ".join(show(x) for x in d.items) + "}"
    if isinstance(d, A.UniformRange):
        return f"[{show(d.lo)}, {show(d.hi)}]"
    rows = ", ".join(f"{show(v)} : {show(p)}" for v, p in d.rows)
    return "dist { " + rows + " }"


def show_command(c: A.Command, indent: int = 0) -> str:
    pad = "  " * indent
    items = A.flatten(c)
    if not items:
        return pad + "skip"
    lines = []
    for s in items:
        if isinstance(s, A.Assign):
            lines.append(f"{pad}{s.var} := {show(s.expr)}")
        elif isinstance(s, A.Rand):
            lines.append(f"{pad}{s.var} ~~ {show_dist(s.dist)}")
        elif isinstance(s, A.If):
            body = f"{pad}if {show(s.test)} then\n{show_command(s.then, indent + 1)}"
            if A.flatten(s.orelse):
                body += f"\n{pad}else\n{show_command(s.orelse, indent + 1)}"
            lines.append(body + f"\n{pad}fi")
        elif isinstance(s, A.While):
            lines.append(f"{pad}while {show(s.test)} do\n{show_command(s.body, indent + 1)}\n{pad}end")
    return ";\n".join(lines)
