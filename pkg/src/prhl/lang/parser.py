"""Concrete syntax for programs, expressions, distributions and assertions.

Grammar summary (see README for the full description)::

    program  := decl* stmts ['return' expr (',' expr)*]
    decl     := 'enum' N '=' N ('|' N)* ';'
              | 'var' x (',' x)* ':' type ['in' domain] ';'
              | 'const' x '=' expr ';'
              | 'def' f '(' params ')' '=' dist ';'
    stmt     := 'skip' | x (',' x)* ':=' expr | x '~~' dist | x '++' | x '--'
              | 'if' expr 'then' stmts ['else' (stmts | if-without-fi)] 'fi'
              | 'while' expr 'do' [':'] stmts 'end'
    dist     := 'Bern' '(' expr ')' | '{' expr, ... '}' | '[' lo ',' hi ']'
              | 'dist' '{' expr ':' expr, ... '}' | macro-call

Assertions reuse the expression grammar; ``x#1``/``x#2`` address the two
memories and ``forall i in [lo, hi]. body`` is a bounded quantifier.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from ..values import Sym
from . import ast as A
from . import types as T
from .domains import Bools, Domain, Enum, Lists, Range, Tuples, Values
from .program import Program


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{msg} at line {line}, column {col}" if line else msg)
        self.msg, self.line, self.col = msg, line, col


_UNICODE = {
    "∧": "&&", "∨": "||", "¬": "!", "⇒": "==>", "→": "==>", "⇔": "<=>",
    "≥": ">=", "≤": "<=", "≠": "!=", "∀": "forall", "∃": "exists", "⟨": "#", "←": ":=",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n⟩]+|//[^\n]*)
  | (?P<num>\d+\.\d+|\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>==>|<=>|:=|~~|::|&&|\|\||!=|<=|>=|\+\+|--|[()\[\]{},;:.?=<>+\-*/!\#|])
  | (?P<uni>[∧∨¬⇒→⇔≥≤≠∀∃⟨←])
""", re.VERBOSE)

KEYWORDS = {
    "if", "then", "else", "fi", "while", "do", "end", "skip", "return", "var", "const",
    "def", "enum", "true", "false", "not", "mod", "forall", "exists", "in", "dist",
}


@dataclass
class Tok:
    kind: str  # 'num' | 'id' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out: list[Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, s = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind == "uni":
            s = _UNICODE[s]
            kind = "id" if s.isalpha() else "op"
        if kind != "ws":
            out.append(Tok(kind, s, line, col))
        nl = s.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(Tok("eof", "", line, pos - line_start + 1))
    return out


_CMP = {"=", "!=", "<", "<=", ">", ">="}
_FOLD = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}


def _is_num_lit(e) -> bool:
    return isinstance(e, A.Lit) and isinstance(e.value, (int, Fraction)) and not isinstance(e.value, bool)


def _fold(op: str, l: A.Expr, r: A.Expr) -> A.Expr:
    if _is_num_lit(l) and _is_num_lit(r):
        if op in _FOLD:
            return A.Lit(_FOLD[op](l.value, r.value))
        if op == "/" and r.value != 0:
            q = Fraction(l.value) / r.value
            return A.Lit(int(q) if q.denominator == 1 else q)
    return A.Binop(op, l, r)


class Parser:
    def __init__(self, text: str, *, functions: Optional[Mapping[str, T.Function]] = None,
                 enums: Mapping[str, T.EnumT] = {}, consts: Mapping[str, object] = {},
                 overrides: Mapping[str, object] = {}, assertion: bool = False,
                 logic: Iterable[str] = (), known: Optional[Iterable[str]] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.functions = functions if functions is not None else T.Functions()
        self.enums = dict(enums)
        self.syms: dict[str, Sym] = {s.name: s for e in self.enums.values() for s in e.syms()}
        self.consts = dict(consts)
        self.overrides = dict(overrides)
        self.assertion = assertion
        self.bound: list[str] = list(logic)
        self.known = set(known) if known is not None else None
        self.types: dict[str, T.Type] = {}
        self.domains: dict[str, Domain] = {}
        self.macros: dict[str, tuple] = {}

    # token helpers ---------------------------------------------------------
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "id") and self.tok.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r} but found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def fail(self, msg: str, tok: Optional[Tok] = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    def name(self) -> str:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS:
            self.fail(f"expected identifier but found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def int_lit(self) -> int:
        v = self.const_value(self.expr())
        if not isinstance(v, int) or isinstance(v, bool):
            self.fail("expected an integer constant")
        return v

    def const_value(self, e: A.Expr):
        if isinstance(e, A.Lit):
            return e.value
        if isinstance(e, A.Unop) and e.op == "neg" and _is_num_lit(e.arg):
            return -e.arg.value
        if isinstance(e, A.TupleE):
            return tuple(self.const_value(x) for x in e.items)
        self.fail("expected a constant")

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")

    # programs ----------------------------------------------------------------
    def program(self) -> Program:
        while self.at("enum", "var", "const", "def"):
            self.decl()
        body = self.stmts()
        returns: tuple = ()
        if self.accept("return"):
            items = [self.expr()]
            while self.accept(","):
                items.append(self.expr())
            self.accept(";")
            returns = tuple(items)
        self.done()
        return Program(body, self.types, self.enums, self.domains, returns, self.functions)

    def decl(self):
        kw = self.tok.text
        self.i += 1
        if kw == "enum":
            name = self.name()
            self.expect("=")
            cs = [self.name()]
            while self.accept("|"):
                cs.append(self.name())
            et = T.EnumT(name, tuple(cs))
            self.enums[name] = et
            self.syms.update({s.name: s for s in et.syms()})
        elif kw == "var":
            names = [self.name()]
            while self.accept(","):
                names.append(self.name())
            self.expect(":")
            t = self.type_()
            dom = self.domain() if self.accept("in") else None
            for n in names:
                self.types[n] = t
                if dom is not None:
                    self.domains[n] = dom
        elif kw == "const":
            name = self.name()
            self.expect("=")
            e = self.expr()
            self.consts[name] = self.overrides.get(name, self.const_value(e))
        else:
            name = self.name()
            self.expect("(")
            params = []
            if not self.at(")"):
                params.append(self.name())
                while self.accept(","):
                    params.append(self.name())
            self.expect(")")
            self.expect("=")
            self.macros[name] = (tuple(params), self.dist())
        self.expect(";")

    def type_(self) -> T.Type:
        if self.accept("("):
            items = [self.type_()]
            while self.accept(","):
                items.append(self.type_())
            self.expect(")")
            return T.TupleT(tuple(items))
        t = self.tok
        n = self.name()
        if n == "int":
            return T.INT
        if n == "rat":
            return T.RAT
        if n == "bool":
            return T.BOOL
        if n == "list":
            self.expect("(")
            el = self.type_()
            self.expect(")")
            return T.ListT(el)
        if n == "vec":
            self.expect("(")
            k = self.int_lit()
            self.expect(")")
            return T.vec(k)
        if n in self.enums:
            return self.enums[n]
        self.fail(f"unknown type {n!r}", t)

    def domain(self) -> Domain:
        if self.accept("["):
            lo = self.int_lit()
            self.expect(",")
            hi = self.int_lit()
            self.expect("]")
            return Range(lo, hi)
        if self.accept("{"):
            items = []
            if not self.at("}"):
                items.append(self.const_value(self.expr()))
                while self.accept(","):
                    items.append(self.const_value(self.expr()))
            self.expect("}")
            return Values(tuple(items))
        if self.accept("("):
            items = [self.domain()]
            while self.accept(","):
                items.append(self.domain())
            self.expect(")")
            return Tuples(tuple(items))
        t = self.tok
        n = self.name()
        if n == "bool":
            return Bools()
        if n == "list":
            self.expect("(")
            el = self.domain()
            self.expect(",")
            k = self.int_lit()
            self.expect(")")
            return Lists(el, k)
        if n == "vec":
            self.expect("(")
            k = self.int_lit()
            self.expect(",")
            el = self.domain()
            self.expect(")")
            return Tuples((el,) * k)
        if n in self.enums:
            return Enum(self.enums[n])
        self.fail(f"unknown domain {n!r}", t)

    # statements --------------------------------------------------------------
    def stmts(self) -> A.Command:
        items: list[A.Command] = []
        while not self.at("end", "fi", "else", "return") and self.tok.kind != "eof":
            items.append(self.stmt())
            while self.accept(";"):
                pass
        return A.seq(*items)

    def stmt(self) -> A.Command:
        t = self.tok
        loc = (t.line, t.col)
        if self.accept("skip"):
            return A.Skip(loc)
        if self.at("if"):
            self.i += 1
            return self.if_rest(loc)
        if self.accept("while"):
            test = self.expr()
            self.expect("do")
            self.accept(":")
            body = self.stmts()
            self.expect("end")
            return A.While(test, body, loc)
        names = [self.name()]
        if self.accept("++"):
            return A.Assign(names[0], A.Binop("+", A.Var(names[0]), A.Lit(1)), loc)
        if self.accept("--"):
            return A.Assign(names[0], A.Binop("-", A.Var(names[0]), A.Lit(1)), loc)
        if self.accept("~~"):
            return A.Rand(names[0], self.coerce_dist(names[0], self.dist()), loc)
        while self.accept(","):
            names.append(self.name())
        self.expect(":=")
        e = self.expr()
        return A.seq(*(A.Assign(n, e, loc) for n in names)) if len(names) > 1 else A.Assign(names[0], e, loc)

    def if_rest(self, loc) -> A.Command:
        test = self.expr()
        self.expect("then")
        then = self.stmts()
        orelse: A.Command = A.SKIP
        if self.accept("else"):
            if self.at("if"):
                t = self.tok
                self.i += 1
                # 'else if' shares the closing 'fi' of the outer conditional
                return A.If(test, then, self.if_rest((t.line, t.col)), loc)
            orelse = self.stmts()
        self.expect("fi")
        return A.If(test, then, orelse, loc)

    def coerce_dist(self, var: str, d: A.DistExpr) -> A.DistExpr:
        if (self.types.get(var) == T.BOOL and isinstance(d, A.UniformSet)
                and all(isinstance(x, A.Lit) and x.value in (0, 1) and not isinstance(x.value, bool)
                        for x in d.items)):
            return A.UniformSet(tuple(A.Lit(bool(x.value)) for x in d.items))
        return d

    # distributions -----------------------------------------------------------
    def dist(self) -> A.DistExpr:
        t = self.tok
        if self.accept("{"):
            items = [self.expr()]
            while self.accept(","):
                items.append(self.expr())
            self.expect("}")
            return A.UniformSet(tuple(items))
        if self.accept("["):
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect("]")
            return A.UniformRange(lo, hi)
        if self.accept("dist"):
            self.expect("{")
            rows = []
            while True:
                v = self.expr()
                self.expect(":")
                rows.append((v, self.expr()))
                if not self.accept(","):
                    break
            self.expect("}")
            return A.Explicit(tuple(rows))
        n = self.name()
        if n == "Bern":
            self.expect("(")
            p = self.expr()
            self.expect(")")
            return A.Bern(p)
        if n in self.macros:
            params, body = self.macros[n]
            args: list[A.Expr] = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
            if len(args) != len(params):
                self.fail(f"{n} expects {len(params)} argument(s), got {len(args)}", t)
            sub = dict(zip(params, args))
            f = lambda e: A.map_vars(e, lambda v: sub.get(v.name, v) if v.tag is None else v)  # noqa: E731
            return A.map_dist(body, f)
        self.fail(f"unknown distribution {n!r}", t)

    # expressions -------------------------------------------------------------
    def expr(self) -> A.Expr:
        if self.at("forall", "exists"):
            kind = self.tok.text
            self.i += 1
            var = self.name()
            self.expect("in")
            self.expect("[")
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect("]")
            self.expect(".")
            self.bound.append(var)
            try:
                body = self.expr()
            finally:
                self.bound.pop()
            return A.Quant(kind, var, lo, hi, body)
        return self.ternary()

    def ternary(self) -> A.Expr:
        test = self.iff()
        if self.accept("?"):
            a = self.ternary()
            self.expect(":")
            b = self.ternary()
            return A.Cond(test, a, b)
        return test

    def iff(self) -> A.Expr:
        l = self.implication()
        while self.accept("<=>"):
            l = A.Binop("<=>", l, self.implication())
        return l

    def implication(self) -> A.Expr:
        l = self.disj()
        if self.accept("==>"):
            r = self.expr() if self.at("forall", "exists") else self.implication()
            return A.Binop("==>", l, r)
        return l

    def disj(self) -> A.Expr:
        l = self.conj()
        while self.accept("||") or self.accept("or"):
            l = A.Binop("||", l, self.conj())
        return l

    def conj(self) -> A.Expr:
        l = self.negation()
        while self.accept("&&") or self.accept("and"):
            r = self.expr() if self.at("forall", "exists") else self.negation()
            l = A.Binop("&&", l, r)
        return l

    def negation(self) -> A.Expr:
        if self.accept("!") or self.accept("not"):
            return A.Unop("not", self.negation())
        return self.comparison()

    def comparison(self) -> A.Expr:
        l = self.cons()
        if self.tok.kind == "op" and self.tok.text in _CMP:
            op = self.tok.text
            self.i += 1
            return A.Binop(op, l, self.cons())
        return l

    def cons(self) -> A.Expr:
        h = self.additive()
        if self.accept("::"):
            return A.Cons(h, self.cons())
        return h

    def additive(self) -> A.Expr:
        l = self.term()
        while True:
            if self.accept("+"):
                l = _fold("+", l, self.term())
            elif self.accept("-"):
                l = _fold("-", l, self.term())
            elif self.accept("--"):
                l = _fold("+", l, self.term())
            else:
                return l

    def term(self) -> A.Expr:
        l = self.unary()
        while True:
            if self.accept("*"):
                l = _fold("*", l, self.unary())
            elif self.accept("/"):
                l = _fold("/", l, self.unary())
            elif self.accept("mod"):
                l = A.Binop("mod", l, self.unary())
            else:
                return l

    def unary(self) -> A.Expr:
        if self.accept("-"):
            e = self.unary()
            return A.Lit(-e.value) if _is_num_lit(e) else A.Unop("neg", e)
        if self.accept("!") or self.accept("not"):
            return A.Unop("not", self.unary())
        return self.postfix()

    def postfix(self) -> A.Expr:
        e = self.atom()
        while self.at("["):
            self.i += 1
            idx = self.expr()
            self.expect("]")
            e = A.Index(e, idx)
        return e

    def atom(self) -> A.Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return A.Lit(int(t.text) if t.text.isdigit() else Fraction(t.text))
        if self.accept("true"):
            return A.TRUE
        if self.accept("false"):
            return A.FALSE
        if self.accept("("):
            items = [self.expr()]
            trailing = False
            while self.accept(","):
                if self.at(")"):
                    trailing = True
                    break
                items.append(self.expr())
            self.expect(")")
            return items[0] if len(items) == 1 and not trailing else A.TupleE(tuple(items))
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            return A.ListE(tuple(items))
        n = self.name()
        if self.at("("):
            return self.call(n, t)
        if self.accept("#"):
            tag = self.tok
            if tag.kind != "num" or tag.text not in ("1", "2"):
                self.fail("side tag must be #1 or #2", tag)
            self.i += 1
            if self.known is not None and n not in self.known:
                self.fail(f"unknown identifier {n!r}", t)
            return A.Var(n, int(tag.text))
        if n in self.bound:
            return A.Var(n)
        if n in self.overrides:
            return A.Lit(self.overrides[n])
        if n in self.consts:
            return A.Lit(self.consts[n])
        if n in self.syms:
            return A.Lit(self.syms[n])
        if self.assertion:
            self.fail(f"untagged variable {n!r} in assertion (write {n}#1 or {n}#2)", t)
        if self.known is not None and n not in self.known and n not in self.types:
            self.fail(f"unknown identifier {n!r}", t)
        return A.Var(n)

    def call(self, n: str, t: Tok) -> A.Expr:
        self.expect("(")
        args: list[A.Expr] = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        fn = self.functions.get(n)
        if fn is None:
            self.fail(f"unknown function {n!r}", t)
        if fn.params is not None and len(fn.params) != len(args):
            self.fail(f"{n} expects {len(fn.params)} argument(s), got {len(args)}", t)
        return A.Call(n, tuple(args), fn)


def parse_program(text: str, functions=None, enums: Mapping[str, T.EnumT] = {},
                  overrides: Mapping[str, object] = {}) -> Program:
    p = Parser(text, functions=functions, enums=enums, overrides=overrides)
    prog = p.program()
    return Program(prog.body, prog.types, prog.enums, prog.domains, prog.returns,
                   prog.functions, source=text)


def parse_command(text: str, **kw) -> A.Command:
    return parse_program(text, **kw).body


def parse_expr(text: str, functions=None, enums: Mapping[str, T.EnumT] = {},
               consts: Mapping[str, object] = {}, logic: Iterable[str] = ()) -> A.Expr:
    p = Parser(text, functions=functions, enums=enums, consts=consts, logic=logic)
    e = p.expr()
    p.done()
    return e


def parse_dist(text: str, functions=None, enums: Mapping[str, T.EnumT] = {},
               consts: Mapping[str, object] = {}) -> A.DistExpr:
    p = Parser(text, functions=functions, enums=enums, consts=consts)
    d = p.dist()
    p.done()
    return d


def parse_assertion(text: str, functions=None, enums: Mapping[str, T.EnumT] = {},
                    consts: Mapping[str, object] = {}, logic: Iterable[str] = (),
                    known: Optional[Iterable[str]] = None) -> A.Expr:
    p = Parser(text, functions=functions, enums=enums, consts=consts, assertion=True,
               logic=logic, known=known)
    e = p.expr()
    p.done()
    return e
