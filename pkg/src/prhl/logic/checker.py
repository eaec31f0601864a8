"""Structural proof checker for pRHL derivations.

Every rule application produces zero or more obligations, each discharged by
enumerating memory pairs from a :class:`DomainDecl`. Failed obligations carry
the memory pair (and sample value, where relevant) that breaks them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..dist import DistributionError
from ..lang import ast as A
from ..lang.domains import DomainDecl, DomainError
from ..lang.semantics import (DEFAULT_FUEL, EvalError, FuelExhausted, compile_expr, eval_dist,
                              interpret, is_lossless, pushforward)
from ..lang.transform import TransformError, apply_transform
from ..values import Memory, to_json
from . import proof as P
from .enumerate import DEFAULT_CAP, CapacityError, pairs

OK, FAILED, UNKNOWN = "ok", "failed", "indeterminate"
_EVAL_ERRORS = (EvalError, DistributionError, TypeError, IndexError, ZeroDivisionError)


@dataclass
class Obligation:
    index: int
    rule: str
    path: str
    kind: str
    result: str
    detail: str = ""
    counterexample: Optional[dict] = None
    checked: int = 0

    def to_json(self) -> dict:
        d = {"index": self.index, "rule": self.rule, "path": self.path, "kind": self.kind,
             "result": self.result, "checked": self.checked}
        if self.detail:
            d["detail"] = self.detail
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        return d


@dataclass
class CheckReport:
    obligations: list = field(default_factory=list)

    @property
    def status(self) -> str:
        results = {o.result for o in self.obligations}
        if FAILED in results:
            return "rejected"
        if UNKNOWN in results:
            return "indeterminate"
        return "accepted"

    @property
    def failures(self) -> list:
        return [o for o in self.obligations if o.result != OK]

    def to_json(self) -> dict:
        return {"schema": "prhl-verdict/1", "status": self.status,
                "obligations": [o.to_json() for o in self.obligations]}


class ProofRejected(Exception):
    def __init__(self, report: CheckReport):
        first = report.failures[0] if report.failures else None
        where = f": {first.rule} {first.kind} at {first.path}" if first else ""
        super().__init__(f"proof {report.status}{where}")
        self.report = report


@dataclass(frozen=True)
class VerifiedJudgment:
    judgment: P.Judgment
    proof: P.ProofNode
    report: CheckReport = field(compare=False)
    dom: DomainDecl = field(compare=False)

    @property
    def pre(self):
        return self.judgment.pre

    @property
    def post(self):
        return self.judgment.post


def _tagged(e: A.Expr) -> set:
    return {k for k in A.free_vars(e) if k[1] is not None}


def _side(names: Iterable[str], tag: int) -> set:
    return {(n, tag) for n in names}


def _cex(m1, m2, **extra) -> dict:
    d = {"m1": to_json(Memory(m1)), "m2": to_json(Memory(m2))}
    for k, v in extra.items():
        d[k] = to_json(v) if not isinstance(v, str) else v
    return d


class _Checker:
    def __init__(self, dom: DomainDecl, fuel: int, cap: int):
        self.dom = dom
        self.fuel = fuel
        self.cap = cap
        self.report = CheckReport()

    # bookkeeping -------------------------------------------------------------
    def record(self, rule, path, kind, result, detail="", cex=None, checked=0):
        self.report.obligations.append(
            Obligation(len(self.report.obligations), rule, path, kind, result, detail, cex, checked))
        return result == OK

    def shape(self, rule, path, msg):
        return self.record(rule, path, "shape", FAILED, msg)

    def foreach(self, rule, path, kind, keys, guard, test):
        """Run ``test(m1, m2)`` on every pair satisfying ``guard``.

        ``test`` returns ``None`` when fine or a ``(detail, extra)`` failure.
        """
        counter = [0]
        n = 0
        try:
            for m1, m2 in pairs(self.dom, keys, guard, cap=self.cap, counter=counter):
                n += 1
                try:
                    bad = test(m1, m2)
                except FuelExhausted as e:
                    return self.record(rule, path, kind, UNKNOWN, str(e), _cex(m1, m2), n)
                except _EVAL_ERRORS as e:
                    bad = (f"evaluation error: {e}", {})
                if bad is not None:
                    detail, extra = bad
                    return self.record(rule, path, kind, FAILED, detail, _cex(m1, m2, **extra), n)
        except CapacityError as e:
            return self.record(rule, path, kind, UNKNOWN, str(e), None, n)
        except DomainError as e:
            return self.record(rule, path, kind, UNKNOWN, str(e), None, n)
        return self.record(rule, path, kind, OK, checked=n)

    def valid(self, rule, path, kind, hyp, concl):
        f = compile_expr(concl, "logic")
        keys = _tagged(hyp) | _tagged(concl)
        return self.foreach(rule, path, kind, keys, hyp,
                            lambda m1, m2: None if f(({}, m1, m2)) else ("assertion is false", {}))

    # rules --------------------------------------------------------------------
    def check(self, node: P.ProofNode, c1, c2, pre, post, path: str) -> None:
        method = getattr(self, "rule_" + node.rule, None)
        if method is None:
            self.shape(node.rule, path, f"unknown rule {node.rule}")
            return
        method(node, c1, c2, pre, post, path)

    def _exec(self, rule, path, c1, c2, pre, post, kind="post"):
        c1, live1 = A.slice_dead(c1, A.side_vars(post, 1))
        c2, live2 = A.slice_dead(c2, A.side_vars(post, 2))
        keys = _tagged(pre) | _side(live1, 1) | _side(live2, 2)
        f = compile_expr(post, "logic")

        def test(m1, m2):
            o1 = interpret(c1, m1, self.fuel)
            o2 = interpret(c2, m2, self.fuel)
            if len(o1) != 1 or len(o2) != 1 or o1.mass != 1 or o2.mass != 1:
                return ("command is not deterministic on this input", {})
            (r1,), (r2,) = o1, o2
            if not f(({}, r1, r2)):
                return ("postcondition fails after the assignments", {})
            return None
        self.foreach(rule, path, kind, keys, pre, test)

    def rule_Skip(self, node, c1, c2, pre, post, path):
        if A.flatten(c1) or A.flatten(c2):
            self.shape("Skip", path, "both commands must be skip")
            return
        self.valid("Skip", path, "pre-implies-post", pre, post)

    def _assign_shape(self, c, want):
        items = A.flatten(c)
        if want:
            return len(items) == 1 and isinstance(items[0], A.Assign)
        return not items

    def rule_Assign(self, node, c1, c2, pre, post, path):
        if not (self._assign_shape(c1, True) and self._assign_shape(c2, True)):
            self.shape("Assign", path, "expects one assignment on each side")
            return
        self._exec("Assign", path, c1, c2, pre, post)

    def rule_AssignL(self, node, c1, c2, pre, post, path):
        if not (self._assign_shape(c1, True) and self._assign_shape(c2, False)):
            self.shape("AssignL", path, "expects an assignment on the left and skip on the right")
            return
        self._exec("AssignL", path, c1, c2, pre, post)

    def rule_AssignR(self, node, c1, c2, pre, post, path):
        if not (self._assign_shape(c1, False) and self._assign_shape(c2, True)):
            self.shape("AssignR", path, "expects skip on the left and an assignment on the right")
            return
        self._exec("AssignR", path, c1, c2, pre, post)

    def rule_Wp(self, node, c1, c2, pre, post, path):
        if not (A.is_deterministic(c1) and A.is_deterministic(c2)):
            self.shape("Wp", path, "both commands must be deterministic and loop-free")
            return
        self._exec("Wp", path, c1, c2, pre, post)

    def rule_Seq(self, node: P.Seq, c1, c2, pre, post, path):
        i1, i2 = A.flatten(c1), A.flatten(c2)
        k1, k2 = node.split
        if not (0 <= k1 <= len(i1) and 0 <= k2 <= len(i2)):
            self.shape("Seq", path, f"split {list(node.split)} outside command lengths ({len(i1)}, {len(i2)})")
            return
        self.check(node.first, A.seq(*i1[:k1]), A.seq(*i2[:k2]), pre, node.mid, path + ".first")
        self.check(node.second, A.seq(*i1[k1:]), A.seq(*i2[k2:]), node.mid, post, path + ".second")

    def rule_Sample(self, node: P.Sample, c1, c2, pre, post, path):
        i1, i2 = A.flatten(c1), A.flatten(c2)
        if not (len(i1) == 1 and len(i2) == 1 and isinstance(i1[0], A.Rand) and isinstance(i2[0], A.Rand)):
            self.shape("Sample", path, "expects one sampling statement on each side")
            return
        r1, r2 = i1[0], i2[0]
        fv = node.var
        keys = (_tagged(pre) | _tagged(node.f) | _side(A.dist_vars(r1.dist), 1)
                | _side(A.dist_vars(r2.dist), 2)
                | _side(A.side_vars(post, 1) - {r1.var}, 1) | _side(A.side_vars(post, 2) - {r2.var}, 2))
        f = compile_expr(node.f, "logic")
        phi = compile_expr(post, "logic")

        def test(m1, m2):
            d1, d2 = eval_dist(m1, r1.dist), eval_dist(m2, r2.dist)
            if d1.mass != d2.mass:
                return (f"distributions have different masses {d1.mass} and {d2.mass}", {})
            seen: dict = {}
            for v in d1.support():
                w = f(({fv: v}, m1, m2))
                if w in seen:
                    return ("bijection is not injective on the support", {"v": v, "w": w, "other": seen[w]})
                seen[w] = v
                if d1[v] != d2[w]:
                    return (f"d1(v) = {d1[v]} but d2(f v) = {d2[w]}", {"v": v, "w": w})
                n1, n2 = dict(m1), dict(m2)
                n1[r1.var], n2[r2.var] = v, w
                if not phi(({}, n1, n2)):
                    return ("postcondition fails for this sample", {"v": v, "w": w})
            return None
        self.foreach("Sample", path, "coupling", keys, pre, test)

    def _sample_one(self, rule, node, c1, c2, pre, post, path, side):
        own = A.flatten(c1 if side == 1 else c2)
        if not own or not isinstance(own[0], A.Rand):
            self.shape(rule, path, f"expects a sampling statement first on side {side}")
            return
        r = own[0]
        keys = (_tagged(pre) | _side(A.dist_vars(r.dist), side)
                | _side(A.side_vars(node.inner, side) - {r.var}, side)
                | _side(A.side_vars(node.inner, 3 - side), 3 - side))
        inner = compile_expr(node.inner, "logic")

        def test(m1, m2):
            mem = m1 if side == 1 else m2
            d = eval_dist(mem, r.dist)
            if d.mass != 1:
                return (f"sampled distribution has mass {d.mass}", {})
            for v in d.support():
                upd = dict(mem)
                upd[r.var] = v
                pair = (upd, m2) if side == 1 else (m1, upd)
                if not inner(({}, *pair)):
                    return ("inner precondition fails for this sample", {"v": v})
            return None
        self.foreach(rule, path, "sample-precondition", keys, pre, test)
        rest = A.seq(*own[1:])
        if side == 1:
            self.check(node.rest, rest, c2, node.inner, post, path + ".rest")
        else:
            self.check(node.rest, c1, rest, node.inner, post, path + ".rest")

    def rule_SampleL(self, node, c1, c2, pre, post, path):
        self._sample_one("SampleL", node, c1, c2, pre, post, path, 1)

    def rule_SampleR(self, node, c1, c2, pre, post, path):
        self._sample_one("SampleR", node, c1, c2, pre, post, path, 2)

    @staticmethod
    def _split_if(c):
        items = A.flatten(c)
        if not items or not isinstance(items[0], A.If):
            return None
        s, rest = items[0], items[1:]
        # trailing statements are pushed into both branches
        return s.test, A.seq(s.then, *rest), A.seq(s.orelse, *rest)

    def rule_If(self, node: P.If, c1, c2, pre, post, path):
        a, b = self._split_if(c1), self._split_if(c2)
        if a is None or b is None:
            self.shape("If", path, "expects a conditional first on both sides")
            return
        g1, g2 = A.tag_expr(a[0], 1), A.tag_expr(b[0], 2)
        self.valid("If", path, "guard-agreement", pre, A.Binop("<=>", g1, g2))
        self.check(node.then, a[1], b[1], A.conj(pre, g1, g2), post, path + ".then")
        self.check(node.orelse, a[2], b[2], A.conj(pre, A.neg(g1), A.neg(g2)), post, path + ".orelse")

    def _if_one(self, rule, node, c1, c2, pre, post, path, side):
        s = self._split_if(c1 if side == 1 else c2)
        if s is None:
            self.shape(rule, path, f"expects a conditional first on side {side}")
            return
        g = A.tag_expr(s[0], side)
        for sub, branch, guard, name in ((node.then, s[1], g, ".then"), (node.orelse, s[2], A.neg(g), ".orelse")):
            args = (branch, c2) if side == 1 else (c1, branch)
            self.check(sub, *args, A.conj(pre, guard), post, path + name)

    def rule_IfL(self, node, c1, c2, pre, post, path):
        self._if_one("IfL", node, c1, c2, pre, post, path, 1)

    def rule_IfR(self, node, c1, c2, pre, post, path):
        self._if_one("IfR", node, c1, c2, pre, post, path, 2)

    def rule_While(self, node: P.While, c1, c2, pre, post, path):
        i1, i2 = A.flatten(c1), A.flatten(c2)
        if not (len(i1) == 1 and len(i2) == 1 and isinstance(i1[0], A.While) and isinstance(i2[0], A.While)):
            self.shape("While", path, "expects exactly one loop on each side")
            return
        w1, w2 = i1[0], i2[0]
        g1, g2 = A.tag_expr(w1.test, 1), A.tag_expr(w2.test, 2)
        inv = node.inv
        self.valid("While", path, "pre-implies-invariant", pre, inv)
        self.valid("While", path, "guard-agreement", inv, A.Binop("<=>", g1, g2))
        self.valid("While", path, "exit-implies-post", A.conj(inv, A.neg(g1)), post)
        self.check(node.body, w1.body, w2.body, A.conj(inv, g1, g2), inv, path + ".body")

    def _while_one(self, rule, node, c1, c2, pre, post, path, side):
        own, other = (c1, c2) if side == 1 else (c2, c1)
        items = A.flatten(own)
        if not (len(items) == 1 and isinstance(items[0], A.While) and not A.flatten(other)):
            self.shape(rule, path, f"expects one loop on side {side} and skip on the other")
            return
        w = items[0]
        g = A.tag_expr(w.test, side)
        inv = node.inv
        self.valid(rule, path, "pre-implies-invariant", pre, inv)
        self.valid(rule, path, "exit-implies-post", A.conj(inv, A.neg(g)), post)
        fuel = node.fuel or self.fuel
        try:
            verdict = is_lossless(w, _one_side(self.dom, side), fuel)
        except (DomainError, *_EVAL_ERRORS) as e:
            self.record(rule, path, "lossless", UNKNOWN, str(e))
        else:
            if verdict is True:
                self.record(rule, path, "lossless", OK)
            elif verdict is False:
                self.record(rule, path, "lossless", FAILED, "loop loses mass on some domain memory")
            else:
                self.record(rule, path, "lossless", UNKNOWN, f"not provably lossless within fuel {fuel}")
        args = (w.body, A.SKIP) if side == 1 else (A.SKIP, w.body)
        self.check(node.body, *args, A.conj(inv, g), inv, path + ".body")

    def rule_WhileL(self, node, c1, c2, pre, post, path):
        self._while_one("WhileL", node, c1, c2, pre, post, path, 1)

    def rule_WhileR(self, node, c1, c2, pre, post, path):
        self._while_one("WhileR", node, c1, c2, pre, post, path, 2)

    def rule_Case(self, node: P.Case, c1, c2, pre, post, path):
        self.check(node.yes, c1, c2, A.conj(pre, node.split), post, path + ".yes")
        self.check(node.no, c1, c2, A.conj(pre, A.neg(node.split)), post, path + ".no")

    def rule_Conseq(self, node: P.Conseq, c1, c2, pre, post, path):
        ipre = node.pre if node.pre is not None else pre
        ipost = node.post if node.post is not None else post
        if node.pre is not None:
            self.valid("Conseq", path, "strengthen-pre", pre, ipre)
        if node.post is not None:
            self.valid("Conseq", path, "weaken-post", ipost, post)
        self.check(node.sub, c1, c2, ipre, ipost, path + ".sub")

    def rule_Equiv(self, node: P.Equiv, c1, c2, pre, post, path):
        side = node.side
        if side not in (1, 2):
            self.shape("Equiv", path, "side must be 1 or 2")
            return
        c = c1 if side == 1 else c2
        try:
            new = apply_transform(c, node.transform, node.path)
        except TransformError as e:
            self.shape("Equiv", path, f"transform does not apply: {e}")
            return
        self.record("Equiv", path, "transform-shape", OK)
        obs = sorted(A.side_vars(post, side))
        out = A.TupleE(tuple(A.Var(n) for n in obs))
        old_s, live_old = A.slice_dead(c, set(obs))
        new_s, live_new = A.slice_dead(new, set(obs))
        live = live_old | live_new
        keys = _tagged(pre) | _side(live, side)
        seen: set = set()

        def test(m1, m2):
            mem = Memory({n: v for n, v in (m1 if side == 1 else m2).items() if n in live})
            if mem in seen:
                return None
            seen.add(mem)
            d_old = pushforward(interpret(old_s, mem, self.fuel), out)
            d_new = pushforward(interpret(new_s, mem, self.fuel), out)
            if d_old != d_new:
                return (f"outputs differ: {d_old} vs {d_new}", {})
            return None
        self.foreach("Equiv", path, "semantic-equivalence", keys, pre, test)
        args = (new, c2) if side == 1 else (c1, new)
        self.check(node.sub, *args, pre, post, path + ".sub")


def _one_side(dom: DomainDecl, side: int) -> DomainDecl:
    sided = {n: d for (n, t), d in dom.sided.items() if t == side}
    return dom.with_domains(sided)


def audit_proof(j: P.Judgment, proof: P.ProofNode, dom: DomainDecl,
                fuel: int = DEFAULT_FUEL, cap: int = DEFAULT_CAP) -> CheckReport:
    """Check every obligation of ``proof`` and return the full report."""
    ch = _Checker(dom, fuel, cap)
    ch.check(proof, j.c1, j.c2, j.pre, j.post, "proof")
    return ch.report


def check_proof(j: P.Judgment, proof: P.ProofNode, dom: DomainDecl,
                fuel: int = DEFAULT_FUEL, cap: int = DEFAULT_CAP) -> VerifiedJudgment:
    report = audit_proof(j, proof, dom, fuel, cap)
    if report.status != "accepted":
        raise ProofRejected(report)
    return VerifiedJudgment(j, proof, report, dom)
