"""Exact finite sub-distributions, couplings and the lifting oracle.

All arithmetic is on :class:`fractions.Fraction`; nothing here rounds.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Collection, Iterable, Iterator, Mapping, Optional, Union

from .flow import FlowNetwork
from .values import Value, comparable, fmt_prob, ge, sort_values, to_json, vkey

Prob = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class DistributionError(ValueError):
    pass


class MalformedCoupling(DistributionError):
    pass


class InconsistencyError(AssertionError):
    """Two independent procedures disagreed; one of them is wrong."""


class SubDist(Mapping):
    """A finite-support sub-distribution. Only positive entries are stored."""

    __slots__ = ("_p", "_mass", "_hash")

    def __init__(self, entries: Union[Mapping, Iterable] = (), *, _trusted: bool = False):
        if _trusted:
            self._p = entries
            self._mass = sum(entries.values(), ZERO)
            return
        p: dict = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for v, q in items:
            q = Fraction(q)
            if q < 0:
                raise DistributionError(f"negative probability {q} for {v!r}")
            if q:
                p[v] = p.get(v, ZERO) + q
        self._p = p
        self._mass = sum(p.values(), ZERO)
        if self._mass > 1:
            raise DistributionError(f"mass {self._mass} exceeds 1")

    def __getitem__(self, v) -> Fraction:
        return self._p.get(v, ZERO)

    def __contains__(self, v) -> bool:
        return v in self._p

    def __iter__(self) -> Iterator:
        return iter(self._p)

    def __len__(self) -> int:
        return len(self._p)

    def __eq__(self, other) -> bool:
        if isinstance(other, SubDist):
            return self._p == other._p
        if isinstance(other, Mapping):
            return self._p == {k: Fraction(v) for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            self._hash = hash(frozenset(self._p.items()))
            return self._hash

    @property
    def mass(self) -> Fraction:
        return self._mass

    def support(self) -> list:
        return sort_values(self._p)

    def sorted_items(self) -> list:
        return [(v, self._p[v]) for v in self.support()]

    def map(self, f: Callable[[Value], Value]) -> "SubDist":
        out: dict = {}
        for v, q in self._p.items():
            w = f(v)
            out[w] = out.get(w, ZERO) + q
        return SubDist(out, _trusted=True)

    def prob(self, event: Callable[[Value], bool]) -> Fraction:
        return sum((q for v, q in self._p.items() if event(v)), ZERO)

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{v!r}: {fmt_prob(q)}" for v, q in self.sorted_items()) + "}"

    def to_json(self) -> dict:
        return {"entries": [[to_json(v), fmt_prob(q)] for v, q in self.sorted_items()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


Coupling = SubDist
Relation = Union[Callable[[Value, Value], bool], Collection]


def unit(a: Value) -> SubDist:
    return SubDist({a: ONE}, _trusted=True)


def mlet(mu: SubDist, F: Callable[[Value], SubDist]) -> SubDist:
    out: dict = {}
    for a, p in mu.items():
        for b, q in F(a).items():
            out[b] = out.get(b, ZERO) + p * q
    return SubDist(out, _trusted=True)


def uniform(values: Iterable[Value]) -> SubDist:
    vs = list(values)
    if not vs:
        return SubDist()
    w = Fraction(1, len(vs))
    out: dict = {}
    for v in vs:
        out[v] = out.get(v, ZERO) + w
    return SubDist(out, _trusted=True)


def bernoulli(p) -> SubDist:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise DistributionError(f"Bernoulli parameter {p} outside [0, 1]")
    return SubDist({True: p, False: 1 - p})


def binomial(n: int, p) -> SubDist:
    p = Fraction(p)
    mu = unit(0)
    for _ in range(n):
        mu = mlet(mu, lambda k: SubDist({k + 1: p, k: 1 - p}))
    return mu


def _pair(v) -> tuple:
    if not (isinstance(v, tuple) and len(v) == 2):
        raise MalformedCoupling(f"support value {v!r} is not a pair")
    return v


def marginal1(c: Coupling) -> SubDist:
    out: dict = {}
    for v, q in c.items():
        a, _ = _pair(v)
        out[a] = out.get(a, ZERO) + q
    return SubDist(out, _trusted=True)


def marginal2(c: Coupling) -> SubDist:
    out: dict = {}
    for v, q in c.items():
        _, b = _pair(v)
        out[b] = out.get(b, ZERO) + q
    return SubDist(out, _trusted=True)


def diagonal(mu: SubDist) -> Coupling:
    return SubDist({(a, a): q for a, q in mu.items()}, _trusted=True)


def product(mu1: SubDist, mu2: SubDist) -> Coupling:
    return SubDist({(a, b): p * q for a, p in mu1.items() for b, q in mu2.items()}, _trusted=True)


def in_frechet(c: Coupling, mu1: SubDist, mu2: SubDist) -> bool:
    try:
        return marginal1(c) == mu1 and marginal2(c) == mu2
    except MalformedCoupling:
        return False


def as_predicate(R: Relation) -> Callable[[Value, Value], bool]:
    if callable(R):
        return R
    pairs = frozenset(R)
    return lambda a, b: (a, b) in pairs


def lifting_exists(R: Relation, mu1: SubDist, mu2: SubDist) -> Optional[Coupling]:
    """Return a coupling of ``mu1``/``mu2`` supported in ``R``, or ``None``.

    Feasibility is decided by max-flow on the bipartite support graph:
    source -> a (cap mu1(a)), a -> b when R(a, b), b -> sink (cap mu2(b)).
    """
    if mu1.mass != mu2.mass:
        return None
    rel = as_predicate(R)
    left, right = mu1.support(), mu2.support()
    n1 = len(left)
    s, t = n1 + len(right), n1 + len(right) + 1
    net = FlowNetwork(n1 + len(right) + 2)
    for i, a in enumerate(left):
        net.add_edge(s, i, mu1[a])
    for j, b in enumerate(right):
        net.add_edge(n1 + j, t, mu2[b])
    # middle edges are "unbounded": the total mass is never a binding capacity
    inf = mu1.mass
    handles = []
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            if rel(a, b):
                handles.append(((a, b), net.add_edge(i, n1 + j, inf)))
    if net.max_flow(s, t) != mu1.mass:
        return None
    witness = {}
    for ab, h in handles:
        f = net.flow_on(h)
        if f:
            witness[ab] = f
    return SubDist(witness, _trusted=True)


def tv_distance(mu1: SubDist, mu2: SubDist) -> Fraction:
    keys = set(mu1) | set(mu2)
    return sum((abs(mu1[a] - mu2[a]) for a in keys), ZERO) / 2


def mismatch_probability(c: Coupling) -> Fraction:
    total = ZERO
    for v, q in c.items():
        a, b = _pair(v)
        if a != b:
            total += q
    return total


def upper_tail(mu: SubDist, a: Value) -> Fraction:
    return sum((q for x, q in mu.items() if ge(x, a)), ZERO)


def stochastically_dominates(mu1: SubDist, mu2: SubDist) -> bool:
    """Exact upper-tail test at every support point of either argument."""
    points = list(mu1) + list(mu2)
    if points:
        first = points[0]
        for x in points:
            if not comparable(first, x):
                raise TypeError(f"incomparable values {first!r} and {x!r}")
    return all(upper_tail(mu1, a) >= upper_tail(mu2, a) for a in set(points))


def geq_relation(a: Value, b: Value) -> bool:
    return ge(a, b)


def strassen_check(mu1: SubDist, mu2: SubDist) -> bool:
    """Cross-check the CDF test against the max-flow oracle for R = (>=)."""
    by_cdf = stochastically_dominates(mu1, mu2)
    by_flow = lifting_exists(geq_relation, mu1, mu2) is not None
    if by_cdf != by_flow:
        raise InconsistencyError(
            f"CDF test says {by_cdf} but lifting oracle says {by_flow} for {mu1} vs {mu2}"
        )
    return by_cdf


def subdist_from_json(obj: Mapping, decode=None) -> SubDist:
    from .values import from_json

    decode = decode or from_json
    return SubDist((decode(v), Fraction(q)) for v, q in obj["entries"])


__all__ = [
    "SubDist", "Coupling", "Relation", "Prob", "unit", "mlet", "uniform", "bernoulli",
    "binomial", "marginal1", "marginal2", "diagonal", "product", "in_frechet",
    "lifting_exists", "tv_distance", "mismatch_probability", "stochastically_dominates",
    "strassen_check", "upper_tail", "geq_relation", "DistributionError",
    "MalformedCoupling", "InconsistencyError", "subdist_from_json", "vkey",
]
