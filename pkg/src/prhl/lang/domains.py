"""Finite enumeration domains for program variables.

A :class:`DomainDecl` maps each variable (optionally per side ``#1``/``#2``)
to a finite, deterministically ordered set of values. This is what makes
side conditions and semantic validity decidable by enumeration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping, Optional

from ..values import PList, from_json, sort_values, to_json
from . import types as T


class DomainError(Exception):
    pass


class Domain:
    __slots__ = ()

    def values(self) -> list:
        raise NotImplementedError

    def __contains__(self, v) -> bool:
        return v in self._members()

    def _members(self) -> frozenset:
        cache = _member_cache.get(self)
        if cache is None:
            cache = frozenset(self.values())
            _member_cache[self] = cache
        return cache

    def size(self) -> int:
        return len(self.values())


_member_cache: dict = {}
_values_cache: dict = {}


@dataclass(frozen=True)
class Range(Domain):
    lo: int
    hi: int

    def values(self) -> list:
        return list(range(self.lo, self.hi + 1))

    def __contains__(self, v) -> bool:
        return (isinstance(v, int) and not isinstance(v, bool) or
                isinstance(v, Fraction) and v.denominator == 1) and self.lo <= v <= self.hi

    def size(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def to_json(self):
        return {"range": [self.lo, self.hi]}


@dataclass(frozen=True)
class Bools(Domain):
    def values(self) -> list:
        return [False, True]

    def __contains__(self, v) -> bool:
        return isinstance(v, bool)

    def size(self) -> int:
        return 2

    def to_json(self):
        return "bool"


@dataclass(frozen=True)
class Values(Domain):
    items: tuple

    def values(self) -> list:
        return sort_values(set(self.items))

    def to_json(self):
        return {"values": [to_json(v) for v in self.values()]}


@dataclass(frozen=True)
class Enum(Domain):
    type: T.EnumT

    def values(self) -> list:
        return self.type.syms()

    def to_json(self):
        return {"enum": self.type.name, "constants": list(self.type.constants)}


@dataclass(frozen=True)
class Lists(Domain):
    elem: Domain
    max_len: int
    min_len: int = 0

    def values(self) -> list:
        out = _values_cache.get(self)
        if out is None:
            ev = self.elem.values()
            out = [PList(t) for n in range(self.min_len, self.max_len + 1)
                   for t in itertools.product(ev, repeat=n)]
            _values_cache[self] = out
        return out

    def __contains__(self, v) -> bool:
        return (isinstance(v, PList) and self.min_len <= len(v) <= self.max_len
                and all(x in self.elem for x in v))

    def size(self) -> int:
        k = self.elem.size()
        return sum(k ** n for n in range(self.min_len, self.max_len + 1))

    def to_json(self):
        d = {"list": self.elem.to_json(), "max_len": self.max_len}
        if self.min_len:
            d["min_len"] = self.min_len
        return d


@dataclass(frozen=True)
class Tuples(Domain):
    items: tuple

    def values(self) -> list:
        out = _values_cache.get(self)
        if out is None:
            out = [tuple(t) for t in itertools.product(*(d.values() for d in self.items))]
            _values_cache[self] = out
        return out

    def __contains__(self, v) -> bool:
        return (isinstance(v, tuple) and not isinstance(v, PList) and len(v) == len(self.items)
                and all(x in d for x, d in zip(v, self.items)))

    def size(self) -> int:
        n = 1
        for d in self.items:
            n *= d.size()
        return n

    def to_json(self):
        return {"tuple": [d.to_json() for d in self.items]}


def default_domain(t: T.Type) -> Optional[Domain]:
    """The domain implied by a finite type, or ``None`` for infinite types."""
    if isinstance(t, T.BoolT):
        return Bools()
    if isinstance(t, T.EnumT):
        return Enum(t)
    if isinstance(t, T.TupleT):
        parts = [default_domain(x) for x in t.items]
        if any(p is None for p in parts):
            return None
        return Tuples(tuple(parts))
    return None


def domain_from_json(obj: Any, enums: Mapping[str, T.EnumT] = {}) -> Domain:
    if obj == "bool":
        return Bools()
    if isinstance(obj, str) and obj in enums:
        return Enum(enums[obj])
    if isinstance(obj, dict):
        if "range" in obj:
            lo, hi = obj["range"]
            return Range(int(lo), int(hi))
        if "values" in obj:
            syms = {c.name: c for e in enums.values() for c in e.syms()}
            return Values(tuple(from_json(v, syms) for v in obj["values"]))
        if "enum" in obj:
            name = obj["enum"]
            if name in enums:
                return Enum(enums[name])
            return Enum(T.EnumT(name, tuple(obj["constants"])))
        if "list" in obj:
            return Lists(domain_from_json(obj["list"], enums), int(obj["max_len"]),
                         int(obj.get("min_len", 0)))
        if "tuple" in obj:
            return Tuples(tuple(domain_from_json(x, enums) for x in obj["tuple"]))
        if "vec" in obj:
            n = int(obj["vec"])
            return Tuples((domain_from_json(obj["of"], enums),) * n)
    raise DomainError(f"cannot read domain {obj!r}")


@dataclass(frozen=True)
class DomainDecl:
    """Per-variable enumeration domains.

    ``domains`` apply to both sides; ``sided`` keys like ``("start", 1)`` override
    them for one side. Variables without an entry fall back on their declared
    type when that type is finite.
    """

    domains: Mapping[str, Domain] = field(default_factory=dict)
    sided: Mapping[tuple, Domain] = field(default_factory=dict)
    types: Mapping[str, T.Type] = field(default_factory=dict)

    def domain(self, name: str, tag: Optional[int] = None) -> Domain:
        if tag is not None and (name, tag) in self.sided:
            return self.sided[(name, tag)]
        if name in self.domains:
            return self.domains[name]
        t = self.types.get(name)
        d = default_domain(t) if t is not None else None
        if d is None:
            where = name if tag is None else f"{name}#{tag}"
            raise DomainError(f"no finite domain declared for {where}")
        return d

    def with_types(self, types: Mapping[str, T.Type]) -> "DomainDecl":
        merged = dict(self.types)
        merged.update(types)
        return DomainDecl(self.domains, self.sided, merged)

    def with_domains(self, domains: Mapping[str, Domain] = {},
                     sided: Mapping[tuple, Domain] = {}) -> "DomainDecl":
        d = dict(self.domains)
        d.update(domains)
        s = dict(self.sided)
        s.update(sided)
        return DomainDecl(d, s, self.types)

    def memories(self, names, tag: Optional[int] = None) -> Iterator[dict]:
        """All memories over ``names`` in deterministic order."""
        names = sorted(names)
        doms = [self.domain(n, tag).values() for n in names]
        for combo in itertools.product(*doms):
            yield dict(zip(names, combo))

    def count(self, names, tag: Optional[int] = None) -> int:
        n = 1
        for name in names:
            n *= self.domain(name, tag).size()
        return n

    def to_json(self) -> dict:
        out: dict = {"schema": "prhl-domains/1"}
        for n in sorted(self.domains):
            out[n] = self.domains[n].to_json()
        for (n, t) in sorted(self.sided):
            out[f"{n}#{t}"] = self.sided[(n, t)].to_json()
        return out

    @classmethod
    def from_json(cls, obj: Mapping, types: Mapping[str, T.Type] = {},
                  enums: Mapping[str, T.EnumT] = {}) -> "DomainDecl":
        domains, sided = {}, {}
        for key, val in obj.items():
            if key == "schema" or key.startswith("_"):
                continue
            d = domain_from_json(val, enums)
            if "#" in key:
                n, t = key.split("#")
                sided[(n, int(t))] = d
            else:
                domains[key] = d
        return cls(domains, sided, dict(types))
