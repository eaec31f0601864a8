"""Runtime values of the language and their total order.

Values are plain Python objects so they can key dicts directly:

* ``bool`` and ``int``/``Fraction`` (numbers share one tag, compared numerically)
* :class:`Sym` for enum constants such as ``Left``
* ``tuple`` for tuples and fixed-size vectors
* :class:`PList` for finite lists
* :class:`Memory` for program memories
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping


@dataclass(frozen=True)
class Sym:
    """An enum constant; ``rank`` fixes its position in the enum's order."""

    enum: str
    name: str
    rank: int

    def __repr__(self) -> str:
        return self.name


class PList(tuple):
    """An immutable list value. Element 0 is the head."""

    def __repr__(self) -> str:
        return "[" + ", ".join(map(repr, self)) + "]"


class Memory(dict):
    """Hashable, read-only map from variable names to values."""

    __slots__ = ("_hash",)

    def __hash__(self) -> int:  # type: ignore[override]
        try:
            return self._hash
        except AttributeError:
            self._hash = hash(frozenset(self.items()))
            return self._hash

    def __setitem__(self, key, value):
        raise TypeError("Memory is immutable; use .set()")

    def __delitem__(self, key):
        raise TypeError("Memory is immutable")

    def set(self, name: str, value: Any) -> "Memory":
        m = Memory(self)
        dict.__setitem__(m, name, value)
        return m

    def project(self, names: Iterable[str]) -> "Memory":
        return Memory({n: self[n] for n in names if n in self})

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}: {self[k]!r}" for k in sorted(self)) + "}"


Value = Any

_BOOL, _NUM, _SYM, _TUPLE, _LIST, _MEM = range(6)


def kind(v: Value) -> int:
    if isinstance(v, bool):
        return _BOOL
    if isinstance(v, (int, Fraction)):
        return _NUM
    if isinstance(v, Sym):
        return _SYM
    if isinstance(v, PList):
        return _LIST
    if isinstance(v, tuple):
        return _TUPLE
    if isinstance(v, Memory):
        return _MEM
    raise TypeError(f"not a value: {v!r}")


def vkey(v: Value):
    """Sort key realising the total order: tag first, then payload."""
    k = kind(v)
    if k == _BOOL:
        return (k, int(v))
    if k == _NUM:
        return (k, v)
    if k == _SYM:
        return (k, v.enum, v.rank)
    if k == _TUPLE or k == _LIST:
        return (k, tuple(vkey(x) for x in v))
    return (k, tuple((n, vkey(v[n])) for n in sorted(v)))


def comparable(a: Value, b: Value) -> bool:
    """True when ``a`` and ``b`` live in the same ordered carrier."""
    ka, kb = kind(a), kind(b)
    if ka != kb:
        return False
    if ka == _SYM:
        return a.enum == b.enum
    if ka in (_TUPLE, _LIST):
        if ka == _TUPLE and len(a) != len(b):
            return False
        return all(comparable(x, y) for x, y in zip(a, b))
    return True


def ge(a: Value, b: Value) -> bool:
    if not comparable(a, b):
        raise TypeError(f"incomparable values {a!r} and {b!r}")
    return vkey(a) >= vkey(b)


def sort_values(vs: Iterable[Value]) -> list:
    return sorted(vs, key=vkey)


def fmt_prob(p: Fraction) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def parse_prob(s: str | int) -> Fraction:
    return Fraction(s)


# JSON encoding -------------------------------------------------------------

def to_json(v: Value) -> Any:
    k = kind(v)
    if k == _BOOL:
        return v
    if k == _NUM:
        if isinstance(v, Fraction) and v.denominator != 1:
            return fmt_prob(v)
        return int(v)
    if k == _SYM:
        return v.name
    if k == _TUPLE:
        return [to_json(x) for x in v]
    if k == _LIST:
        return {"list": [to_json(x) for x in v]}
    return {n: to_json(v[n]) for n in sorted(v)}


def from_json(obj: Any, enums: Mapping[str, Sym] | None = None) -> Value:
    """Inverse of :func:`to_json` (untyped: strings are enum names or rationals)."""
    enums = enums or {}
    if isinstance(obj, bool) or isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        if obj in enums:
            return enums[obj]
        return Fraction(obj)
    if isinstance(obj, list):
        return tuple(from_json(x, enums) for x in obj)
    if isinstance(obj, dict):
        if set(obj) == {"list"}:
            return PList(from_json(x, enums) for x in obj["list"])
        return Memory({n: from_json(x, enums) for n, x in obj.items()})
    raise TypeError(f"cannot decode {obj!r}")
