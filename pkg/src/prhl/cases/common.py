"""Shared plumbing for the packaged case studies."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from ..lang import types as T
from ..lang.domains import DomainDecl
from ..lang.parser import parse_program
from ..lang.program import Program
from ..logic.checker import CheckReport
from ..values import fmt_prob

DATA = Path(__file__).parent / "data"


class ParamError(ValueError):
    pass


def source(case: str, fname: str = "program.pwhile") -> str:
    return (DATA / case / fname).read_text(encoding="utf-8")


def load_program(case: str, fname: str, functions: T.Functions, enums: Mapping = {},
                 overrides: Mapping = {}) -> Program:
    return parse_program(source(case, fname), functions=functions, enums=enums,
                         overrides=overrides).check()


def fn(name: str, params, result, impl) -> T.Function:
    return T.Function(name, tuple(params) if params is not None else None, result, impl)


def coerce_params(cls, given: Mapping[str, Any]):
    """Build the dataclass ``cls`` from strings or values, converting by field type."""
    names = {f.name: f for f in dataclasses.fields(cls)}
    kw = {}
    for k, v in given.items():
        if k not in names:
            raise ParamError(f"unknown parameter {k!r}; expected one of {sorted(names)}")
        kw[k] = _convert(names[k], v)
    try:
        obj = cls(**kw)
    except TypeError as e:
        raise ParamError(str(e)) from None
    obj.validate()
    return obj


def _convert(f: dataclasses.Field, v):
    t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    if not isinstance(v, str):
        return v
    try:
        if "Fraction" in t:
            return Fraction(v)
        if "tuple" in t:
            return tuple(int(x) for x in v.replace("(", "").replace(")", "").split(",") if x.strip())
        if "int" in t:
            return int(v)
    except ValueError:
        raise ParamError(f"bad value {v!r} for parameter {f.name}") from None
    return v


def params_json(p) -> dict:
    out = {}
    for f in dataclasses.fields(p):
        v = getattr(p, f.name)
        out[f.name] = fmt_prob(v) if isinstance(v, Fraction) else (list(v) if isinstance(v, tuple) else v)
    return out


@dataclass
class CaseReport:
    name: str
    params: dict
    verdicts: dict = field(default_factory=dict)  # label -> status string
    tv: list = field(default_factory=list)
    sd: list = field(default_factory=list)
    facts: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict, repr=False)  # label -> CheckReport

    POSITIVE = {"accepted", "valid", "equivalent", "ok", "lossless", True}

    @property
    def ok(self) -> bool:
        return (all(v in self.POSITIVE for v in self.verdicts.values())
                and all(r.holds for r in self.tv) and all(r.holds for r in self.sd))

    @property
    def indeterminate(self) -> bool:
        return any(v == "indeterminate" for v in self.verdicts.values())

    def to_json(self) -> dict:
        return {"schema": "prhl-case/1", "case": self.name, "params": self.params,
                "verdicts": dict(sorted(self.verdicts.items())),
                "tv": [r.to_json() for r in self.tv], "sd": [r.to_json() for r in self.sd],
                "facts": self.facts, "ok": self.ok}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def semantic_status(rep) -> str:
    return {True: "valid", False: "invalid", None: "indeterminate"}[rep.valid]


def domains_json(dom: DomainDecl) -> dict:
    return dom.to_json()


def check_status(rep: CheckReport) -> str:
    return rep.status
