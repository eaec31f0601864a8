"""Packaged case studies, addressed by name."""
from __future__ import annotations

import json
from types import ModuleType
from typing import Mapping

from . import balls_bins, biased_coins, birth_death, random_walk, torus
from ..logic.proof import script_to_json
from .common import CaseReport, ParamError, coerce_params, params_json

CASES: dict[str, ModuleType] = {m.NAME: m for m in (random_walk, torus, biased_coins, balls_bins, birth_death)}


def get_case(name: str) -> ModuleType:
    try:
        return CASES[name]
    except KeyError:
        raise ParamError(f"unknown case study {name!r}; known: {', '.join(sorted(CASES))}") from None


def run_case_study(name: str, params: Mapping = {}, fuel: int = 64, cap: int | None = None) -> CaseReport:
    return get_case(name).run(dict(params), fuel=fuel, cap=cap)


def case_params(name: str, params: Mapping = {}):
    m = get_case(name)
    return coerce_params(m.Params, params)


# which corpus entry each shipped proof file holds, and the programs it relates
SCRIPTS: dict[str, dict[str, tuple[str, str, str]]] = {
    "random-walk": {"proof.json": ("walk", "program.pwhile", "program.pwhile")},
    "torus": {"proof.json": ("walk", "program.pwhile", "program.pwhile")},
    "biased-coins": {"proof.json": ("c1~c2", "c1.pwhile", "c2.pwhile"),
                     "proof-cstar.json": ("c1~cstar", "c1.pwhile", "cstar.pwhile")},
    "balls-bins": {"proof.json": ("c~c", "program.pwhile", "program.pwhile")},
    "birth-death": {"proof.json": ("chain", "program.pwhile", "program.pwhile")},
}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def case_files(name: str) -> dict[str, str]:
    """Contents of the generated data files of a case at its default parameters."""
    m = get_case(name)
    p = m.Params()
    p.validate()
    entries = {label: (j, proof, dom) for label, j, proof, dom in m.corpus(p)}
    out = {}
    dom = None
    for fname, (label, f1, f2) in SCRIPTS[name].items():
        j, proof, dom = entries[label]
        lib = {"case": name, "params": params_json(p), "programs": [f1, f2]}
        out[fname] = _dump(script_to_json(j.pre, j.post, proof, lib))
    out["domains.json"] = _dump(dom.to_json())
    out["expected.json"] = m.run(p).dumps() + "\n"
    return out
