"""A parsed pWhile program: declarations plus a command body."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import ast as A
from . import types as T
from .domains import Domain, DomainDecl


@dataclass(frozen=True)
class Program:
    body: A.Command
    types: Mapping[str, T.Type] = field(default_factory=dict)
    enums: Mapping[str, T.EnumT] = field(default_factory=dict)
    domains: Mapping[str, Domain] = field(default_factory=dict)
    returns: tuple = ()
    functions: Mapping[str, T.Function] = field(default_factory=T.Functions, compare=False)
    source: Optional[str] = field(default=None, compare=False, repr=False)

    def typecheck(self) -> list[str]:
        """Static errors, empty when the program is well typed."""
        chk = T.Checker(self.types, self.functions)
        chk.command(self.body)
        for e in self.returns:
            chk.typeof(e)
        for name in A.command_vars(self.body):
            if name not in self.types:
                msg = f"undeclared variable {name}"
                if not any(e.startswith(msg + " ") or e == msg for e in chk.errors):
                    chk.errors.append(msg)
        return chk.errors

    def check(self) -> "Program":
        errors = self.typecheck()
        if errors:
            raise T.TypeCheckError(errors)
        return self

    def domain_decl(self, extra: Optional[DomainDecl] = None) -> DomainDecl:
        """In-file domains, overridden by ``extra``, with types as fallback."""
        base = DomainDecl(dict(self.domains), {}, dict(self.types))
        if extra is None:
            return base
        return base.with_domains(extra.domains, extra.sided).with_types(extra.types)

    @property
    def output(self) -> A.Expr:
        if len(self.returns) == 1:
            return self.returns[0]
        return A.TupleE(tuple(self.returns))

    @property
    def inputs(self) -> set[str]:
        """Variables the program reads before writing (including the return)."""
        return A.live_in(self.body, A.expr_vars(self.output))
