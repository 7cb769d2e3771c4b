"""Constructed term families used by the benchmarks and the test suite.

All four families live on the exponential fragment:

    pi(k)        (k-1) wildcard derelictions then a named one, all on the
                 same free head:  [f?_] ... [f?_] [f?e] e
    delta(n)     (n-1) promotion cuts of pi(2) stacked around pi(2), every
                 level's head bound one level further out; the outermost
                 head is free
    sigma(n)     delta(n) closed with a doubly boxed identity:
                 [!!\\m m - f] delta(n)
    cut_pi(k,h)  [!pi(k) - f] pi(h), which normalizes (up to garbage) to
                 pi(k*h)

The literal constructions reuse one head name across levels the way the
shadowed definitions are usually written, so delta and sigma are not well
bound; evaluators rename at initialization.  sigma(n) evaluates with
multiplicative rules never firing and the exponential principal count
growing as 2^n, which is what makes it the stress family for copy
discipline and for the bi-linear overhead measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

from .terms import Abs, Bang, Cut, Der, Kind, Term, Var, VarId

_HEAD = VarId(Kind.EXP, 1)          # the shared exponential head
_FINAL = VarId(Kind.EXP, 2)         # the one named dereliction binder
_IDENT_BINDER = VarId(Kind.MULT, 1)


def pi(k: int, head: VarId = _HEAD) -> Term:
    """k derelictions on ``head``; only the innermost binder is used."""
    if k < 1:
        raise ValueError("pi needs k >= 1")
    if head.kind is not Kind.EXP:
        raise ValueError("pi's head must be exponential")
    t: Term = Der(head, _FINAL, Var(_FINAL))
    for i in range(k - 1):
        t = Der(head, VarId(Kind.EXP, 3 + i, wildcard=True), t)
    return t


def delta(n: int) -> Term:
    if n < 1:
        raise ValueError("delta needs n >= 1")
    t = pi(2)
    for _ in range(n - 1):
        t = Cut(Bang(pi(2)), _HEAD, t)
    return t


def identity_box() -> Term:
    """The doubly boxed identity !!\\m m."""
    return Bang(Bang(Abs(_IDENT_BINDER, Var(_IDENT_BINDER))))


def sigma(n: int) -> Term:
    return Cut(identity_box(), _HEAD, delta(n))


def cut_pi(k: int, h: int) -> Term:
    return Cut(Bang(pi(k)), _HEAD, pi(h))


# ---------------------------------------------------------------------------
# Named family specs (CLI / bench surface)


@dataclass(frozen=True)
class FamilySpec:
    """A family name with its parameters, e.g. Sigma(4) or CutPi(3, 4)."""
    name: str
    params: Tuple[int, ...]

    _ARITY = {"Pi": 1, "Delta": 1, "Sigma": 1, "CutPi": 2}
    _BUILD = {"Pi": pi, "Delta": delta, "Sigma": sigma, "CutPi": cut_pi}

    def __post_init__(self):
        arity = self._ARITY.get(self.name)
        if arity is None:
            names = ", ".join(sorted(self._ARITY))
            raise ValueError(f"unknown family {self.name!r} (one of {names})")
        if len(self.params) != arity:
            raise ValueError(
                f"{self.name} takes {arity} parameter(s), got {self.params}")
        if any(p < 1 for p in self.params):
            raise ValueError(f"{self.name} parameters must be >= 1")

    def build(self) -> Term:
        return self._BUILD[self.name](*self.params)

    def __str__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.params))})"

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Parse ``Name:p1[,p2]`` or ``Name(p1[,p2])``."""
        s = text.strip()
        if "(" in s and s.endswith(")"):
            name, _, rest = s[:-1].partition("(")
        else:
            name, _, rest = s.partition(":")
        name = name.strip()
        rest = rest.strip()
        if not rest:
            raise ValueError(
                f"family {text!r} is missing parameters (e.g. Sigma:4)")
        try:
            params = tuple(int(p) for p in rest.split(","))
        except ValueError:
            raise ValueError(
                f"family parameters in {text!r} must be integers") from None
        return cls(name, params)
