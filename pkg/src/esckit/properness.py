"""Properness: the well-formedness discipline for proof terms.

A proper term uses every multiplicative variable linearly and keeps
promotion bodies free of multiplicative variables.  The definition is a
structural induction with a side condition per constructor:

* variables are proper;
* ``λx.t`` needs ``x ∈ mfv(t)`` when ``x`` is multiplicative;
* ``[m ▷ v, x] t`` needs ``mfv(v) ∩ (mfv(t) \\ {x}) = ∅``, ``m ∉ mfv(t)``,
  and ``x ∈ mfv(t)`` when ``x`` is multiplicative;
* ``!t`` needs ``mfv(t) = ∅``;
* ``[e ? x] t`` needs ``x ∈ mfv(t)`` when ``x`` is multiplicative;
* ``[v − x] t`` needs ``mfv(v) ∩ (mfv(t) \\ {x}) = ∅`` and ``x ∈ mfv(t)``
  when ``x`` is multiplicative.

The tensor constructors have no stated clauses anywhere; the ones used here
are the natural analogies: pair components keep disjoint multiplicative
support, and tensor eliminations behave like subtractions (head consumed,
both binders subject to the multiplicative-use condition).

Together the clauses imply that every multiplicative variable, free or
bound, has exactly one occurrence, which is what the type system's context
splitting demands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import (
    Abs, Bang, Cut, Der, Kind, Pair, Position, Sub, Term, TensElim, Var,
    children,
)


@dataclass(frozen=True)
class ProperResult:
    ok: bool
    position: Optional[Position] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _mfv_table(root: Term) -> dict:
    """Multiplicative free variables for every subterm, keyed by object id.

    Computed in one iterative post-order pass; shared subobjects are
    computed once, which is harmless since the sets only depend on the
    subterm itself.
    """
    table: dict = {}
    stack = [(root, False)]
    while stack:
        t, expanded = stack.pop()
        if id(t) in table:
            continue
        if not expanded:
            stack.append((t, True))
            for _, c in children(t):
                stack.append((c, False))
            continue
        if isinstance(t, Var):
            s = frozenset({t.var}) if t.var.kind is Kind.MULT else frozenset()
        elif isinstance(t, Abs):
            s = table[id(t.body)] - {t.binder}
        elif isinstance(t, Bang):
            s = table[id(t.body)]
        elif isinstance(t, Pair):
            s = table[id(t.left)] | table[id(t.right)]
        elif isinstance(t, Cut):
            s = table[id(t.value)] | (table[id(t.body)] - {t.binder})
        elif isinstance(t, Sub):
            s = frozenset({t.head}) | table[id(t.value)] \
                | (table[id(t.body)] - {t.binder})
        elif isinstance(t, Der):
            s = table[id(t.body)] - {t.binder}
        elif isinstance(t, TensElim):
            s = frozenset({t.head}) \
                | (table[id(t.body)] - {t.left_binder, t.right_binder})
        else:
            raise TypeError(f"not a term: {t!r}")
        table[id(t)] = s
    return table


def _violation(t: Term, mfv: dict) -> Optional[str]:
    """The local side condition broken at this node, if any."""

    def needs_use(binder) -> Optional[str]:
        if binder.kind is Kind.MULT and binder not in mfv[id(t.body)]:
            return f"multiplicative binder {binder!r} unused in the body"
        return None

    if isinstance(t, Abs):
        return needs_use(t.binder)
    if isinstance(t, Bang):
        body_mfv = mfv[id(t.body)]
        if body_mfv:
            inside = ", ".join(sorted(repr(v) for v in body_mfv))
            return f"promotion body has free multiplicative variables: {inside}"
        return None
    if isinstance(t, Der):
        return needs_use(t.binder)
    if isinstance(t, Cut):
        overlap = mfv[id(t.value)] & (mfv[id(t.body)] - {t.binder})
        if overlap:
            shared = ", ".join(sorted(repr(v) for v in overlap))
            return f"cut value and body share multiplicative variables: {shared}"
        return needs_use(t.binder)
    if isinstance(t, Sub):
        body_mfv = mfv[id(t.body)]
        if t.head in body_mfv:
            return f"subtraction head {t.head!r} reoccurs in the body"
        overlap = mfv[id(t.value)] & (body_mfv - {t.binder})
        if overlap:
            shared = ", ".join(sorted(repr(v) for v in overlap))
            return ("subtraction argument and body share multiplicative "
                    f"variables: {shared}")
        return needs_use(t.binder)
    if isinstance(t, Pair):
        overlap = mfv[id(t.left)] & mfv[id(t.right)]
        if overlap:
            shared = ", ".join(sorted(repr(v) for v in overlap))
            return f"pair components share multiplicative variables: {shared}"
        return None
    if isinstance(t, TensElim):
        body_mfv = mfv[id(t.body)]
        if t.head in body_mfv:
            return f"tensor elimination head {t.head!r} reoccurs in the body"
        if t.left_binder == t.right_binder:
            return "tensor elimination binds the same variable twice"
        for b in (t.left_binder, t.right_binder):
            if b.kind is Kind.MULT and b not in body_mfv:
                return f"multiplicative binder {b!r} unused in the body"
        return None
    return None  # Var


def check_proper(root: Term) -> ProperResult:
    """Check all clauses; on failure report the first position, in preorder,
    whose own side condition is broken (never a mere ancestor of one)."""
    mfv = _mfv_table(root)
    stack = [((), root)]
    while stack:
        path, t = stack.pop()
        reason = _violation(t, mfv)
        if reason is not None:
            return ProperResult(False, Position(root, path), reason)
        for sel, c in reversed(children(t)):
            stack.append((path + (sel,), c))
    return ProperResult(True)


def is_proper(t: Term) -> bool:
    return check_proper(t).ok
