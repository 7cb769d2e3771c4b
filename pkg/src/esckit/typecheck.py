"""Simple-type inference for proof terms.

Formulas are built from a single multiplicative atom:

    A, B ::= Xm | A * B | A -o B | !A

Inference assigns one metavariable per variable (binders and free names),
walks the term once to collect equations, and solves them by first-order
unification with an occurs check:

    cut   [v - x] t    type(v) = type(x)
    sub   [m > v, x] t type(m) = type(v) -o type(x)
    der   [e ? x] t    type(e) = !type(x)
    tens  [m @ x, y] t type(m) = type(x) * type(y)
    abs   \\x t         value type = type(x) -o type(body)
    bang  !t           value type = !type(body)
    pair  <t, s>       value type = type(t) * type(s)

Two sort disciplines ride along.  Exponential variables always carry a
``!``-shaped type, installed up front, so a conflicting use surfaces as a
unification failure against that shell.  Multiplicative variables must not
end up with a ``!``-shaped type (the multiplicative axiom's side
condition); solved types are checked eagerly and still-open ones are
reported as residual disequality constraints that any instantiation has to
respect.

Weakening and contraction are implicit: an exponential assumption may be
unused or shared between premises.  Multiplicative variables must occur
exactly once, which is counted directly before unification so misuse gets a
dedicated report instead of a confusing unification error.  The promotion
rule's all-exponential context restriction needs no equation of its own: on
proper input a promotion body has no free multiplicative variables, and
exponential types are ``!``-shaped by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

from .terms import (
    Abs, Bang, Cut, Der, Kind, Pair, Position, Sel, Sub, Term, TensElim,
    Var, VarId, children, free_vars, is_well_bound, mult_free_vars,
    rename_fresh, NameSource,
)


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class AtomM(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Lolli(Formula):
    arg: Formula
    result: Formula


@dataclass(frozen=True, slots=True)
class BangF(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Meta(Formula):
    ident: int


ATOM = AtomM()


def format_formula(f: Formula) -> str:
    """Render with -o right-associative and parentheses everywhere else."""

    def atomic(g: Formula) -> str:
        s = go(g)
        if isinstance(g, (AtomM, Meta, BangF)):
            return s
        return f"({s})"

    def go(g: Formula) -> str:
        if isinstance(g, AtomM):
            return "Xm"
        if isinstance(g, Meta):
            return f"?{g.ident}"
        if isinstance(g, BangF):
            return "!" + atomic(g.body)
        if isinstance(g, Tensor):
            return f"{atomic(g.left)} * {atomic(g.right)}"
        if isinstance(g, Lolli):
            left = go(g.arg)
            if isinstance(g.arg, Lolli):
                left = f"({left})"
            right = go(g.result)
            if isinstance(g.result, Tensor):
                right = f"({right})"
            return f"{left} -o {right}"
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# Results


class FailureKind(Enum):
    UNIFICATION = "unification"
    OCCURS_CHECK = "occurs-check"
    LINEARITY = "linearity"
    BANG_SHAPE = "bang-shape"
    NOT_BANG_CONSTRAINT = "not-bang-constraint"


@dataclass(frozen=True)
class Typed:
    context: Dict[VarId, Formula]
    formula: Formula
    not_bang: frozenset  # Meta idents that must stay non-!

    ok = True


@dataclass(frozen=True)
class Untypable:
    kind: FailureKind
    position: Optional[Position]
    detail: str = ""
    variable: Optional[VarId] = None

    ok = False


class _Clash(Exception):
    def __init__(self, kind: FailureKind, detail: str) -> None:
        super().__init__(detail)
        self.kind = kind
        self.detail = detail


class _Located(Exception):
    def __init__(self, clash: _Clash, path: tuple) -> None:
        super().__init__(str(clash))
        self.clash = clash
        self.path = path


# ---------------------------------------------------------------------------
# Unification


class _Solver:
    def __init__(self) -> None:
        self._next = 0
        self._bind: Dict[int, Formula] = {}

    def fresh(self) -> Meta:
        m = Meta(self._next)
        self._next += 1
        return m

    def resolve(self, f: Formula) -> Formula:
        """Follow metavariable bindings at the root only."""
        while isinstance(f, Meta):
            b = self._bind.get(f.ident)
            if b is None:
                return f
            f = b
        return f

    def _occurs(self, ident: int, f: Formula) -> bool:
        stack = [f]
        while stack:
            g = self.resolve(stack.pop())
            if isinstance(g, Meta):
                if g.ident == ident:
                    return True
            elif isinstance(g, Tensor):
                stack.append(g.left)
                stack.append(g.right)
            elif isinstance(g, Lolli):
                stack.append(g.arg)
                stack.append(g.result)
            elif isinstance(g, BangF):
                stack.append(g.body)
        return False

    def unify(self, a: Formula, b: Formula) -> None:
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = self.resolve(x), self.resolve(y)
            if x is y:
                continue
            if isinstance(x, Meta):
                if self._occurs(x.ident, y):
                    raise _Clash(
                        FailureKind.OCCURS_CHECK,
                        f"?{x.ident} occurs in {format_formula(self.deep(y))}")
                self._bind[x.ident] = y
                continue
            if isinstance(y, Meta):
                stack.append((y, x))
                continue
            if isinstance(x, AtomM) and isinstance(y, AtomM):
                continue
            if isinstance(x, Tensor) and isinstance(y, Tensor):
                stack.append((x.left, y.left))
                stack.append((x.right, y.right))
                continue
            if isinstance(x, Lolli) and isinstance(y, Lolli):
                stack.append((x.arg, y.arg))
                stack.append((x.result, y.result))
                continue
            if isinstance(x, BangF) and isinstance(y, BangF):
                stack.append((x.body, y.body))
                continue
            kind = FailureKind.BANG_SHAPE \
                if isinstance(x, BangF) or isinstance(y, BangF) \
                else FailureKind.UNIFICATION
            raise _Clash(kind,
                         f"{format_formula(self.deep(x))} vs "
                         f"{format_formula(self.deep(y))}")

    def deep(self, f: Formula) -> Formula:
        """Fully substitute bindings; loops are impossible post occurs check."""
        f = self.resolve(f)
        if isinstance(f, Tensor):
            return Tensor(self.deep(f.left), self.deep(f.right))
        if isinstance(f, Lolli):
            return Lolli(self.deep(f.arg), self.deep(f.result))
        if isinstance(f, BangF):
            return BangF(self.deep(f.body))
        return f


# ---------------------------------------------------------------------------
# Occurrence counting (multiplicative linearity)


def _count_mult_occurrences(root: Term) -> Dict[VarId, int]:
    counts: Dict[VarId, int] = {}
    stack = [root]
    while stack:
        t = stack.pop()
        v: Optional[VarId] = None
        if isinstance(t, Var):
            v = t.var
        elif isinstance(t, (Sub, TensElim)):
            v = t.head
        if v is not None and v.kind is Kind.MULT:
            counts[v] = counts.get(v, 0) + 1
        for _, c in children(t):
            stack.append(c)
    return counts


def _mult_vars_mentioned(root: Term):
    """Multiplicative names in order of first appearance, binders included."""
    seen = []
    seen_set = set()

    def note(v: VarId) -> None:
        if v.kind is Kind.MULT and v not in seen_set:
            seen_set.add(v)
            seen.append(v)

    stack = [root]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            note(t.var)
        elif isinstance(t, Abs):
            note(t.binder)
        elif isinstance(t, (Cut, Der)):
            note(t.binder)
        elif isinstance(t, Sub):
            note(t.head)
            note(t.binder)
        elif isinstance(t, TensElim):
            note(t.head)
            note(t.left_binder)
            note(t.right_binder)
        for _, c in children(t):
            stack.append(c)
    return seen


# ---------------------------------------------------------------------------
# Inference


_BODY_SEL = {Cut: Sel.CUT_BODY, Sub: Sel.SUB_BODY, Der: Sel.DER_BODY,
             TensElim: Sel.TENS_BODY}
_VALUE_SEL = {Cut: Sel.CUT_VALUE, Sub: Sel.SUB_VALUE}


def infer_type(t: Term,
               assumptions: Optional[Dict[VarId, Formula]] = None):
    """Infer a typing for ``t``; returns Typed or Untypable.

    ``assumptions`` may pin the types of free variables; anything not
    pinned gets a metavariable (wrapped in ``!`` for exponential names).
    The result context covers exactly the free variables of ``t``.
    Failure positions refer to the well-bound renaming of ``t`` that
    inference works on (``t`` itself when it is already well bound).
    """
    if not is_well_bound(t):
        # Inference is stable under renaming; work on a well-bound copy so
        # per-name bookkeeping is sound.
        t = rename_fresh(t, NameSource.above(t))

    solver = _Solver()
    types: Dict[VarId, Formula] = {}

    def type_of(v: VarId) -> Formula:
        got = types.get(v)
        if got is None:
            got = BangF(solver.fresh()) if v.kind is Kind.EXP \
                else solver.fresh()
            types[v] = got
        return got

    free = free_vars(t)
    if assumptions:
        for v, f in assumptions.items():
            if v.kind is Kind.EXP and not isinstance(f, BangF):
                return Untypable(
                    FailureKind.BANG_SHAPE, None,
                    f"assumption for {v!r} must be a !-formula", v)
            types[v] = f

    # Multiplicative linearity first: exactly one occurrence per name.
    counts = _count_mult_occurrences(t)
    for v in _mult_vars_mentioned(t):
        n = counts.get(v, 0)
        if n != 1:
            how = "never occurs" if n == 0 else f"occurs {n} times"
            return Untypable(FailureKind.LINEARITY, None,
                             f"multiplicative variable {v!r} {how}", v)

    def infer_value(u: Term, path: tuple) -> Formula:
        if isinstance(u, Var):
            return type_of(u.var)
        if isinstance(u, Abs):
            return Lolli(type_of(u.binder),
                         infer_term(u.body, path + (Sel.ABS_BODY,)))
        if isinstance(u, Bang):
            # Promotion types under an all-exponential context: a
            # multiplicative variable crossing the box is a structural
            # error, not a unification one.
            crossing = mult_free_vars(u.body)
            if crossing:
                worst = min(crossing, key=lambda v: (v.index, v.kind.value))
                raise _Located(_Clash(
                    FailureKind.LINEARITY,
                    f"multiplicative variable {worst!r} occurs under !"),
                    path)
            return BangF(infer_term(u.body, path + (Sel.BANG_BODY,)))
        if isinstance(u, Pair):
            return Tensor(infer_term(u.left, path + (Sel.PAIR_LEFT,)),
                          infer_term(u.right, path + (Sel.PAIR_RIGHT,)))
        raise TypeError(f"not a value: {u!r}")

    def infer_term(u: Term, path: tuple) -> Formula:
        spine = []
        while isinstance(u, (Cut, Sub, Der, TensElim)):
            spine.append((u, path))
            path = path + (_BODY_SEL[type(u)],)
            u = u.body
        result = infer_value(u, path)
        for node, where in reversed(spine):
            try:
                if isinstance(node, Cut):
                    vt = infer_value(node.value, where + (Sel.CUT_VALUE,))
                    solver.unify(vt, type_of(node.binder))
                elif isinstance(node, Sub):
                    vt = infer_value(node.value, where + (Sel.SUB_VALUE,))
                    solver.unify(type_of(node.head),
                                 Lolli(vt, type_of(node.binder)))
                elif isinstance(node, Der):
                    solver.unify(type_of(node.head),
                                 BangF(type_of(node.binder)))
                else:
                    solver.unify(type_of(node.head),
                                 Tensor(type_of(node.left_binder),
                                        type_of(node.right_binder)))
            except _Clash as c:
                raise _Located(c, where) from None
        return result

    try:
        result = infer_term(t, ())
    except _Located as located:
        return Untypable(located.clash.kind, Position(t, located.path),
                         located.clash.detail)
    except _Clash as c:
        return Untypable(c.kind, None, c.detail)

    # Multiplicative axiom side condition: no m gets a !-shaped type.
    residual = set()
    for v, f in types.items():
        if v.kind is not Kind.MULT:
            continue
        solved = solver.resolve(f)
        if isinstance(solved, BangF):
            return Untypable(
                FailureKind.NOT_BANG_CONSTRAINT, None,
                f"multiplicative variable {v!r} would have !-type "
                f"{format_formula(solver.deep(solved))}", v)
        if isinstance(solved, Meta):
            residual.add(solved.ident)

    context = {v: solver.deep(types[v]) for v in free}
    return Typed(context, solver.deep(result), frozenset(residual))


def is_typable(t: Term) -> bool:
    return infer_type(t).ok
