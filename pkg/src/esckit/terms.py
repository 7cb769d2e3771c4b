"""Proof terms with explicit cuts for a multiplicative-exponential linear calculus.

Terms come in two sorted flavours of variable: multiplicative variables
(written m0, m1, ...) are linear, they must be used exactly once, while
exponential variables (e0, e1, ...) may be copied and erased.  The grammar
keeps cuts and subtractions *split*: their left-hand side is always a value
(a variable, an abstraction, a promotion, or under the tensor extension a
pair), never a compound term.  Every term therefore decomposes uniquely as a
chain of binding constructors around a final value; see :func:`split`.

The binding constructors are:

* ``Cut(value, binder, body)``      printed  [v - x] t
* ``Sub(head, value, binder, body)``printed  [m > v, x] t   (subtraction)
* ``Der(head, binder, body)``       printed  [e ? x] t      (dereliction)
* ``TensElim(head, x, y, body)``    printed  [m @ x, y] t   (tensor feature)

Values are ``Var``, ``Abs`` (multiplicative), ``Bang`` (exponential) and
``Pair`` (multiplicative, tensor feature).

Nothing in this module rewrites anything.  It supplies the structural
toolkit the rewriting oracle and the machines are built on: positions and
paths, splitting and plugging, free variables, clash detection, out cuts,
garbage collection and alpha handling.  Terms are immutable; operations
return new trees and share unchanged branches.

Terms routinely nest thousands of constructors deep along binder chains, so
every traversal here iterates over those chains and recurses only through
value bodies, which stay shallow in practice.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Iterator, Optional, Union

# Binder chains are iterative everywhere below, but value bodies still
# recurse; give pathological inputs room before the interpreter gives up.
if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)


class Kind(Enum):
    """Variable sort: multiplicative (linear) or exponential (copyable)."""

    MULT = "m"
    EXP = "e"

    def __repr__(self) -> str:
        return f"Kind.{self.name}"


@dataclass(frozen=True, slots=True)
class VarId:
    """A variable identity: sort plus display index.

    ``wildcard`` marks exponential binders written ``_`` in the concrete
    syntax; they are guaranteed occurrence-free and keep a unique index so
    that identity stays a plain field comparison.
    """

    kind: Kind
    index: int
    wildcard: bool = False

    def __repr__(self) -> str:
        if self.wildcard:
            return f"_{self.index}"
        return f"{self.kind.value}{self.index}"


class Term:
    """Base class for all term constructors."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    var: VarId


@dataclass(frozen=True, slots=True)
class Abs(Term):
    binder: VarId
    body: Term


@dataclass(frozen=True, slots=True)
class Bang(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Pair(Term):
    """Multiplicative pair value; components are full terms. Tensor feature."""

    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Cut(Term):
    value: Term
    binder: VarId
    body: Term

    def __post_init__(self) -> None:
        if not is_value(self.value):
            raise ValueError("cut left-hand side must be a value")


@dataclass(frozen=True, slots=True)
class Sub(Term):
    head: VarId
    value: Term
    binder: VarId
    body: Term

    def __post_init__(self) -> None:
        if self.head.kind is not Kind.MULT:
            raise ValueError("subtraction head must be multiplicative")
        if not is_value(self.value):
            raise ValueError("subtraction argument must be a value")


@dataclass(frozen=True, slots=True)
class Der(Term):
    head: VarId
    binder: VarId
    body: Term

    def __post_init__(self) -> None:
        if self.head.kind is not Kind.EXP:
            raise ValueError("dereliction head must be exponential")


@dataclass(frozen=True, slots=True)
class TensElim(Term):
    """Tensor elimination [m @ x, y] t. Tensor feature."""

    head: VarId
    left_binder: VarId
    right_binder: VarId
    body: Term

    def __post_init__(self) -> None:
        if self.head.kind is not Kind.MULT:
            raise ValueError("tensor elimination head must be multiplicative")


VALUE_TYPES = (Var, Abs, Bang, Pair)
BINDING_TYPES = (Cut, Sub, Der, TensElim)


def is_value(t: Term) -> bool:
    return isinstance(t, VALUE_TYPES)


def value_kind(v: Term) -> Kind:
    """Sort of a value: Var carries its own, Abs and Pair are multiplicative,
    Bang is exponential."""
    if isinstance(v, Var):
        return v.var.kind
    if isinstance(v, (Abs, Pair)):
        return Kind.MULT
    if isinstance(v, Bang):
        return Kind.EXP
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------------------
# Positions and paths


class Sel(IntEnum):
    """Child selectors, in leftmost traversal order per constructor."""

    CUT_VALUE = 0
    CUT_BODY = 1
    SUB_VALUE = 2
    SUB_BODY = 3
    DER_BODY = 4
    ABS_BODY = 5
    BANG_BODY = 6
    PAIR_LEFT = 7
    PAIR_RIGHT = 8
    TENS_BODY = 9


Path = tuple  # tuple[Sel, ...]

# Selectors a left context may pass through: the spine of binding
# constructors above the final value of a term.
LEFT_SELS = frozenset({Sel.CUT_BODY, Sel.SUB_BODY, Sel.DER_BODY, Sel.TENS_BODY})


def children(t: Term) -> tuple:
    """(selector, child) pairs in leftmost order."""
    if isinstance(t, Cut):
        return ((Sel.CUT_VALUE, t.value), (Sel.CUT_BODY, t.body))
    if isinstance(t, Sub):
        return ((Sel.SUB_VALUE, t.value), (Sel.SUB_BODY, t.body))
    if isinstance(t, Der):
        return ((Sel.DER_BODY, t.body),)
    if isinstance(t, Abs):
        return ((Sel.ABS_BODY, t.body),)
    if isinstance(t, Bang):
        return ((Sel.BANG_BODY, t.body),)
    if isinstance(t, Pair):
        return ((Sel.PAIR_LEFT, t.left), (Sel.PAIR_RIGHT, t.right))
    if isinstance(t, TensElim):
        return ((Sel.TENS_BODY, t.body),)
    return ()


def child(t: Term, sel: Sel) -> Term:
    if sel is Sel.CUT_VALUE:
        return t.value
    if sel is Sel.CUT_BODY or sel is Sel.SUB_BODY or sel is Sel.DER_BODY \
            or sel is Sel.TENS_BODY:
        return t.body
    if sel is Sel.SUB_VALUE:
        return t.value
    if sel is Sel.ABS_BODY or sel is Sel.BANG_BODY:
        return t.body
    if sel is Sel.PAIR_LEFT:
        return t.left
    if sel is Sel.PAIR_RIGHT:
        return t.right
    raise ValueError(sel)


def with_child(t: Term, sel: Sel, c: Term) -> Term:
    if sel is Sel.CUT_VALUE or sel is Sel.SUB_VALUE:
        return replace(t, value=c)
    if sel in (Sel.CUT_BODY, Sel.SUB_BODY, Sel.DER_BODY, Sel.TENS_BODY,
               Sel.ABS_BODY, Sel.BANG_BODY):
        return replace(t, body=c)
    if sel is Sel.PAIR_LEFT:
        return replace(t, left=c)
    if sel is Sel.PAIR_RIGHT:
        return replace(t, right=c)
    raise ValueError(sel)


@dataclass(frozen=True)
class Position:
    """A subterm position: the root it lives in plus the selector path."""

    root: Term
    path: Path

    @property
    def subterm(self) -> Term:
        return subterm_at(self.root, self.path)


def subterm_at(root: Term, path: Path) -> Term:
    t = root
    for sel in path:
        t = child(t, sel)
    return t


def replace_at(root: Term, path: Path, new: Term) -> Term:
    """Rebuild ``root`` with the subterm at ``path`` swapped for ``new``."""
    frames = []
    t = root
    for sel in path:
        frames.append((t, sel))
        t = child(t, sel)
    for node, sel in reversed(frames):
        new = with_child(node, sel, new)
    return new


def binder_at(t: Term, sel: Sel):
    """Binders whose scope is the child reached through ``sel``, if any."""
    if sel is Sel.CUT_BODY or sel is Sel.SUB_BODY or sel is Sel.DER_BODY:
        return (t.binder,)
    if sel is Sel.ABS_BODY:
        return (t.binder,)
    if sel is Sel.TENS_BODY:
        return (t.left_binder, t.right_binder)
    return ()


# ---------------------------------------------------------------------------
# Splitting and plugging


def split(t: Term):
    """Unique decomposition of a term into its binder chain and final value.

    Returns ``(frames, value)`` where ``frames`` is the outermost-first list
    of binding constructors (with stale bodies, see :func:`plug_spine`).
    """
    frames = []
    while isinstance(t, BINDING_TYPES):
        frames.append(t)
        t = t.body
    return frames, t


def plug_spine(frames, core: Term) -> Term:
    """Rebuild a binder chain around ``core``. Inverse of :func:`split`."""
    for f in reversed(frames):
        core = replace(f, body=core)
    return core


# ---------------------------------------------------------------------------
# Size and variables


def size(t: Term) -> int:
    """Number of constructors, counting variable occurrences but not the
    variables carried inside binding constructors."""
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        for _, c in children(u):
            stack.append(c)
    return n


def free_vars(t: Term) -> frozenset:
    """All variables with a free occurrence in ``t`` (occurrences are value
    positions and the heads of subtractions, derelictions and tensor
    eliminations)."""
    free = set()
    bound: Counter = Counter()
    # op codes: ('t', term) visit, ('u', var) leave scope
    ops = [("t", t)]

    def occ(v: VarId) -> None:
        if bound[v] == 0:
            free.add(v)

    while ops:
        op, arg = ops.pop()
        if op == "u":
            bound[arg] -= 1
            continue
        u = arg
        if isinstance(u, Var):
            occ(u.var)
        elif isinstance(u, Abs):
            bound[u.binder] += 1
            ops.append(("u", u.binder))
            ops.append(("t", u.body))
        elif isinstance(u, Bang):
            ops.append(("t", u.body))
        elif isinstance(u, Pair):
            ops.append(("t", u.right))
            ops.append(("t", u.left))
        elif isinstance(u, Cut):
            # The value sits outside the binder scope.
            ops.append(("t", u.value))
            bound[u.binder] += 1
            ops.append(("u", u.binder))
            ops.append(("t", u.body))
        elif isinstance(u, Sub):
            occ(u.head)
            ops.append(("t", u.value))
            bound[u.binder] += 1
            ops.append(("u", u.binder))
            ops.append(("t", u.body))
        elif isinstance(u, Der):
            occ(u.head)
            bound[u.binder] += 1
            ops.append(("u", u.binder))
            ops.append(("t", u.body))
        elif isinstance(u, TensElim):
            occ(u.head)
            bound[u.left_binder] += 1
            bound[u.right_binder] += 1
            ops.append(("u", u.left_binder))
            ops.append(("u", u.right_binder))
            ops.append(("t", u.body))
        else:
            raise TypeError(f"not a term: {u!r}")
    return frozenset(free)


def mult_free_vars(t: Term) -> frozenset:
    return frozenset(v for v in free_vars(t) if v.kind is Kind.MULT)


def all_var_ids(t: Term) -> Iterator[VarId]:
    """Every variable mentioned anywhere: binders, heads and occurrences."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            yield u.var
        elif isinstance(u, Abs):
            yield u.binder
        elif isinstance(u, Cut):
            yield u.binder
        elif isinstance(u, Sub):
            yield u.head
            yield u.binder
        elif isinstance(u, Der):
            yield u.head
            yield u.binder
        elif isinstance(u, TensElim):
            yield u.head
            yield u.left_binder
            yield u.right_binder
        for _, c in children(u):
            stack.append(c)


def max_index(t: Term) -> int:
    """Largest display index in the term, -1 if there are none."""
    best = -1
    for v in all_var_ids(t):
        if v.index > best:
            best = v.index
    return best


class NameSource:
    """Monotone fresh-name supply. One counter serves both variable sorts so
    renamed copies never collide with anything already seen."""

    __slots__ = ("_next",)

    def __init__(self, start: int = 0) -> None:
        self._next = start

    @classmethod
    def above(cls, *terms: Term) -> "NameSource":
        best = -1
        for t in terms:
            m = max_index(t)
            if m > best:
                best = m
        return cls(best + 1)

    def fresh(self, kind: Kind, wildcard: bool = False) -> VarId:
        v = VarId(kind, self._next, wildcard)
        self._next += 1
        return v

    def peek(self) -> int:
        return self._next


def is_well_bound(t: Term) -> bool:
    """True when every binder name is distinct and no bound name also occurs
    free, so names and variables are in bijection."""
    binders = set()
    stack = [t]
    while stack:
        u = stack.pop()
        for sel, c in children(u):
            for b in binder_at(u, sel):
                if b in binders:
                    return False
                binders.add(b)
            stack.append(c)
    return not (binders & free_vars(t))


# ---------------------------------------------------------------------------
# Renaming


_MISSING = object()


def _rebind(t: Term, make_new) -> Term:
    """Rewrite every binder with ``make_new(old)`` and remap occurrences.

    Scoping is respected, so shadowed names come out correct even for inputs
    that reuse binder names. Free variables are untouched. Binder chains are
    handled iteratively; only value bodies recurse.
    """
    env: dict = {}

    def ren(v: VarId) -> VarId:
        return env.get(v, v)

    def bind(v: VarId):
        new = make_new(v)
        old = env.get(v, _MISSING)
        env[v] = new
        return new, old

    def unbind(v: VarId, old) -> None:
        if old is _MISSING:
            del env[v]
        else:
            env[v] = old

    def go(t: Term) -> Term:
        frames = []
        while True:
            if isinstance(t, Cut):
                val = go(t.value)
                nb, old = bind(t.binder)
                frames.append((Cut(val, nb, t), t.binder, old))
                t = t.body
            elif isinstance(t, Sub):
                head = ren(t.head)
                val = go(t.value)
                nb, old = bind(t.binder)
                frames.append((Sub(head, val, nb, t), t.binder, old))
                t = t.body
            elif isinstance(t, Der):
                head = ren(t.head)
                nb, old = bind(t.binder)
                frames.append((Der(head, nb, t), t.binder, old))
                t = t.body
            elif isinstance(t, TensElim):
                head = ren(t.head)
                nx, oldx = bind(t.left_binder)
                ny, oldy = bind(t.right_binder)
                frames.append(
                    (TensElim(head, nx, ny, t), (t.left_binder, oldx,
                                                 t.right_binder, oldy), None))
                t = t.body
            else:
                if isinstance(t, Var):
                    core: Term = Var(ren(t.var))
                elif isinstance(t, Abs):
                    nb, old = bind(t.binder)
                    body = go(t.body)
                    unbind(t.binder, old)
                    core = Abs(nb, body)
                elif isinstance(t, Bang):
                    core = Bang(go(t.body))
                elif isinstance(t, Pair):
                    core = Pair(go(t.left), go(t.right))
                else:
                    raise TypeError(f"not a term: {t!r}")
                break
        for frame, a, b in reversed(frames):
            core = replace(frame, body=core)
            if isinstance(frame, TensElim):
                lx, oldx, ly, oldy = a
                unbind(ly, oldy)
                unbind(lx, oldx)
            else:
                unbind(a, b)
        return core

    return go(t)


def rename_fresh(t: Term, names: NameSource) -> Term:
    """Alpha-rename every binder with fresh indices from ``names``.

    Wildcard binders keep their wildcard flag. The result is well bound
    whenever ``names`` only hands out indices unused in ``t``.
    """
    return _rebind(t, lambda v: names.fresh(v.kind, v.wildcard))


def alpha_canonical(t: Term) -> Term:
    """Deterministic representative of the alpha class of ``t``.

    Binders are renumbered per kind in traversal order, starting above the
    free indices of that kind so no capture is possible; two terms are alpha
    equivalent exactly when their canonical forms are structurally equal.
    Wildcard flags are dropped: a wildcard is nothing more than an
    occurrence-free exponential binder.
    """
    free = free_vars(t)
    counters = {
        k: max((v.index for v in free if v.kind is k), default=-1) + 1
        for k in Kind
    }

    def make_new(v: VarId) -> VarId:
        new = VarId(v.kind, counters[v.kind])
        counters[v.kind] += 1
        return new

    return _rebind(t, make_new)


def structural_eq(a: Term, b: Term) -> bool:
    """Field-by-field equality that walks binder chains iteratively, safe
    for very deep terms."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        while True:
            if type(x) is not type(y):
                return False
            if isinstance(x, Var):
                if x.var != y.var:
                    return False
                break
            if isinstance(x, Abs):
                if x.binder != y.binder:
                    return False
                x, y = x.body, y.body
                continue
            if isinstance(x, Bang):
                x, y = x.body, y.body
                continue
            if isinstance(x, Pair):
                stack.append((x.right, y.right))
                x, y = x.left, y.left
                continue
            if isinstance(x, Cut):
                if x.binder != y.binder:
                    return False
                stack.append((x.value, y.value))
                x, y = x.body, y.body
                continue
            if isinstance(x, Sub):
                if x.head != y.head or x.binder != y.binder:
                    return False
                stack.append((x.value, y.value))
                x, y = x.body, y.body
                continue
            if isinstance(x, Der):
                if x.head != y.head or x.binder != y.binder:
                    return False
                x, y = x.body, y.body
                continue
            if isinstance(x, TensElim):
                if x.head != y.head or x.left_binder != y.left_binder \
                        or x.right_binder != y.right_binder:
                    return False
                x, y = x.body, y.body
                continue
            raise TypeError(f"not a term: {x!r}")
    return True


def alpha_eq(a: Term, b: Term) -> bool:
    return structural_eq(alpha_canonical(a), alpha_canonical(b))


# ---------------------------------------------------------------------------
# Clashes


def is_clash(t: Term) -> bool:
    """A cut whose value sort disagrees with its binder sort can never fire."""
    return isinstance(t, Cut) and value_kind(t.value) is not t.binder.kind


def find_clash(root: Term) -> Optional[Position]:
    """Position of the first clash cut in leftmost order, or None."""
    stack = [(root, ())]
    out = []
    while stack:
        t, path = stack.pop()
        out.append((t, path))
        for sel, c in reversed(children(t)):
            stack.append((c, path + (sel,)))
    # stack pops give preorder already; but reversed pushes made it so
    for t, path in out:
        if is_clash(t):
            return Position(root, path)
    return None


# ---------------------------------------------------------------------------
# Out cuts, out variables, garbage


def preorder(root: Term) -> Iterator:
    """Yield (path, subterm) pairs in leftmost preorder."""
    stack = [((), root)]
    while stack:
        path, t = stack.pop()
        yield path, t
        for sel, c in reversed(children(t)):
            stack.append((path + (sel,), c))


def out_cuts(root: Term):
    """Cuts not nested inside any cut value, leftmost first."""
    result = []
    stack = [((), root, False)]
    while stack:
        path, t, in_cut_value = stack.pop()
        if isinstance(t, Cut) and not in_cut_value:
            result.append(Position(root, path))
        for sel, c in reversed(children(t)):
            inner = in_cut_value or sel is Sel.CUT_VALUE
            stack.append((path + (sel,), c, inner))
    result.sort(key=lambda p: p.path)
    return result


def out_vars(root: Term) -> frozenset:
    """Variables with at least one occurrence outside every cut value."""
    found = set()
    stack = [(root, False)]
    while stack:
        t, in_cut_value = stack.pop()
        if not in_cut_value:
            if isinstance(t, Var):
                found.add(t.var)
            elif isinstance(t, (Sub, Der, TensElim)):
                found.add(t.head)
        for sel, c in children(t):
            stack.append((c, in_cut_value or sel is Sel.CUT_VALUE))
    return frozenset(found)


def is_cut_free_up_to_garbage(root: Term) -> bool:
    """True when every out cut binds a variable with no occurrence outside
    cut values in its body, so collecting garbage leaves no cut behind."""
    for pos in out_cuts(root):
        cut = pos.subterm
        if cut.binder in out_vars(cut.body):
            return False
    return True


def is_answer(t: Term) -> bool:
    """A chain of cuts around a value that is not a variable."""
    while isinstance(t, Cut):
        t = t.body
    return is_value(t) and not isinstance(t, Var)


def gc(t: Term) -> Term:
    """Drop every cut, keeping everything else in place.

    On terms that are cut free up to garbage this is plain garbage
    collection; in general it is the syntactic cut-erasing map: bodies of
    subtractions, derelictions, abstractions, promotions and pairs are
    cleaned recursively, cuts vanish together with their values.
    """
    frames = []
    while True:
        if isinstance(t, Cut):
            t = t.body
        elif isinstance(t, Sub):
            frames.append(replace(t, value=gc(t.value)))
            t = t.body
        elif isinstance(t, (Der, TensElim)):
            frames.append(t)
            t = t.body
        else:
            if isinstance(t, Var):
                core: Term = t
            elif isinstance(t, Abs):
                core = Abs(t.binder, gc(t.body))
            elif isinstance(t, Bang):
                core = Bang(gc(t.body))
            elif isinstance(t, Pair):
                core = Pair(gc(t.left), gc(t.right))
            else:
                raise TypeError(f"not a term: {t!r}")
            break
    return plug_spine(frames, core)


def occurrences(root: Term, x: VarId):
    """Paths of the free occurrences of ``x`` in ``root``.

    Value occurrences point at the Var node; head occurrences point at the
    subtraction, dereliction or tensor elimination carrying the head.
    Subtrees where ``x`` is rebound are skipped.
    """
    result = []
    stack = [((), root)]
    while stack:
        path, t = stack.pop()
        if isinstance(t, Var):
            if t.var == x:
                result.append(path)
            continue
        if isinstance(t, (Sub, Der, TensElim)) and t.head == x:
            result.append(path)
        for sel, c in reversed(children(t)):
            if x in binder_at(t, sel):
                continue
            stack.append((path + (sel,), c))
    result.sort()
    return result
