"""Random and exhaustive term generation for the test corpora.

Terms are proper by construction: the generators thread a set of
multiplicative variables that each subterm is obliged to use exactly once
(splitting it at forks), introduce promotions only when that set is empty,
and make every multiplicative binder land in its body's obligation set.
Exponential variables travel in an unrestricted palette.  Typability is
not decidable by construction here, so the random entry points filter
with the inferencer; rejection rates stay low because properness already
rules out most junk.

The exhaustive enumerator names binders canonically from a counter, so
each alpha-class of proper terms is produced once (unused exponential
binders are named, not wildcards; wildcards are a surface-syntax
convenience and alpha-equivalent to them).
"""

from __future__ import annotations

import random
from typing import Iterator, List, Optional, Sequence, Tuple

from .terms import (
    Abs, Bang, Cut, Der, Kind, Pair, Sub, TensElim, Term, Var, VarId,
)
from .typecheck import is_typable


class GenerationFailed(Exception):
    """Internal: a random walk painted itself into a corner; retried."""


def _min_size(musts: int, allow_tensor: bool) -> int:
    """Smallest proper term consuming this many obligated variables."""
    if musts == 0:
        return 1
    if allow_tensor:
        return 2 * musts - 1          # a tree of pairs over the variables
    return 3 * musts - 2              # a chain of subtractions instead


class _RandomBuilder:
    def __init__(self, rng: random.Random, allow_tensor: bool) -> None:
        self.rng = rng
        self.allow_tensor = allow_tensor
        self._next = 1

    def fresh(self, kind: Kind) -> VarId:
        v = VarId(kind, self._next)
        self._next += 1
        return v

    def _kind(self) -> Kind:
        return Kind.MULT if self.rng.random() < 0.5 else Kind.EXP

    def term(self, budget: int, musts: frozenset, exps: tuple) -> Term:
        lo = _min_size(len(musts), self.allow_tensor)
        if budget < lo:
            raise GenerationFailed
        choices: List[str] = []
        if budget == lo:
            # No slack: only the cheapest consumers stay on the menu.
            if len(musts) == 1:
                return Var(next(iter(musts)))
            if not musts:
                if not exps:
                    raise GenerationFailed
                return Var(self.rng.choice(exps))
            choices = ["pair"] if self.allow_tensor else ["sub"]
        else:
            # Leaves only when the budget is nearly spent, so generated
            # terms actually land near their target size.
            if budget <= 2:
                if len(musts) == 1:
                    choices.append("var")
                if not musts and exps:
                    choices.append("var")
            choices += ["abs", "cut", "cut"]
            if exps:
                choices.append("der")
            if not musts:
                choices.append("bang")
            if musts:
                choices += ["sub", "sub"]
                if self.allow_tensor:
                    choices.append("tenselim")
            if self.allow_tensor and len(musts) != 1:
                choices.append("pair")
        op = self.rng.choice(choices)

        if op == "var":
            if len(musts) == 1:
                return Var(next(iter(musts)))
            return Var(self.rng.choice(exps))

        if op == "abs":
            kind = self._kind()
            x = self.fresh(kind)
            if kind is Kind.MULT:
                return Abs(x, self.term(budget - 1, musts | {x}, exps))
            return Abs(x, self.term(budget - 1, musts, exps + (x,)))

        if op == "bang":
            return Bang(self.term(budget - 1, frozenset(), exps))

        if op == "pair":
            left_musts = frozenset(
                v for v in musts if self.rng.random() < 0.5)
            right_musts = musts - left_musts
            left_budget = self._split(budget - 1, left_musts, right_musts)
            left = self.term(left_budget, left_musts, exps)
            return Pair(left, self.term(budget - 1 - left_budget,
                                        right_musts, exps))

        if op == "cut":
            val_musts = frozenset(
                v for v in musts if self.rng.random() < 0.5)
            rest = musts - val_musts
            kind = self._kind()
            x = self.fresh(kind)
            body_musts = rest | {x} if kind is Kind.MULT else rest
            body_exps = exps if kind is Kind.MULT else exps + (x,)
            val_budget = self._split(budget - 1, val_musts, body_musts,
                                     value_side=True)
            value = self.value(val_budget, val_musts, exps)
            return Cut(value, x,
                       self.term(budget - 1 - val_budget, body_musts,
                                 body_exps))

        if op == "sub":
            head = self.rng.choice(sorted(musts, key=lambda v: v.index))
            remaining = musts - {head}
            val_musts = frozenset(
                v for v in remaining if self.rng.random() < 0.5)
            rest = remaining - val_musts
            kind = self._kind()
            x = self.fresh(kind)
            body_musts = rest | {x} if kind is Kind.MULT else rest
            body_exps = exps if kind is Kind.MULT else exps + (x,)
            val_budget = self._split(budget - 1, val_musts, body_musts,
                                     value_side=True)
            value = self.value(val_budget, val_musts, exps)
            return Sub(head, value, x,
                       self.term(budget - 1 - val_budget, body_musts,
                                 body_exps))

        if op == "der":
            head = self.rng.choice(exps)
            kind = self._kind()
            x = self.fresh(kind)
            if kind is Kind.MULT:
                return Der(head, x, self.term(budget - 1, musts | {x}, exps))
            return Der(head, x, self.term(budget - 1, musts, exps + (x,)))

        if op == "tenselim":
            head = self.rng.choice(sorted(musts, key=lambda v: v.index))
            remaining = musts - {head}
            kinds = (self._kind(), self._kind())
            x, y = self.fresh(kinds[0]), self.fresh(kinds[1])
            body_musts = remaining
            body_exps = exps
            for v in (x, y):
                if v.kind is Kind.MULT:
                    body_musts = body_musts | {v}
                else:
                    body_exps = body_exps + (v,)
            return TensElim(head, x, y,
                            self.term(budget - 1, body_musts, body_exps))

        raise AssertionError(op)

    def value(self, budget: int, musts: frozenset, exps: tuple) -> Term:
        lo = _min_size(len(musts), self.allow_tensor)
        if budget < lo:
            raise GenerationFailed
        choices = []
        if budget >= 2:
            choices += ["abs", "abs"]
            if not musts:
                choices.append("bang")
            if self.allow_tensor and (budget >= lo + 1 or len(musts) != 1):
                choices.append("pair")
        if budget <= 2 and (len(musts) == 1 or (not musts and exps)):
            choices.append("var")
        if not choices:
            raise GenerationFailed
        op = self.rng.choice(choices)
        if op == "var":
            if len(musts) == 1:
                return Var(next(iter(musts)))
            return Var(self.rng.choice(exps))
        if op == "abs":
            kind = self._kind()
            x = self.fresh(kind)
            if kind is Kind.MULT:
                return Abs(x, self.term(budget - 1, musts | {x}, exps))
            return Abs(x, self.term(budget - 1, musts, exps + (x,)))
        if op == "bang":
            return Bang(self.term(budget - 1, frozenset(), exps))
        left_musts = frozenset(v for v in musts if self.rng.random() < 0.5)
        right_musts = musts - left_musts
        left_budget = self._split(budget - 1, left_musts, right_musts)
        left = self.term(left_budget, left_musts, exps)
        return Pair(left, self.term(budget - 1 - left_budget,
                                    right_musts, exps))

    def _split(self, total: int, left_musts, right_musts,
               value_side: bool = False) -> int:
        """Pick the left share of ``total`` leaving both sides feasible."""
        lo = _min_size(len(left_musts), self.allow_tensor)
        hi = total - _min_size(len(right_musts), self.allow_tensor)
        if value_side and lo < 1:
            lo = 1
        if hi < lo:
            raise GenerationFailed
        return self.rng.randint(lo, hi)


def random_proper(rng: random.Random, max_size: int,
                  min_size: int = 2,
                  closed: bool = False, allow_tensor: bool = True,
                  free_exps: int = 2, free_mults: int = 0,
                  tries: int = 200) -> Term:
    """One random proper term with size in [min_size, max_size] (close to
    it; forced minimal branches can land a node or two short).

    Open terms draw on ``free_exps`` exponential names (e1, e2, ...) and
    obligate ``free_mults`` multiplicative ones (m1, ...); closed terms
    use neither.
    """
    if closed:
        free_exps = free_mults = 0
    exps = tuple(VarId(Kind.EXP, i + 1) for i in range(free_exps))
    musts = frozenset(VarId(Kind.MULT, free_exps + i + 1)
                      for i in range(free_mults))
    floor = max(min_size, _min_size(len(musts), allow_tensor), 2)
    if floor > max_size:
        raise ValueError("min_size exceeds max_size")
    for _ in range(tries):
        b = _RandomBuilder(rng, allow_tensor)
        b._next = free_exps + free_mults + 1
        target = rng.randint(floor, max_size)
        try:
            return b.term(target, musts, exps)
        except GenerationFailed:
            continue
    raise GenerationFailed(f"no proper term found in {tries} tries")


def random_typable(rng: random.Random, max_size: int,
                   min_size: int = 2,
                   closed: bool = False, allow_tensor: bool = True,
                   tries: int = 2000) -> Term:
    """One random proper term the inferencer accepts.

    The size floor relaxes as attempts accumulate: big random linear terms
    are rarely typable, so insisting on the floor forever could starve.
    """
    floor = min_size
    for attempt in range(tries):
        if attempt and attempt % 400 == 0 and floor > 2:
            floor = max(2, floor - 4)
        free_mults = rng.choice((0, 0, 0, 1)) if not closed else 0
        t = random_proper(rng, max_size, min_size=floor, closed=closed,
                          allow_tensor=allow_tensor, free_mults=free_mults)
        if is_typable(t):
            return t
    raise GenerationFailed(f"no typable term found in {tries} tries")


def typable_corpus(seed: int, count: int, max_size: int,
                   closed: bool = False,
                   allow_tensor: bool = True) -> List[Term]:
    """Seeded corpus with sizes stratified across [2, max_size]."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        lo = 2 + (i * (max_size - 2)) // max(1, count - 1)
        out.append(random_typable(rng, max_size, min_size=lo, closed=closed,
                                  allow_tensor=allow_tensor))
    return out


# ---------------------------------------------------------------------------
# Exhaustive enumeration (small sizes)


def enumerate_proper(max_size: int,
                     free_exps: int = 1,
                     free_mults: int = 0,
                     allow_tensor: bool = True) -> Iterator[Term]:
    """Every proper term of size <= max_size over the given free palette,
    one representative per alpha-class, in increasing size order."""
    exps = tuple(VarId(Kind.EXP, i + 1) for i in range(free_exps))
    musts = frozenset(VarId(Kind.MULT, free_exps + i + 1)
                      for i in range(free_mults))
    first_binder = free_exps + free_mults + 1
    for s in range(1, max_size + 1):
        yield from _terms_exact(s, musts, exps, first_binder, allow_tensor,
                                as_value=False)


def _binder_choices(nxt: int, allow_exp_unused: bool = True):
    yield VarId(Kind.MULT, nxt)
    yield VarId(Kind.EXP, nxt)


def _terms_exact(s: int, musts: frozenset, exps: tuple, nxt: int,
                 tensor: bool, as_value: bool) -> Iterator[Term]:
    if s < _min_size(len(musts), tensor):
        return
    if s == 1:
        if len(musts) == 1:
            yield Var(next(iter(musts)))
        elif not musts:
            for e in exps:
                yield Var(e)
        return

    # Values first: abstraction, promotion, pair.
    for x in _binder_choices(nxt):
        if x.kind is Kind.MULT:
            for body in _terms_exact(s - 1, musts | {x}, exps, nxt + 1,
                                     tensor, False):
                yield Abs(x, body)
        else:
            for body in _terms_exact(s - 1, musts, exps + (x,), nxt + 1,
                                     tensor, False):
                yield Abs(x, body)
    if not musts:
        for body in _terms_exact(s - 1, musts, exps, nxt, tensor, False):
            yield Bang(body)
    if tensor:
        for left_musts in _subsets(musts):
            right_musts = musts - left_musts
            for i in range(1, s - 1):
                for left in _terms_exact(i, left_musts, exps, nxt,
                                         tensor, False):
                    for right in _terms_exact(s - 1 - i, right_musts, exps,
                                              nxt, tensor, False):
                        yield Pair(left, right)
    if as_value:
        return

    # Binding constructors.
    for val_musts in _subsets(musts):
        rest = musts - val_musts
        for x in _binder_choices(nxt):
            if x.kind is Kind.MULT:
                body_musts, body_exps = rest | {x}, exps
            else:
                body_musts, body_exps = rest, exps + (x,)
            for i in range(1, s - 1):
                for value in _terms_exact(i, val_musts, exps, nxt + 1,
                                          tensor, True):
                    for body in _terms_exact(s - 1 - i, body_musts,
                                             body_exps, nxt + 1, tensor,
                                             False):
                        yield Cut(value, x, body)

    for head in sorted(musts, key=lambda v: v.index):
        remaining = musts - {head}
        for val_musts in _subsets(remaining):
            rest = remaining - val_musts
            for x in _binder_choices(nxt):
                if x.kind is Kind.MULT:
                    body_musts, body_exps = rest | {x}, exps
                else:
                    body_musts, body_exps = rest, exps + (x,)
                for i in range(1, s - 1):
                    for value in _terms_exact(i, val_musts, exps, nxt + 1,
                                              tensor, True):
                        for body in _terms_exact(s - 1 - i, body_musts,
                                                 body_exps, nxt + 1,
                                                 tensor, False):
                            yield Sub(head, value, x, body)
        if tensor:
            for x in _binder_choices(nxt):
                for y in _binder_choices(nxt + 1):
                    body_musts, body_exps = remaining, exps
                    for v in (x, y):
                        if v.kind is Kind.MULT:
                            body_musts = body_musts | {v}
                        else:
                            body_exps = body_exps + (v,)
                    for body in _terms_exact(s - 1, body_musts, body_exps,
                                             nxt + 2, tensor, False):
                        yield TensElim(head, x, y, body)

    for e in exps:
        for x in _binder_choices(nxt):
            if x.kind is Kind.MULT:
                body_musts, body_exps = musts | {x}, exps
            else:
                body_musts, body_exps = musts, exps + (x,)
            for body in _terms_exact(s - 1, body_musts, body_exps, nxt + 1,
                                     tensor, False):
                yield Der(e, x, body)


def _subsets(vs: frozenset) -> Iterator[frozenset]:
    items = sorted(vs, key=lambda v: v.index)
    n = len(items)
    for mask in range(1 << n):
        yield frozenset(items[i] for i in range(n) if mask >> i & 1)
