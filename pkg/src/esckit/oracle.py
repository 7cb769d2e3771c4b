"""Tree-rewriting reference engine: root rules, redexes, the good strategy.

This module is the correctness oracle the machines are tested against.  It
works on plain immutable trees with no sharing and no cleverness in the
data layout, so the rules can be read off directly:

    axm1   [vm - m] C<m>            ->  C<vm>                   cut consumed
    axm2   [n - m] C<[m > v, x] t>  ->  C<[n > v, x] t>         cut consumed
    -o     [\\y s - m] C<[m > v, x] t>
                                    ->  C<[v - y] L<[v' - x] t>>  s = L<v'>
    axe1   [ve - e] C<e>            ->  [ve - e] C<a(ve)>        cut stays
    axe2   [f - e] C<[e ? x] t>     ->  [f - e] C<[f ? x] t>     cut stays
    !      [!s - e] C<[e ? x] t>    ->  [!s - e] C<L<[v - x] t>> cut stays,
                                        L<v> = a(s)
    w      [ve - e] t               ->  t      if e not free in t
    tens   [<s, u> - m] C<[m @ x, y] t>
                                    ->  C<L<[v-x] L'<[v'-y] t>>> cut consumed,
                                        s = L<v>, u = L'<v'>
    axm2 also fires on tensor-elimination heads.

`a(.)` is a fresh renaming: the two copying rules (axe1, !) rename the copy,
everything else moves subtrees.  All operations here assume and preserve
well-bound terms (entry points rename their input when it is not), which is
what makes the rules capture-free without explicit checks.

A non-erasing redex is identified by the acting cut together with one free
occurrence of its variable; its position is the path to that occurrence
(for axm1/axe1 a Var node, otherwise the subtraction, dereliction or tensor
elimination whose head it is).  An erasing (w) redex's position is the path
to the cut itself.

A position is *good* when its path never enters a cut value and, for every
cut entered through its body, the cut's variable does not dominate the rest
of the path.  Domination is the dfv fold: subtraction-value frames seed
their head, and dereliction/subtraction body frames propagate their head
exactly when their binder is dominated below.  Good steps form a diamond,
so every maximal good(-non-erasing) sequence from a term has the same
length; the fast spine normalizer at the bottom of the module leans on that
to count steps without paying the generic search cost.

There are no published dfv or goodness clauses for the tensor constructors;
pair components behave here like the other value bodies (pass-through) and
tensor-elimination bodies like dereliction bodies (conditional head
propagation).  Both are extrapolations.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from .terms import (
    Abs, Bang, Cut, Der, Kind, NameSource, Pair, Position, Sel, Sub, Term,
    TensElim, Var, VarId, children, find_clash, free_vars, is_value,
    is_well_bound, occurrences, plug_spine, rename_fresh, replace_at, size,
    split, subterm_at, value_kind,
)


class RuleKind(Enum):
    AXM1 = "axm1"
    AXM2 = "axm2"
    LOLLI = "-o"
    AXE1 = "axe1"
    AXE2 = "axe2"
    BANG = "!"
    W = "w"
    TENS = "tens"


MULTIPLICATIVE_RULES = frozenset(
    {RuleKind.AXM1, RuleKind.AXM2, RuleKind.LOLLI, RuleKind.TENS})
EXPONENTIAL_RULES = frozenset(
    {RuleKind.AXE1, RuleKind.AXE2, RuleKind.BANG, RuleKind.W})
NON_ERASING_RULES = frozenset(set(RuleKind) - {RuleKind.W})

# Deterministic tiebreak for redexes sharing a prefix; position paths are
# the primary key and never collide between distinct redexes.
_RULE_ORDER = {k: i for i, k in enumerate(RuleKind)}


@dataclass(frozen=True)
class Redex:
    kind: RuleKind
    position: Position        # occurrence site; the cut itself for w
    cut_site: Position
    occurrence_site: Optional[Position]  # None for w

    def sort_key(self):
        return (self.position.path, _RULE_ORDER[self.kind])


class StepLimitExceeded(Exception):
    def __init__(self, term: Term, steps: list) -> None:
        super().__init__(f"no normal form within {len(steps)} steps")
        self.term = term
        self.steps = steps


class ClashEncountered(Exception):
    def __init__(self, term: Term, position: Position, steps: list) -> None:
        super().__init__("reduction blocked on a clash cut")
        self.term = term
        self.position = position
        self.steps = steps


class StaleRedex(Exception):
    pass


# ---------------------------------------------------------------------------
# dfv and context predicates


def _frames_of(root: Term, path: tuple):
    """(node, selector) pairs from the root down to the hole."""
    frames = []
    t = root
    for sel in path:
        frames.append((t, sel))
        if sel is Sel.CUT_VALUE or sel is Sel.SUB_VALUE:
            t = t.value
        elif sel is Sel.PAIR_LEFT:
            t = t.left
        elif sel is Sel.PAIR_RIGHT:
            t = t.right
        else:
            t = t.body
    return frames


def _dfv_fold(frames, check_good: bool):
    """Bottom-up dfv fold; returns (dfv set, good boolean)."""
    dfv: set = set()
    good = True
    for node, sel in reversed(frames):
        if sel is Sel.CUT_VALUE:
            good = False
            # dfv([V - x] t) = dfv(V): pass through.
        elif sel is Sel.CUT_BODY:
            if node.binder in dfv:
                good = False
            dfv.discard(node.binder)
        elif sel is Sel.SUB_VALUE:
            dfv.add(node.head)
        elif sel is Sel.SUB_BODY or sel is Sel.DER_BODY:
            if node.binder in dfv:
                dfv.discard(node.binder)
                dfv.add(node.head)
        elif sel is Sel.TENS_BODY:
            # Extrapolated: mirrors the dereliction clause with two binders.
            if node.left_binder in dfv or node.right_binder in dfv:
                dfv.discard(node.left_binder)
                dfv.discard(node.right_binder)
                dfv.add(node.head)
        elif sel is Sel.ABS_BODY:
            dfv.discard(node.binder)
        # BANG_BODY, PAIR_LEFT, PAIR_RIGHT: pass through (pair extrapolated).
        if not check_good:
            good = True
    return dfv, good


def dfv(pos: Position) -> frozenset:
    """Dominating free variables of the context with its hole at ``pos``."""
    got, _ = _dfv_fold(_frames_of(pos.root, pos.path), check_good=False)
    return frozenset(got)


def is_good(pos: Position) -> bool:
    _, good = _dfv_fold(_frames_of(pos.root, pos.path), check_good=True)
    return good


def is_basic(pos: Position) -> bool:
    return all(sel is Sel.CUT_BODY for sel in pos.path)


# ---------------------------------------------------------------------------
# Redex enumeration


def _fv_table(root: Term) -> dict:
    """Free variables of every subterm, post-order, keyed by object id."""
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
            s = frozenset({t.var})
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
            s = frozenset({t.head}) | (table[id(t.body)] - {t.binder})
        elif isinstance(t, TensElim):
            s = frozenset({t.head}) \
                | (table[id(t.body)] - {t.left_binder, t.right_binder})
        else:
            raise TypeError(f"not a term: {t!r}")
        table[id(t)] = s
    return table


def _pair_rule(value: Term, occ_node: Term) -> Optional[RuleKind]:
    """Root rule for a cut value meeting one occurrence of its variable,
    or None when no rule matches (a shape mismatch or a clash pair)."""
    if isinstance(occ_node, Var):
        vk = value_kind(value)
        if vk is not occ_node.var.kind:
            return None
        return RuleKind.AXM1 if vk is Kind.MULT else RuleKind.AXE1
    if isinstance(occ_node, Sub):
        if isinstance(value, Var) and value.var.kind is Kind.MULT:
            return RuleKind.AXM2
        if isinstance(value, Abs):
            return RuleKind.LOLLI
        return None
    if isinstance(occ_node, Der):
        if isinstance(value, Var) and value.var.kind is Kind.EXP:
            return RuleKind.AXE2
        if isinstance(value, Bang):
            return RuleKind.BANG
        return None
    if isinstance(occ_node, TensElim):
        if isinstance(value, Var) and value.var.kind is Kind.MULT:
            return RuleKind.AXM2
        if isinstance(value, Pair):
            return RuleKind.TENS
        return None
    return None


def enumerate_redexes(root: Term,
                      kinds: frozenset = frozenset(RuleKind)) -> List[Redex]:
    """All redexes of the requested kinds, leftmost first.

    One Redex per (cut, occurrence) pair for the non-erasing rules; one per
    erasable cut for w.  Positions inside cut values are included (they are
    legal steps, just never good ones).
    """
    fvt = _fv_table(root) if RuleKind.W in kinds else None
    found: List[Redex] = []
    stack = [((), root)]
    while stack:
        path, t = stack.pop()
        if isinstance(t, Cut):
            binder, value = t.binder, t.value
            if fvt is not None and binder.kind is Kind.EXP \
                    and value_kind(value) is Kind.EXP \
                    and binder not in fvt[id(t.body)]:
                found.append(Redex(RuleKind.W, Position(root, path),
                                   Position(root, path), None))
            for occ in occurrences(t.body, binder):
                node = subterm_at(t.body, occ)
                rule = _pair_rule(value, node)
                if rule is None or rule not in kinds:
                    continue
                q = path + (Sel.CUT_BODY,) + occ
                where = Position(root, q)
                found.append(Redex(rule, where, Position(root, path), where))
        for sel, c in reversed(children(t)):
            stack.append((path + (sel,), c))
    found.sort(key=Redex.sort_key)
    return found


def good_redexes(root: Term,
                 kinds: frozenset = frozenset(RuleKind)) -> List[Redex]:
    return [r for r in enumerate_redexes(root, kinds) if is_good(r.position)]


def basic_redexes(root: Term,
                  kinds: frozenset = NON_ERASING_RULES) -> List[Redex]:
    return [r for r in enumerate_redexes(root, kinds) if is_basic(r.position)]


# ---------------------------------------------------------------------------
# Applying a redex


def _rewrite_occurrence(rule: RuleKind, value: Term, node: Term,
                        names: NameSource, copied: list) -> Term:
    """Right-hand side at the occurrence site, given the acting cut's value.

    ``copied`` collects sizes of values duplicated by the copying rules for
    the sub-term bound bookkeeping.
    """
    if rule is RuleKind.AXM1:
        return value
    if rule is RuleKind.AXE1:
        copied.append(size(value))
        return rename_fresh(value, names)
    if rule is RuleKind.AXM2:
        return replace(node, head=value.var)
    if rule is RuleKind.AXE2:
        return Der(value.var, node.binder, node.body)
    if rule is RuleKind.LOLLI:
        frames, core = split(value.body)
        inner = Cut(core, node.binder, node.body)
        return Cut(node.value, value.binder, plug_spine(frames, inner))
    if rule is RuleKind.BANG:
        copied.append(size(value.body))
        fresh_body = rename_fresh(value.body, names)
        frames, core = split(fresh_body)
        return plug_spine(frames, Cut(core, node.binder, node.body))
    if rule is RuleKind.TENS:
        lf, lv = split(value.left)
        rf, rv = split(value.right)
        inner = plug_spine(rf, Cut(rv, node.right_binder, node.body))
        return plug_spine(lf, Cut(lv, node.left_binder, inner))
    raise ValueError(rule)


# Rules where the acting cut disappears from the term.
_CUT_CONSUMING = frozenset(
    {RuleKind.AXM1, RuleKind.AXM2, RuleKind.LOLLI, RuleKind.TENS, RuleKind.W})


def apply_redex(root: Term, r: Redex, names: Optional[NameSource] = None,
                copied_sizes: Optional[list] = None) -> Term:
    """Fire one redex; raises StaleRedex when ``r`` does not fit ``root``.

    ``root`` must be the term the redex was enumerated on (well bound for
    capture freedom).  ``copied_sizes``, when given, receives the size of
    each value duplicated by axe1/!.
    """
    if names is None:
        names = NameSource.above(root)
    if copied_sizes is None:
        copied_sizes = []
    try:
        cut = subterm_at(root, r.cut_site.path)
    except (AttributeError, ValueError):
        raise StaleRedex("cut path invalid") from None
    if not isinstance(cut, Cut):
        raise StaleRedex("no cut at the recorded site")

    if r.kind is RuleKind.W:
        if cut.binder in free_vars(cut.body) \
                or value_kind(cut.value) is not Kind.EXP:
            raise StaleRedex("cut is not erasable")
        return replace_at(root, r.cut_site.path, cut.body)

    occ = r.occurrence_site.path
    cut_prefix = r.cut_site.path + (Sel.CUT_BODY,)
    if occ[:len(cut_prefix)] != cut_prefix:
        raise StaleRedex("occurrence does not sit under the cut body")
    rel = occ[len(cut_prefix):]
    try:
        node = subterm_at(cut.body, rel)
    except (AttributeError, ValueError):
        raise StaleRedex("occurrence path invalid") from None
    expected = _pair_rule(cut.value, node)
    if expected is not r.kind:
        raise StaleRedex(f"rule {r.kind} does not match the term shape")
    acted = node.var if isinstance(node, Var) else node.head
    if acted != cut.binder:
        raise StaleRedex("occurrence does not belong to the acting cut")

    new_at_occ = _rewrite_occurrence(r.kind, cut.value, node, names,
                                     copied_sizes)
    new_body = replace_at(cut.body, rel, new_at_occ)
    if r.kind in _CUT_CONSUMING:
        return replace_at(root, r.cut_site.path, new_body)
    return replace_at(root, r.cut_site.path, replace(cut, body=new_body))


# ---------------------------------------------------------------------------
# Strategies


class Mode(Enum):
    GOOD_FULL = "good-full"
    GOOD_NON_ERASING = "good-non-erasing"
    BASIC_NON_ERASING = "basic-non-erasing"


_MODE_KINDS = {
    Mode.GOOD_FULL: frozenset(RuleKind),
    Mode.GOOD_NON_ERASING: NON_ERASING_RULES,
    Mode.BASIC_NON_ERASING: NON_ERASING_RULES,
}


def _redexes_for(root: Term, mode: Mode) -> List[Redex]:
    rs = enumerate_redexes(root, _MODE_KINDS[mode])
    if mode is Mode.BASIC_NON_ERASING:
        return [r for r in rs if is_basic(r.position)]
    return [r for r in rs if is_good(r.position)]


class Policy:
    """Redex choice; Leftmost is the default deterministic policy."""

    def choose(self, rs: List[Redex]) -> Redex:
        raise NotImplementedError


class Leftmost(Policy):
    def choose(self, rs: List[Redex]) -> Redex:
        return rs[0]  # enumeration is already sorted


class RandomPolicy(Policy):
    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)

    def choose(self, rs: List[Redex]) -> Redex:
        return self.rng.choice(rs)


def step_good(root: Term, policy: Optional[Policy] = None,
              names: Optional[NameSource] = None,
              copied_sizes: Optional[list] = None
              ) -> Optional[Tuple[Term, Redex]]:
    """One good step (any kind, w included), or None at a good normal form."""
    rs = good_redexes(root)
    if not rs:
        return None
    r = (policy or Leftmost()).choose(rs)
    return apply_redex(root, r, names, copied_sizes), r


DEFAULT_STEP_LIMIT = 1_000_000


@dataclass
class NormalizeResult:
    term: Term
    steps: List[Redex]
    copied_sizes: List[int] = field(default_factory=list)

    def counts(self) -> Counter:
        return Counter(r.kind for r in self.steps)

    def max_copied(self) -> int:
        return max(self.copied_sizes, default=0)


def normalize(root: Term, mode: Mode = Mode.GOOD_FULL,
              policy: Optional[Policy] = None,
              names: Optional[NameSource] = None,
              step_limit: int = DEFAULT_STEP_LIMIT) -> NormalizeResult:
    """Iterate the chosen sub-relation to its normal form.

    Raises StepLimitExceeded when the limit is hit and ClashEncountered
    when reduction stops with a clash subterm still present (blocked input
    rather than a finished one).
    """
    policy = policy or Leftmost()
    if not is_well_bound(root):
        root = rename_fresh(root, names or NameSource.above(root))
    if names is None:
        names = NameSource.above(root)
    t = root
    steps: List[Redex] = []
    copied: List[int] = []
    while True:
        rs = _redexes_for(t, mode)
        if not rs:
            break
        if len(steps) >= step_limit:
            raise StepLimitExceeded(t, steps)
        r = policy.choose(rs)
        t = apply_redex(t, r, names, copied)
        steps.append(r)
    blocked = _blocked_position(t, mode)
    if blocked is not None:
        raise ClashEncountered(t, blocked, steps)
    return NormalizeResult(t, steps, copied)


def _blocked_position(t: Term, mode: Mode) -> Optional[Position]:
    """Where the stopped term is clash-blocked, if anywhere.

    Good full reduction erases whatever garbage it can, so any clash still
    present at its normal form is load-bearing.  The non-erasing modes keep
    garbage by design; for them only a clash the evaluation actually ran
    into counts, which for the basic mode means a bound spine head with no
    matching rule.  Good non-erasing normal forms may retain clashes inside
    garbage silently.
    """
    if mode is Mode.GOOD_FULL:
        return find_clash(t)
    if mode is Mode.GOOD_NON_ERASING:
        return None
    root = t
    env: Dict[VarId, tuple] = {}  # binder -> path of its cut
    path: tuple = ()
    while isinstance(t, Cut):
        env[t.binder] = path
        path = path + (Sel.CUT_BODY,)
        t = t.body
    head: Optional[VarId] = None
    if isinstance(t, Var):
        head = t.var
    elif isinstance(t, (Sub, Der, TensElim)):
        head = t.head
    if head is not None and head in env:
        cut_path = env[head]
        if _pair_rule(subterm_at(root, cut_path).value, t) is None:
            return Position(root, cut_path)
    return None


# ---------------------------------------------------------------------------
# Fast spine evaluation (counting oracle for the big families)
#
# Basic non-erasing evaluation only ever fires redexes whose position is a
# chain of cut bodies, so the term can be held as (cut list, active term)
# and each step costs O(size of the material it moves or copies) instead of
# a whole-term search.  Because basic positions are good and the good
# strategy is diamond, whenever this evaluation ends cut-free up to garbage
# its step count equals the length of every maximal good non-erasing
# sequence, which lets the acceptance suite pin exact family counts without
# paying the generic normalizer's cost.


@dataclass
class SpineResult:
    term: Term
    counts: Counter
    copied_sizes: List[int]
    halted_on_answer: bool

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def max_copied(self) -> int:
        return max(self.copied_sizes, default=0)


def normalize_basic_spine(root: Term,
                          names: Optional[NameSource] = None,
                          step_limit: int = DEFAULT_STEP_LIMIT) -> SpineResult:
    """Run basic non-erasing evaluation with a cut-list zipper.

    Works on open terms too (free variables simply never resolve).  The
    rewrite logic is shared with apply_redex via _rewrite_occurrence.
    """
    if not is_well_bound(root):
        root = rename_fresh(root, names or NameSource.above(root))
    if names is None:
        names = NameSource.above(root)

    entries: List[Optional[Tuple[Term, VarId]]] = []  # None = consumed
    index: Dict[VarId, int] = {}
    active = root
    counts: Counter = Counter()
    copied: List[int] = []
    steps = 0

    def lookup(v: VarId) -> Optional[int]:
        i = index.get(v)
        if i is not None and entries[i] is None:
            return None
        return i

    while True:
        if isinstance(active, Cut):
            index[active.binder] = len(entries)
            entries.append((active.value, active.binder))
            active = active.body
            continue

        head: Optional[VarId] = None
        if isinstance(active, Var):
            head = active.var
        elif isinstance(active, (Sub, Der, TensElim)):
            head = active.head
        if head is None:
            break  # a non-variable value: an answer
        slot = lookup(head)
        if slot is None:
            break  # free variable (open input) or already-consumed name
        value, _ = entries[slot]
        rule = _pair_rule(value, active)
        if rule is None:
            final = _rebuild_spine(entries, active)
            where = find_clash(final) or Position(final, ())
            raise ClashEncountered(final, where, [])
        if steps >= step_limit:
            raise StepLimitExceeded(_rebuild_spine(entries, active), [])
        active = _rewrite_occurrence(rule, value, active, names, copied)
        if rule in _CUT_CONSUMING:
            entries[slot] = None
        counts[rule] += 1
        steps += 1

    final = _rebuild_spine(entries, active)
    return SpineResult(final, counts, copied,
                       halted_on_answer=not isinstance(active, Var)
                       and is_value(active))


def _rebuild_spine(entries, active: Term) -> Term:
    t = active
    for entry in reversed(entries):
        if entry is None:
            continue
        value, binder = entry
        t = Cut(value, binder, t)
    return t
