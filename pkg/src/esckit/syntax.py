"""Concrete syntax: parser and printers.

The accepted grammar (whitespace between tokens is ignored):

    term   ::= value | "[" binder "]" term
    value  ::= var | "\\" var term | "!" term | "<" term "," term ">"
    binder ::= value "-" var            cut
             | evar "?" var             dereliction
             | mvar ">" value "," var   subtraction
             | mvar "@" var "," var     tensor elimination
    mvar   ::= "m" digits
    evar   ::= "e" digits | "_"

A ``_`` binder stands for an occurrence-free exponential variable; every
parsed ``_`` receives a fresh index so wildcards never alias each other.
``_`` cannot be used where a variable occurs (value position or head).

Unicode forms are accepted everywhere their ASCII twin is: ``λ`` for
``\\``, ``→`` for the cut ``-``, ``▷`` for the subtraction ``>``, and
``⟨ ⟩`` for the pair brackets.  The ASCII printer emits only the grammar
above, so print-then-parse is the identity up to renaming of binders.

Input must be well bound: binder names pairwise distinct and disjoint from
the free names.  Violations raise :class:`BindingError` rather than being
silently repaired, mirroring the Barendregt-style discipline the machines
expect of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .terms import (
    Abs, Bang, Cut, Der, Kind, Pair, Sub, Term, TensElim, Var, VarId,
    free_vars, is_value,
)

GRAMMAR_HELP = """\
term   ::= value | "[" binder "]" term
value  ::= var | "\\" var term | "!" term | "<" term "," term ">"
binder ::= value "-" var            cut
         | evar "?" var             dereliction
         | mvar ">" value "," var   subtraction
         | mvar "@" var "," var     tensor elimination
var    ::= mvar | evar
mvar   ::= "m" digits
evar   ::= "e" digits | "_"         ("_": occurrence-free binder)
Unicode aliases: λ = \\   → = -   ▷ = >   ⟨ ⟩ = < >
Parentheses may group a term; they are accepted, never printed.
Example: [!\\m1m1-e1][e1?m2][e1?m3][m2>m3,m4]m4
"""


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int

    def __post_init__(self) -> None:
        assert self.begin <= self.end


class ParseError(Exception):
    """Input does not match the grammar."""

    def __init__(self, message: str, span: SourceSpan,
                 expected: frozenset = frozenset()) -> None:
        super().__init__(message)
        self.span = span
        self.expected = expected

    def __str__(self) -> str:
        base = super().__str__()
        if self.expected:
            alts = ", ".join(sorted(self.expected))
            return f"{base} (expected: {alts}) at {self.span.begin}..{self.span.end}"
        return f"{base} at {self.span.begin}..{self.span.end}"


class BindingError(Exception):
    """Input is syntactically fine but not well bound."""

    def __init__(self, message: str, span: Optional[SourceSpan] = None) -> None:
        super().__init__(message)
        self.span = span


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = {
    "[": "LBRACK", "]": "RBRACK",
    "<": "LANGLE", ">": "RANGLE", "▷": "RANGLE",
    "⟨": "LANGLE", "⟩": "RANGLE",
    ",": "COMMA",
    "-": "CUTSEP", "→": "CUTSEP",
    "?": "QUERY",
    "@": "AT",
    "\\": "LAMBDA", "λ": "LAMBDA",
    "!": "BANG",
    "_": "WILD",
    "(": "LPAREN", ")": "RPAREN",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # one of _PUNCT values, "VAR", "EOF"
    text: str
    span: SourceSpan
    var: Optional[VarId] = None


def _lex(src: str) -> list:
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _PUNCT:
            toks.append(_Token(_PUNCT[c], c, SourceSpan(i, i + 1)))
            i += 1
            continue
        if c in ("m", "e"):
            j = i + 1
            while j < n and src[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError(
                    f"variable letter {c!r} needs a numeric index",
                    SourceSpan(i, i + 1), frozenset({"digits"}))
            kind = Kind.MULT if c == "m" else Kind.EXP
            v = VarId(kind, int(src[i + 1:j]))
            toks.append(_Token("VAR", src[i:j], SourceSpan(i, j), v))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", SourceSpan(i, i + 1))
    toks.append(_Token("EOF", "", SourceSpan(n, n)))
    return toks


# ---------------------------------------------------------------------------
# Parser

_VALUE_START = frozenset({"VAR", "LAMBDA", "BANG", "LANGLE"})


class _Parser:
    def __init__(self, src: str) -> None:
        self.toks = _lex(src)
        self.pos = 0
        # Wildcards get indices above every explicit index in the input so
        # they can never alias a written name.
        self.wild_next = 1 + max(
            (t.var.index for t in self.toks if t.kind == "VAR"), default=-1)
        # (VarId, span) per binding site, for the well-boundness report
        self.binders: list = []

    # -- token plumbing

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(
                f"unexpected {t.text!r}" if t.kind != "EOF"
                else "unexpected end of input",
                t.span, frozenset({what}))
        return self.next()

    # -- variables

    def parse_var(self, binder: bool) -> _Token:
        t = self.peek()
        if t.kind == "VAR":
            return self.next()
        if t.kind == "WILD":
            if not binder:
                raise ParseError(
                    "wildcard _ cannot occur here, it never has occurrences",
                    t.span, frozenset({"variable"}))
            self.next()
            v = VarId(Kind.EXP, self.wild_next, wildcard=True)
            self.wild_next += 1
            return _Token("VAR", "_", t.span, v)
        raise ParseError(
            f"unexpected {t.text!r}" if t.kind != "EOF"
            else "unexpected end of input",
            t.span, frozenset({"variable"}))

    def bind(self, tok: _Token) -> VarId:
        self.binders.append((tok.var, tok.span))
        return tok.var

    # -- grammar productions

    def parse_term(self) -> Term:
        frames = []  # (builder closure args) innermost last
        while self.peek().kind == "LBRACK":
            self.next()
            frames.append(self.parse_binder())
            self.expect("RBRACK", "]")
        if self.peek().kind == "LPAREN":
            self.next()
            core = self.parse_term()
            self.expect("RPAREN", ")")
        else:
            core = self.parse_value()
        for make in reversed(frames):
            core = make(core)
        return core

    def parse_binder(self):
        t = self.peek()
        if t.kind == "VAR" and t.var.kind is Kind.MULT:
            after = self.toks[self.pos + 1]
            if after.kind == "RANGLE":
                self.next(); self.next()
                head = t.var
                value = self.parse_value()
                self.expect("COMMA", ",")
                binder = self.bind(self.parse_var(binder=True))
                return lambda body: Sub(head, value, binder, body)
            if after.kind == "AT":
                self.next(); self.next()
                head = t.var
                xb = self.bind(self.parse_var(binder=True))
                self.expect("COMMA", ",")
                yb = self.bind(self.parse_var(binder=True))
                return lambda body: TensElim(head, xb, yb, body)
        if t.kind == "VAR" and t.var.kind is Kind.EXP:
            after = self.toks[self.pos + 1]
            if after.kind == "QUERY":
                self.next(); self.next()
                head = t.var
                binder = self.bind(self.parse_var(binder=True))
                return lambda body: Der(head, binder, body)
        # everything else must be a cut: value "-" var
        value = self.parse_value()
        self.expect("CUTSEP", "-")
        binder = self.bind(self.parse_var(binder=True))
        return lambda body: Cut(value, binder, body)

    def parse_value(self) -> Term:
        t = self.peek()
        if t.kind == "LPAREN":
            self.next()
            inner = self.parse_term()
            close = self.expect("RPAREN", ")")
            if not is_value(inner):
                raise ParseError("parenthesized term used where a value "
                                 "is required", SourceSpan(t.span.begin,
                                                           close.span.end))
            return inner
        if t.kind == "VAR":
            return Var(self.next().var)
        if t.kind == "WILD":
            raise ParseError(
                "wildcard _ cannot occur here, it never has occurrences",
                t.span, frozenset({"value"}))
        if t.kind == "LAMBDA":
            self.next()
            binder = self.bind(self.parse_var(binder=True))
            body = self.parse_term()
            return Abs(binder, body)
        if t.kind == "BANG":
            self.next()
            return Bang(self.parse_term())
        if t.kind == "LANGLE":
            self.next()
            left = self.parse_term()
            self.expect("COMMA", ",")
            right = self.parse_term()
            self.expect("RANGLE", ">")
            return Pair(left, right)
        raise ParseError(
            f"unexpected {t.text!r}" if t.kind != "EOF"
            else "unexpected end of input",
            t.span, frozenset({"value", "["}))


def parse(src: str) -> Term:
    """Parse a term, enforcing well-boundness of names.

    Raises :class:`ParseError` on grammar violations and
    :class:`BindingError` when a binder name is reused or shadows a free
    name.
    """
    p = _Parser(src)
    term = p.parse_term()
    trailing = p.peek()
    if trailing.kind != "EOF":
        raise ParseError(f"trailing input {trailing.text!r}", trailing.span,
                         frozenset({"end of input"}))

    seen: dict = {}
    for v, span in p.binders:
        if v in seen:
            raise BindingError(
                f"binder {v!r} is bound twice; input must be well bound",
                span)
        seen[v] = span
    free = free_vars(term)
    for v, span in p.binders:
        if v in free:
            raise BindingError(
                f"name {v!r} is both bound and free; input must be well bound",
                span)
    return term


# ---------------------------------------------------------------------------
# Printer


class Style(Enum):
    ASCII = "ascii"
    UNICODE = "unicode"


_STYLE_TOKENS = {
    Style.ASCII: {"lam": "\\", "cut": "-", "sub": ">", "pl": "<", "pr": ">"},
    Style.UNICODE: {"lam": "λ", "cut": "→", "sub": "▷",
                    "pl": "⟨", "pr": "⟩"},
}


def _name(v: VarId) -> str:
    if v.wildcard:
        return "_"
    return f"{v.kind.value}{v.index}"


def pretty(t: Term, style: Style = Style.ASCII) -> str:
    """Render a term; ASCII output reparses to an alpha-equal term."""
    tok = _STYLE_TOKENS[style]
    pieces = []
    stack = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            pieces.append(item)
            continue
        u = item
        if isinstance(u, Var):
            pieces.append(_name(u.var))
        elif isinstance(u, Abs):
            pieces.append(tok["lam"] + _name(u.binder))
            stack.append(u.body)
        elif isinstance(u, Bang):
            pieces.append("!")
            stack.append(u.body)
        elif isinstance(u, Pair):
            pieces.append(tok["pl"])
            stack.append(tok["pr"])
            stack.append(u.right)
            stack.append(",")
            stack.append(u.left)
        elif isinstance(u, Cut):
            pieces.append("[")
            stack.append(u.body)
            stack.append(tok["cut"] + _name(u.binder) + "]")
            stack.append(u.value)
        elif isinstance(u, Sub):
            pieces.append("[" + _name(u.head) + tok["sub"])
            stack.append(u.body)
            stack.append("," + _name(u.binder) + "]")
            stack.append(u.value)
        elif isinstance(u, Der):
            pieces.append("[" + _name(u.head) + "?" + _name(u.binder) + "]")
            stack.append(u.body)
        elif isinstance(u, TensElim):
            pieces.append("[" + _name(u.head) + "@" + _name(u.left_binder)
                          + "," + _name(u.right_binder) + "]")
            stack.append(u.body)
        else:
            raise TypeError(f"not a term: {u!r}")
    return "".join(pieces)
