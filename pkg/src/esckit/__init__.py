"""esckit: a cut-elimination workbench for linear-logic proof terms.

The package ships a term representation with split cuts, a parser and
printer, a properness checker, a simple type inferencer, a tree-rewriting
oracle for the cut-elimination rules, two abstract machines (a stack machine
for closed terms and a graph machine for open reduction), benchmark term
families, and a command line front end.
"""

from .terms import (
    Kind,
    VarId,
    Term,
    Var,
    Abs,
    Bang,
    Pair,
    Cut,
    Sub,
    Der,
    TensElim,
    alpha_eq,
    free_vars,
    gc,
    size,
)
from .syntax import parse, pretty, ParseError, BindingError

__all__ = [
    "Kind", "VarId", "Term", "Var", "Abs", "Bang", "Pair", "Cut", "Sub",
    "Der", "TensElim", "alpha_eq", "free_vars", "gc", "size",
    "parse", "pretty", "ParseError", "BindingError",
]

__version__ = "0.1.0"
