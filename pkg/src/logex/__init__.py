"""Tutoring engine for rewriting propositional formulas with standard equivalences."""

from logex.formula import (
    And,
    Atom,
    Const,
    FALSE,
    Formula,
    FormulaSyntaxError,
    Iff,
    Imp,
    Neg,
    Or,
    Position,
    ROOT,
    TRUE,
    equivalent,
    evaluate,
    flatten,
    format_formula,
    parse,
    replace_at,
    structurally_equal,
    subformula_at,
)

__all__ = [
    "And",
    "Atom",
    "Const",
    "FALSE",
    "Formula",
    "FormulaSyntaxError",
    "Iff",
    "Imp",
    "Neg",
    "Or",
    "Position",
    "ROOT",
    "TRUE",
    "equivalent",
    "evaluate",
    "flatten",
    "format_formula",
    "parse",
    "replace_at",
    "structurally_equal",
    "subformula_at",
]
