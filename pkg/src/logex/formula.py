"""Propositional formula AST with parser, printer, and truth-table semantics.

Formulas are immutable. Conjunction and disjunction are stored as flattened
n-ary nodes (never nested inside a node of the same connective), so formulas
that differ only in parenthesization of a same-operator chain are structurally
equal. Operand order is preserved: commutativity is a rewrite step, not a
structural identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class FormulaError(Exception):
    """Base class for errors raised by this module."""


class FormulaSyntaxError(FormulaError):
    """Parse failure with position, offending token, and a repair suggestion."""

    def __init__(self, offset: int, found: str, expected: str, suggestion: str):
        self.offset = offset
        self.found = found
        self.expected = expected
        self.suggestion = suggestion
        super().__init__(
            f"syntax error at offset {offset}: expected {expected}, "
            f"found {found} ({suggestion})"
        )


class EvaluationError(FormulaError):
    """A valuation does not cover every atom of the formula."""


class TooManyAtomsError(FormulaError):
    """Truth-table operations refuse formulas with more than MAX_ATOMS atoms."""


class InvalidPositionError(FormulaError):
    """A position does not exist in the target formula."""


MAX_ATOMS = 20


class Formula:
    """Base class for all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "T" if self.value else "F"


def _install_cached_hash(cls):
    # Formulas are immutable and hashed heavily by the rule engine; caching
    # the dataclass hash on first use keeps deep trees cheap to rehash.
    generated = cls.__hash__

    def cached(self):
        h = self.__dict__.get("_cached_hash")
        if h is None:
            h = generated(self)
            object.__setattr__(self, "_cached_hash", h)
        return h

    cls.__hash__ = cached


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, repr=False)
class Neg(Formula):
    child: Formula

    def __repr__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class And(Formula):
    operands: tuple[Formula, ...]

    def __repr__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Or(Formula):
    operands: tuple[Formula, ...]

    def __repr__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Imp(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return format_formula(self)


for _cls in (Atom, Const, Neg, And, Or, Imp, Iff):
    _install_cached_hash(_cls)
del _cls


def conj(operands: Iterable[Formula]) -> Formula:
    """Build a conjunction, splicing nested And nodes and collapsing singletons."""
    ops: list[Formula] = []
    for op in operands:
        if isinstance(op, And):
            ops.extend(op.operands)
        else:
            ops.append(op)
    if not ops:
        raise ValueError("conjunction needs at least one operand")
    if len(ops) == 1:
        return ops[0]
    return And(tuple(ops))


def disj(operands: Iterable[Formula]) -> Formula:
    """Build a disjunction, splicing nested Or nodes and collapsing singletons."""
    ops: list[Formula] = []
    for op in operands:
        if isinstance(op, Or):
            ops.extend(op.operands)
        else:
            ops.append(op)
    if not ops:
        raise ValueError("disjunction needs at least one operand")
    if len(ops) == 1:
        return ops[0]
    return Or(tuple(ops))


def flatten(f: Formula) -> Formula:
    """Rebuild a formula so the n-ary flattening invariant holds everywhere."""
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Neg):
        return Neg(flatten(f.child))
    if isinstance(f, And):
        return conj(flatten(op) for op in f.operands)
    if isinstance(f, Or):
        return disj(flatten(op) for op in f.operands)
    if isinstance(f, Imp):
        return Imp(flatten(f.lhs), flatten(f.rhs))
    if isinstance(f, Iff):
        return Iff(flatten(f.lhs), flatten(f.rhs))
    raise TypeError(f"not a formula: {f!r}")


def structurally_equal(a: Formula, b: Formula) -> bool:
    """Exact AST equality, including operand order."""
    return a == b


def atom_names(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        elif isinstance(g, Neg):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(g.operands)
        elif isinstance(g, (Imp, Iff)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas, preorder."""
    yield f
    if isinstance(f, Neg):
        yield from subformulas(f.child)
    elif isinstance(f, (And, Or)):
        for op in f.operands:
            yield from subformulas(op)
    elif isinstance(f, (Imp, Iff)):
        yield from subformulas(f.lhs)
        yield from subformulas(f.rhs)


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


# ---------------------------------------------------------------------------
# Printing

_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NEG = 1, 2, 3, 4, 5

_CONNECTIVE = {And: " /\\ ", Or: " \\/ "}


def format_formula(f: Formula) -> str:
    """Render as ASCII text in the concrete grammar.

    Composite operands of a connective are parenthesized even where precedence
    would disambiguate (classroom style), except along a right-nested chain of
    implications; same-operator chains are flat by construction and never
    carry internal parentheses.
    """
    return _fmt(f)


def _atomic(g: Formula) -> bool:
    return isinstance(g, (Atom, Const, Neg))


def _wrap(g: Formula) -> str:
    text = _fmt(g)
    return text if _atomic(g) else f"({text})"


def _fmt(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return "T" if f.value else "F"
    if isinstance(f, Neg):
        return "~" + _wrap(f.child)
    if isinstance(f, (And, Or)):
        return _CONNECTIVE[type(f)].join(_wrap(op) for op in f.operands)
    if isinstance(f, Imp):
        rhs = _fmt(f.rhs) if isinstance(f.rhs, Imp) else _wrap(f.rhs)
        return f"{_wrap(f.lhs)} -> {rhs}"
    if isinstance(f, Iff):
        return f"{_wrap(f.lhs)} <-> {_wrap(f.rhs)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->|↔)
  | (?P<imp>->|→)
  | (?P<and>/\\|∧)
  | (?P<or>\\/|∨)
  | (?P<not>~|¬)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<const>[TF])
  | (?P<atom>[a-z][a-z0-9]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            found = text[pos]
            suggestion = "remove or replace this character"
            if found.isupper():
                suggestion = "atom names are lowercase; only T and F are constants"
            raise FormulaSyntaxError(pos, repr(found), "a formula token", suggestion)
        kind = m.lastgroup
        assert kind is not None
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "end of input", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def parse(self) -> Formula:
        f = self.parse_iff()
        tok = self.peek()
        if tok.kind != "end":
            raise FormulaSyntaxError(
                tok.offset,
                repr(tok.text),
                "an operator or end of input",
                "two formulas in a row need a connective between them",
            )
        return f

    def parse_iff(self) -> Formula:
        lhs = self.parse_imp()
        if self.peek().kind != "iff":
            return lhs
        op = self.advance()
        rhs = self.parse_imp(after=op)
        nxt = self.peek()
        if nxt.kind == "iff":
            raise FormulaSyntaxError(
                nxt.offset,
                repr(nxt.text),
                "end of the biconditional",
                "<-> is non-associative; parenthesize one side",
            )
        return Iff(lhs, rhs)

    def parse_imp(self, after: _Token | None = None) -> Formula:
        lhs = self.parse_or(after=after)
        if self.peek().kind != "imp":
            return lhs
        op = self.advance()
        return Imp(lhs, self.parse_imp(after=op))

    def parse_or(self, after: _Token | None = None) -> Formula:
        parts = [self.parse_and(after=after)]
        while self.peek().kind == "or":
            op = self.advance()
            parts.append(self.parse_and(after=op))
        return disj(parts)

    def parse_and(self, after: _Token | None = None) -> Formula:
        parts = [self.parse_unary(after=after)]
        while self.peek().kind == "and":
            op = self.advance()
            parts.append(self.parse_unary(after=op))
        return conj(parts)

    def parse_unary(self, after: _Token | None = None) -> Formula:
        tok = self.peek()
        if tok.kind == "not":
            self.advance()
            return Neg(self.parse_unary(after=tok))
        if tok.kind == "lparen":
            self.advance()
            inner = self.parse_iff()
            closing = self.peek()
            if closing.kind != "rparen":
                raise FormulaSyntaxError(
                    tok.offset,
                    repr(closing.text),
                    "a closing parenthesis",
                    "add ')' to balance the '(' opened here",
                )
            self.advance()
            return inner
        if tok.kind == "const":
            self.advance()
            return TRUE if tok.text == "T" else FALSE
        if tok.kind == "atom":
            self.advance()
            return Atom(tok.text)
        # No formula starts here; blame the operator awaiting an operand.
        if after is not None:
            raise FormulaSyntaxError(
                after.offset,
                repr(after.text),
                f"a formula after {after.text!r}",
                "add the formula this operator is missing",
            )
        raise FormulaSyntaxError(
            tok.offset,
            repr(tok.text),
            "a formula",
            "a formula starts with an atom, T, F, '~' or '('",
        )


def parse(text: str) -> Formula:
    """Parse concrete syntax into a flattened formula.

    Raises FormulaSyntaxError on malformed input; the error names the offset,
    the offending token, what was expected, and a one-line repair suggestion.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Semantics

def evaluate(f: Formula, valuation: Mapping[str, bool]) -> bool:
    """Standard truth-functional evaluation under one valuation."""
    if isinstance(f, Atom):
        try:
            return bool(valuation[f.name])
        except KeyError:
            raise EvaluationError(f"valuation does not cover atom {f.name!r}") from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Neg):
        return not evaluate(f.child, valuation)
    if isinstance(f, And):
        return all(evaluate(op, valuation) for op in f.operands)
    if isinstance(f, Or):
        return any(evaluate(op, valuation) for op in f.operands)
    if isinstance(f, Imp):
        return (not evaluate(f.lhs, valuation)) or evaluate(f.rhs, valuation)
    if isinstance(f, Iff):
        return evaluate(f.lhs, valuation) == evaluate(f.rhs, valuation)
    raise TypeError(f"not a formula: {f!r}")


def _atom_columns(n: int) -> list[int]:
    # Column i holds, as a bit vector over all 2^n valuations, the value of
    # atom i; row r assigns atom i the bit (r >> i) & 1.
    total = 1 << n
    cols = []
    for i in range(n):
        seg = 1 << i
        col = ((1 << seg) - 1) << seg
        width = seg << 1
        while width < total:
            col |= col << width
            width <<= 1
        cols.append(col)
    return cols


def truth_vector(f: Formula, order: list[str]) -> int:
    """Truth table of f as an integer bit vector over all valuations of order.

    Bit r gives the value of f in the valuation that assigns order[i] the bit
    (r >> i) & 1. Every atom of f must occur in order.
    """
    if len(order) > MAX_ATOMS:
        raise TooManyAtomsError(
            f"{len(order)} atoms exceed the {MAX_ATOMS}-atom truth-table limit"
        )
    cols = dict(zip(order, _atom_columns(len(order))))
    mask = (1 << (1 << len(order))) - 1

    def walk(g: Formula) -> int:
        if isinstance(g, Atom):
            try:
                return cols[g.name]
            except KeyError:
                raise EvaluationError(f"atom order does not cover {g.name!r}") from None
        if isinstance(g, Const):
            return mask if g.value else 0
        if isinstance(g, Neg):
            return walk(g.child) ^ mask
        if isinstance(g, And):
            v = mask
            for op in g.operands:
                v &= walk(op)
            return v
        if isinstance(g, Or):
            v = 0
            for op in g.operands:
                v |= walk(op)
            return v
        if isinstance(g, Imp):
            return (walk(g.lhs) ^ mask) | walk(g.rhs)
        if isinstance(g, Iff):
            return (walk(g.lhs) ^ walk(g.rhs)) ^ mask
        raise TypeError(f"not a formula: {g!r}")

    return walk(f)


def equivalent(a: Formula, b: Formula) -> bool:
    """Semantic equivalence over all valuations of the combined atom set.

    Raises TooManyAtomsError beyond MAX_ATOMS distinct atoms (resource guard;
    exercises stay far below it).
    """
    order = sorted(atom_names(a) | atom_names(b))
    return truth_vector(a, order) == truth_vector(b, order)


def tautology(f: Formula) -> bool:
    order = sorted(atom_names(f))
    return truth_vector(f, order) == (1 << (1 << len(order))) - 1


# ---------------------------------------------------------------------------
# Positions

@dataclass(frozen=True)
class Position:
    """A place inside a formula where a rewrite applies.

    path walks child indices from the root (Neg has child 0; Imp/Iff have 0
    and 1). span, only meaningful when the path lands on an And/Or node,
    selects the contiguous operand range [start, start+length) of that node
    as one virtual subformula of the same connective.
    """

    path: tuple[int, ...] = ()
    span: tuple[int, int] | None = None

    def __repr__(self):
        if self.span is None:
            return f"Position({list(self.path)})"
        return f"Position({list(self.path)}, span={self.span})"


ROOT = Position()


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Neg):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return f.operands
    if isinstance(f, (Imp, Iff)):
        return (f.lhs, f.rhs)
    return ()


def _node_at(f: Formula, path: tuple[int, ...]) -> Formula:
    node = f
    for i in path:
        kids = _children(node)
        if i < 0 or i >= len(kids):
            raise InvalidPositionError(f"path {list(path)} does not exist in {node}")
        node = kids[i]
    return node


def _check_span(node: Formula, span: tuple[int, int]) -> None:
    start, length = span
    if length < 1:
        raise InvalidPositionError(f"span {span} has length < 1")
    if length >= 2 and not isinstance(node, (And, Or)):
        raise InvalidPositionError(f"span {span} selected at a non-n-ary node {node}")
    arity = len(_children(node)) if isinstance(node, (And, Or)) else 1
    if isinstance(node, (And, Or)):
        if start < 0 or start + length > arity:
            raise InvalidPositionError(f"span {span} out of range for {node}")
    elif span != (0, 1):
        raise InvalidPositionError(f"span {span} out of range for {node}")


def subformula_at(f: Formula, pos: Position) -> Formula:
    """The (possibly virtual) subformula selected by pos."""
    node = _node_at(f, pos.path)
    if pos.span is None:
        return node
    _check_span(node, pos.span)
    if not isinstance(node, (And, Or)):
        return node
    start, length = pos.span
    selected = node.operands[start : start + length]
    if length == 1:
        return selected[0]
    return And(selected) if isinstance(node, And) else Or(selected)


def replace_at(f: Formula, pos: Position, g: Formula) -> Formula:
    """Replace the subformula at pos with g, re-flattening along the way."""
    subformula_at(f, pos)  # validates
    return _replace(f, pos.path, pos.span, g)


def _replace(node, path, span, g):
    if path:
        i, rest = path[0], path[1:]
        if isinstance(node, Neg):
            return Neg(_replace(node.child, rest, span, g))
        if isinstance(node, (Imp, Iff)):
            pair = [node.lhs, node.rhs]
            pair[i] = _replace(pair[i], rest, span, g)
            return type(node)(pair[0], pair[1])
        ops = list(node.operands)
        ops[i] = _replace(ops[i], rest, span, g)
        return conj(ops) if isinstance(node, And) else disj(ops)
    if span is None or not isinstance(node, (And, Or)):
        return flatten(g) if isinstance(g, (And, Or)) else g
    start, length = span
    if length == len(node.operands):
        return flatten(g) if isinstance(g, (And, Or)) else g
    ops = list(node.operands)
    ops[start : start + length] = [g]
    return conj(ops) if isinstance(node, And) else disj(ops)


def _position_key(p: Position):
    start, length = p.span if p.span is not None else (-1, 0)
    return (len(p.path), p.path, p.span is not None, start, -length)


def positions_with_subformulas(
    f: Formula, spans: bool = True
) -> list[tuple[Position, Formula]]:
    """All (position, selected subformula) pairs of f in one pass, outermost
    first (shorter paths before longer, left to right); span positions of a
    node follow the node itself, wider spans before narrower ones at the
    same start. Span subformulas are the virtual same-connective nodes."""
    out: list[tuple[Position, Formula]] = []

    def walk(node: Formula, path: tuple[int, ...]):
        out.append((Position(path), node))
        if spans and isinstance(node, (And, Or)):
            arity = len(node.operands)
            cls = type(node)
            for start in range(arity):
                for length in range(min(arity - start, arity - 1), 1, -1):
                    out.append(
                        (
                            Position(path, (start, length)),
                            cls(node.operands[start : start + length]),
                        )
                    )
        for i, child in enumerate(_children(node)):
            walk(child, path + (i,))

    walk(f, ())
    out.sort(key=lambda pair: _position_key(pair[0]))
    return out


def positions(f: Formula, spans: bool = True) -> list[Position]:
    """All positions of f, in the order of positions_with_subformulas."""
    return [pos for pos, _ in positions_with_subformulas(f, spans)]
