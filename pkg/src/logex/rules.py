"""The standard-equivalence rule catalog, buggy-rule catalog, and rule application.

Rules are schematic rewrite pairs over metavariables. Single metavariables
(PVar) match one formula; sequence metavariables (PSeq) match a run of
operands inside an n-ary node, which is what makes DeMorgan and distribution
generalized: they rewrite a whole flattened node in one step. Commutative
variants swap the top-level operands of a rule's left-hand side and carry
their own matched right-hand side.

Applying a rule inside a wider n-ary node goes through span positions: the
selected contiguous operand range acts as one virtual subformula. Non-adjacent
operands always require an explicit commutativity step first.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

from logex.formula import (
    And,
    Atom,
    Const,
    FALSE,
    Formula,
    Neg,
    Or,
    Imp,
    Iff,
    Position,
    TRUE,
    conj,
    disj,
    replace_at,
    subformula_at,
)


class RuleError(Exception):
    pass


class NoMatchError(RuleError):
    """The rule pattern does not match at the given position."""


class UnknownRuleError(RuleError):
    pass


# ---------------------------------------------------------------------------
# Pattern language

@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PSeq:
    """Matches a run of at least min_len operands of an n-ary node."""

    name: str
    min_len: int = 1


@dataclass(frozen=True)
class PHole:
    """Placeholder inside a PEach template for the current sequence element."""


@dataclass(frozen=True)
class PEach:
    """Right-hand-side item: expand a bound sequence elementwise through template."""

    seq: str
    template: "Pattern"


@dataclass(frozen=True)
class PConst:
    value: bool


@dataclass(frozen=True)
class PNeg:
    child: "Pattern"


@dataclass(frozen=True)
class PNary:
    """An And/Or pattern; items may contain at most one PSeq."""

    connective: str  # "and" | "or"
    items: tuple


@dataclass(frozen=True)
class PBin:
    connective: str  # "imp" | "iff"
    lhs: "Pattern"
    rhs: "Pattern"


Pattern = Union[PVar, PSeq, PHole, PEach, PConst, PNeg, PNary, PBin]

Binding = dict[str, Union[Formula, tuple]]


def pand(*items) -> PNary:
    return PNary("and", items)


def por(*items) -> PNary:
    return PNary("or", items)


_NARY_TYPE = {"and": And, "or": Or}


def match(pat: Pattern, f: Formula, binding: Binding | None = None) -> Binding | None:
    """Match f against pat, extending binding; None when it does not match."""
    b: Binding = dict(binding) if binding else {}
    return b if _match(pat, f, b) else None


def _match(pat, f, b) -> bool:
    if isinstance(pat, PVar):
        if pat.name in b:
            return b[pat.name] == f
        b[pat.name] = f
        return True
    if isinstance(pat, PHole):
        if _HOLE_KEY in b:
            return b[_HOLE_KEY] == f
        b[_HOLE_KEY] = f
        return True
    if isinstance(pat, PConst):
        return isinstance(f, Const) and f.value == pat.value
    if isinstance(pat, PNeg):
        return isinstance(f, Neg) and _match(pat.child, f.child, b)
    if isinstance(pat, PBin):
        want = Imp if pat.connective == "imp" else Iff
        return (
            isinstance(f, want)
            and _match(pat.lhs, f.lhs, b)
            and _match(pat.rhs, f.rhs, b)
        )
    if isinstance(pat, PNary):
        if not isinstance(f, _NARY_TYPE[pat.connective]):
            return False
        result = _match_items(pat.items, f.operands, b, pat.connective)
        if result is None:
            return False
        b.clear()
        b.update(result)
        return True
    raise TypeError(f"not a left-hand pattern: {pat!r}")


def _min_needed(items) -> int:
    total = 0
    for it in items:
        if isinstance(it, PSeq):
            total += it.min_len
        elif isinstance(it, PEach):
            total += 2
        else:
            total += 1
    return total


def _match_items(items, operands, b, connective):
    """Segmentation matching of pattern items against a flattened operand list.

    Instantiation splices same-connective values into their parent node, so to
    stay symmetric with it a metavariable inside an n-ary pattern may stand
    for a run of operands, matched as one virtual node of the same connective.
    The search backtracks over run lengths; catalog patterns keep it tiny.
    """
    node_type = _NARY_TYPE[connective]

    def as_value(run):
        return run[0] if len(run) == 1 else node_type(tuple(run))

    def go(i: int, start: int, bind: Binding):
        if i == len(items):
            return bind if start == len(operands) else None
        item = items[i]
        rest = operands[start:]
        budget = len(rest) - _min_needed(items[i + 1 :])
        if isinstance(item, PSeq):
            if item.name in bind:
                want = tuple(bind[item.name])
                if tuple(rest[: len(want)]) == want and len(want) <= budget:
                    return go(i + 1, start + len(want), bind)
                return None
            for k in range(item.min_len, budget + 1):
                nxt = dict(bind)
                nxt[item.name] = tuple(rest[:k])
                out = go(i + 1, start + k, nxt)
                if out is not None:
                    return out
            return None
        if isinstance(item, PEach):
            bound = bind.get(item.seq)
            lengths = [len(bound)] if bound is not None else range(2, budget + 1)
            for k in lengths:
                if k > budget:
                    continue
                nxt = dict(bind)
                captured = []
                ok = True
                for op in rest[:k]:
                    hole = _match_template(item.template, op, nxt)
                    if hole is None:
                        ok = False
                        break
                    captured.append(hole)
                if not ok:
                    continue
                if bound is not None and tuple(captured) != tuple(bound):
                    continue
                nxt[item.seq] = tuple(captured)
                out = go(i + 1, start + k, nxt)
                if out is not None:
                    return out
            return None
        if isinstance(item, (PVar, PHole)):
            name = item.name if isinstance(item, PVar) else _HOLE_KEY
            if name in bind:
                want = bind[name]
                if isinstance(want, node_type):
                    k = len(want.operands)
                    if k <= budget and tuple(rest[:k]) == want.operands:
                        return go(i + 1, start + k, bind)
                    return None
                if rest and rest[0] == want:
                    return go(i + 1, start + 1, bind)
                return None
            for k in range(1, max(budget, 0) + 1):
                nxt = dict(bind)
                nxt[name] = as_value(rest[:k])
                out = go(i + 1, start + k, nxt)
                if out is not None:
                    return out
            return None
        if not rest:
            return None
        nxt = dict(bind)
        if not _match(item, rest[0], nxt):
            return None
        return go(i + 1, start + 1, nxt)

    return go(0, 0, dict(b))


_HOLE_KEY = "__hole__"


def _match_template(template, f, b) -> Formula | None:
    """Match f against a one-hole template, returning what the hole captured.

    Metavariables bound while matching one element constrain the next ones,
    which is what forces the shared part of a factoring step to be identical
    across operands.
    """
    local: Binding = dict(b)
    local.pop(_HOLE_KEY, None)
    if not _match(template, f, local):
        return None
    hole = local.pop(_HOLE_KEY, None)
    if hole is None:
        return None
    b.update(local)
    return hole


class UnboundMetavariableError(RuleError):
    """Instantiation needs a metavariable the match did not bind."""


def instantiate(pat: Pattern, b: Binding, hole: Formula | None = None) -> Formula:
    if isinstance(pat, PVar):
        try:
            got = b[pat.name]
        except KeyError:
            raise UnboundMetavariableError(pat.name) from None
        assert isinstance(got, Formula)
        return got
    if isinstance(pat, PHole):
        if hole is None:
            raise UnboundMetavariableError("hole outside PEach")
        return hole
    if isinstance(pat, PConst):
        return TRUE if pat.value else FALSE
    if isinstance(pat, PNeg):
        return Neg(instantiate(pat.child, b, hole))
    if isinstance(pat, PBin):
        node = Imp if pat.connective == "imp" else Iff
        return node(instantiate(pat.lhs, b, hole), instantiate(pat.rhs, b, hole))
    if isinstance(pat, PNary):
        ops: list[Formula] = []
        for item in pat.items:
            if isinstance(item, PSeq):
                got = b.get(item.name)
                if got is None:
                    raise UnboundMetavariableError(item.name)
                ops.extend(got)
            elif isinstance(item, PEach):
                got = b.get(item.seq)
                if got is None:
                    raise UnboundMetavariableError(item.seq)
                ops.extend(instantiate(item.template, b, elem) for elem in got)
            else:
                ops.append(instantiate(item, b, hole))
        return conj(ops) if pat.connective == "and" else disj(ops)
    raise TypeError(f"cannot instantiate {pat!r}")


def pattern_vars(pat: Pattern) -> set[str]:
    """Names of all metavariables (single and sequence) in a pattern."""
    out: set[str] = set()

    def walk(x):
        if isinstance(x, PVar):
            out.add(x.name)
        elif isinstance(x, PSeq):
            out.add(x.name)
        elif isinstance(x, PEach):
            out.add(x.seq)
            walk(x.template)
        elif isinstance(x, PNeg):
            walk(x.child)
        elif isinstance(x, PBin):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, PNary):
            for it in x.items:
                walk(it)

    walk(pat)
    return out


# ---------------------------------------------------------------------------
# Rules

LTR = "ltr"
RTL = "rtl"


@dataclass(frozen=True)
class RuleVariant:
    id: str
    lhs: Pattern
    rhs: Pattern


@dataclass(frozen=True)
class Rule:
    id: str
    schema: str
    variants: tuple[RuleVariant, ...]
    permutation: bool = False  # commutativity: matched as an operand permutation

    def directions(self) -> tuple[str, ...]:
        return (LTR,) if self.permutation else (LTR, RTL)


@dataclass(frozen=True)
class BuggyRule:
    id: str
    lhs: Pattern
    rhs: Pattern
    message: str
    witness: Mapping[str, object]
    distinct: tuple[str, str] | None = None


@dataclass(frozen=True)
class RuleApplication:
    rule_id: str
    variant: str
    direction: str
    position: Position
    before: Formula
    after: Formula

    def describe(self) -> str:
        arrow = "" if self.direction == LTR else " (reversed)"
        return f"{self.rule_id}{arrow}"


def _commuted(variant: RuleVariant, rhs: Pattern | None = None) -> RuleVariant:
    """Swap the two top-level operands of a binary n-ary lhs pattern."""
    lhs = variant.lhs
    assert isinstance(lhs, PNary) and len(lhs.items) == 2
    swapped = PNary(lhs.connective, (lhs.items[1], lhs.items[0]))
    return RuleVariant("comm", swapped, rhs if rhs is not None else variant.rhs)


PHI, PSI, CHI = PVar("phi"), PVar("psi"), PVar("chi")
OPS = PSeq("ops", 2)
PARTS = PSeq("parts", 1)
ALTS = PSeq("alts", 2)
REST = PSeq("rest", 1)


def _base(lhs, rhs) -> RuleVariant:
    return RuleVariant("base", lhs, rhs)


def _build_standard() -> tuple[Rule, ...]:
    rules: list[Rule] = []

    def add(rule_id, schema, *variants, permutation=False):
        rules.append(Rule(rule_id, schema, tuple(variants), permutation))

    add(
        "implication-def",
        "phi -> psi  =  ~phi \\/ psi",
        _base(PBin("imp", PHI, PSI), por(PNeg(PHI), PSI)),
    )
    add(
        "equivalence-def",
        "phi <-> psi  =  (phi /\\ psi) \\/ (~phi /\\ ~psi)",
        _base(
            PBin("iff", PHI, PSI),
            por(pand(PHI, PSI), pand(PNeg(PHI), PNeg(PSI))),
        ),
    )
    add(
        "demorgan-and",
        "~(phi /\\ psi)  =  ~phi \\/ ~psi",
        _base(PNeg(pand(OPS)), por(PEach("ops", PNeg(PHole())))),
    )
    add(
        "demorgan-or",
        "~(phi \\/ psi)  =  ~phi /\\ ~psi",
        _base(PNeg(por(OPS)), pand(PEach("ops", PNeg(PHole())))),
    )
    add("double-negation", "~~phi  =  phi", _base(PNeg(PNeg(PHI)), PHI))
    add("idempotency-and", "phi /\\ phi  =  phi", _base(pand(PHI, PHI), PHI))
    add("idempotency-or", "phi \\/ phi  =  phi", _base(por(PHI, PHI), PHI))
    absorption_or = _base(por(PHI, pand(PHI, REST)), PHI)
    add(
        "absorption-or",
        "phi \\/ (phi /\\ psi)  =  phi",
        absorption_or,
        _commuted(absorption_or),
    )
    absorption_and = _base(pand(PHI, por(PHI, REST)), PHI)
    add(
        "absorption-and",
        "phi /\\ (phi \\/ psi)  =  phi",
        absorption_and,
        _commuted(absorption_and),
    )
    add(
        "distr-and-over-or",
        "phi /\\ (psi \\/ chi)  =  (phi /\\ psi) \\/ (phi /\\ chi)",
        _base(pand(PARTS, por(ALTS)), por(PEach("alts", pand(PARTS, PHole())))),
        RuleVariant(
            "comm",
            pand(por(ALTS), PARTS),
            por(PEach("alts", pand(PHole(), PARTS))),
        ),
    )
    add(
        "distr-or-over-and",
        "phi \\/ (psi /\\ chi)  =  (phi \\/ psi) /\\ (phi \\/ chi)",
        _base(por(PARTS, pand(ALTS)), pand(PEach("alts", por(PARTS, PHole())))),
        RuleVariant(
            "comm",
            por(pand(ALTS), PARTS),
            pand(PEach("alts", por(PHole(), PARTS))),
        ),
    )
    add("commutativity-and", "phi /\\ psi  =  psi /\\ phi", permutation=True)
    add("commutativity-or", "phi \\/ psi  =  psi \\/ phi", permutation=True)
    complement_or = _base(por(PHI, PNeg(PHI)), PConst(True))
    add(
        "complement-or",
        "phi \\/ ~phi  =  T",
        complement_or,
        _commuted(complement_or),
    )
    complement_and = _base(pand(PHI, PNeg(PHI)), PConst(False))
    add(
        "complement-and",
        "phi /\\ ~phi  =  F",
        complement_and,
        _commuted(complement_and),
    )
    true_and = _base(pand(PHI, PConst(True)), PHI)
    add("true-and", "phi /\\ T  =  phi", true_and, _commuted(true_and))
    false_or = _base(por(PHI, PConst(False)), PHI)
    add("false-or", "phi \\/ F  =  phi", false_or, _commuted(false_or))
    true_or = _base(por(PHI, PConst(True)), PConst(True))
    add("true-or", "phi \\/ T  =  T", true_or, _commuted(true_or))
    false_and = _base(pand(PHI, PConst(False)), PConst(False))
    add("false-and", "phi /\\ F  =  F", false_and, _commuted(false_and))
    add("not-true", "~T  =  F", _base(PNeg(PConst(True)), PConst(False)))
    add("not-false", "~F  =  T", _base(PNeg(PConst(False)), PConst(True)))
    return tuple(rules)


_STANDARD: tuple[Rule, ...] = _build_standard()
_BY_ID = {rule.id: rule for rule in _STANDARD}


def standard_rules() -> tuple[Rule, ...]:
    """The fixed standard-equivalence catalog, in stable order."""
    return _STANDARD


def rule_by_id(rule_id: str) -> Rule:
    try:
        return _BY_ID[rule_id]
    except KeyError:
        raise UnknownRuleError(f"unknown rule id {rule_id!r}") from None


def rule_sheet() -> list[dict[str, str]]:
    """Machine-readable rule sheet (id and schema text) for UI rule panels."""
    return [{"id": rule.id, "schema": rule.schema} for rule in _STANDARD]


def _w(**kw) -> dict:
    return kw


_P, _Q, _R = Atom("p"), Atom("q"), Atom("r")


def _build_buggy() -> tuple[BuggyRule, ...]:
    return (
        BuggyRule(
            "buggy-demorgan-keeps-disjunction",
            PNeg(por(OPS)),
            por(PEach("ops", PNeg(PHole()))),
            "Not correct: when applying DeMorgan's rule, "
            "a disjunction is transformed into a conjunction.",
            _w(ops=(_P, _Q)),
        ),
        BuggyRule(
            "buggy-demorgan-keeps-conjunction",
            PNeg(pand(OPS)),
            pand(PEach("ops", PNeg(PHole()))),
            "Not correct: when applying DeMorgan's rule, "
            "a conjunction is transformed into a disjunction.",
            _w(ops=(_P, _Q)),
        ),
        BuggyRule(
            "buggy-demorgan-no-negation-or",
            PNeg(por(OPS)),
            pand(PEach("ops", PHole())),
            "DeMorgan's rule also negates each operand; "
            "the negation does not simply disappear.",
            _w(ops=(_P, _Q)),
        ),
        BuggyRule(
            "buggy-demorgan-no-negation-and",
            PNeg(pand(OPS)),
            por(PEach("ops", PHole())),
            "DeMorgan's rule also negates each operand; "
            "the negation does not simply disappear.",
            _w(ops=(_P, _Q)),
        ),
        BuggyRule(
            "buggy-compound-complement",
            pand(por(PHI, PSI), por(PNeg(PHI), PNeg(PSI))),
            PConst(False),
            "These two disjunctions are not each other's complement: "
            "both can be true at the same time, so this is not F.",
            _w(phi=_P, psi=_Q),
        ),
        BuggyRule(
            "buggy-implication-wrong-negation",
            PBin("imp", PHI, PSI),
            por(PHI, PNeg(PSI)),
            "When eliminating an implication, the antecedent is negated, "
            "not the consequent: phi -> psi becomes ~phi \\/ psi.",
            _w(phi=_P, psi=_Q),
        ),
        BuggyRule(
            "buggy-distribution-dropped-operand",
            pand(PHI, por(PSI, CHI)),
            por(pand(PHI, PSI), CHI),
            "Distribution combines the outer operand with every "
            "alternative: one of them lost its conjunct here.",
            _w(phi=_P, psi=_Q, chi=_R),
        ),
        BuggyRule(
            "buggy-absorption-wrong-side",
            por(PHI, pand(PHI, PSI)),
            pand(PHI, PSI),
            "Absorption keeps the simple operand, not the compound one: "
            "phi \\/ (phi /\\ psi) equals phi.",
            _w(phi=_P, psi=_Q),
        ),
        BuggyRule(
            "buggy-double-negation-removes-one",
            PNeg(PNeg(PHI)),
            PNeg(PHI),
            "Double negation removes two negations at once, not one.",
            _w(phi=_P),
        ),
        BuggyRule(
            "buggy-idempotency-different-operands-or",
            por(PHI, PSI),
            PHI,
            "Idempotency only collapses two identical operands; "
            "these two differ.",
            _w(phi=_P, psi=_Q),
            distinct=("phi", "psi"),
        ),
        BuggyRule(
            "buggy-idempotency-different-operands-and",
            pand(PHI, PSI),
            PHI,
            "Idempotency only collapses two identical operands; "
            "these two differ.",
            _w(phi=_P, psi=_Q),
            distinct=("phi", "psi"),
        ),
    )


_BUGGY: tuple[BuggyRule, ...] = _build_buggy()


def buggy_rules() -> tuple[BuggyRule, ...]:
    """The fixed buggy-rule catalog, in stable (tie-break) order."""
    return _BUGGY


# ---------------------------------------------------------------------------
# Application

def _is_permutation(before: Formula, after: Formula, connective) -> bool:
    if not isinstance(before, connective) or not isinstance(after, connective):
        return False
    if before.operands == after.operands:
        return False
    return Counter(before.operands) == Counter(after.operands)


@lru_cache(maxsize=None)
def rule_tops(rule: Rule) -> tuple:
    """Node types the rule's left-hand side can possibly match."""
    if rule.permutation:
        return (And,) if rule.id.endswith("and") else (Or,)
    tops = {_pattern_top(var.lhs) for var in rule.variants}
    return tuple(object if t is None else t for t in tops)


@lru_cache(maxsize=None)
def _pattern_top(pat: Pattern):
    """The only node type this pattern can match at the top, or None for any."""
    if isinstance(pat, PNary):
        return _NARY_TYPE[pat.connective]
    if isinstance(pat, PNeg):
        return Neg
    if isinstance(pat, PBin):
        return Imp if pat.connective == "imp" else Iff
    if isinstance(pat, PConst):
        return Const
    return None


@lru_cache(maxsize=200_000)
def variant_result(
    variant: RuleVariant, direction: str, sub: Formula
) -> Formula | None:
    """Rewrite the (virtual) subformula sub by one variant, or None.

    Pure and cached: derivations re-probe unchanged regions step after step.
    """
    src, dst = (variant.lhs, variant.rhs) if direction == LTR else (variant.rhs, variant.lhs)
    top = _pattern_top(src)
    if top is not None and not isinstance(sub, top):
        return None
    binding = match(src, sub)
    if binding is None:
        return None
    try:
        return instantiate(dst, binding)
    except UnboundMetavariableError:
        # The reversed pattern does not determine the output (e.g. rewriting
        # T into phi \/ ~phi); such steps can be recognized but not applied.
        return None


def try_apply(
    rule: Rule | str,
    f: Formula,
    pos: Position,
    direction: str = LTR,
    variant: str | None = None,
) -> tuple[Formula, str] | None:
    """Apply one rule at pos, returning (result, variant id), or None.

    Commutativity applies as a swap of the two selected operands (wider
    reorderings compose from adjacent swaps; recognition accepts any one-node
    permutation as a single step).
    """
    if isinstance(rule, str):
        rule = rule_by_id(rule)
    sub = subformula_at(f, pos)
    if rule.permutation:
        want = And if rule.id.endswith("and") else Or
        if not isinstance(sub, want) or len(sub.operands) != 2:
            return None
        swapped = want((sub.operands[1], sub.operands[0]))
        return replace_at(f, pos, swapped), "permute"
    if direction not in rule.directions():
        return None
    for var in rule.variants:
        if variant is not None and var.id != variant:
            continue
        result = variant_result(var, direction, sub)
        if result is not None:
            return replace_at(f, pos, result), var.id
    return None


def apply_rule(
    rule: Rule | str,
    f: Formula,
    pos: Position,
    direction: str = LTR,
    variant: str | None = None,
) -> Formula:
    """Like try_apply, but raises NoMatchError when nothing matches."""
    got = try_apply(rule, f, pos, direction, variant)
    if got is None:
        rule_id = rule if isinstance(rule, str) else rule.id
        raise NoMatchError(f"{rule_id} does not match at {pos}")
    return got[0]


def match_rule_at(
    rule: Rule, sub: Formula, residue: Formula
) -> list[tuple[str, str]]:
    """All (variant id, direction) pairs rewriting sub into residue."""
    found: list[tuple[str, str]] = []
    if rule.permutation:
        want = And if rule.id.endswith("and") else Or
        if _is_permutation(sub, residue, want):
            found.append(("permute", LTR))
        return found
    for var in rule.variants:
        for direction in rule.directions():
            src, dst = (var.lhs, var.rhs) if direction == LTR else (var.rhs, var.lhs)
            src_top, dst_top = _pattern_top(src), _pattern_top(dst)
            if src_top is not None and not isinstance(sub, src_top):
                continue
            if dst_top is not None and not isinstance(residue, dst_top):
                continue
            binding = match(src, sub)
            if binding is None:
                continue
            binding = match(dst, residue, binding)
            if binding is not None:
                found.append((var.id, direction))
    return found


def match_buggy_at(buggy: BuggyRule, sub: Formula, residue: Formula) -> bool:
    src_top, dst_top = _pattern_top(buggy.lhs), _pattern_top(buggy.rhs)
    if src_top is not None and not isinstance(sub, src_top):
        return False
    if dst_top is not None and not isinstance(residue, dst_top):
        return False
    binding = match(buggy.lhs, sub)
    if binding is None:
        return False
    binding = match(buggy.rhs, residue, binding)
    if binding is None:
        return False
    if buggy.distinct is not None:
        a, b = buggy.distinct
        if binding.get(a) == binding.get(b):
            return False
    return True
