"""Single-step diagnosis: syntax, no-op, rule recognition, semantics, buggy rules.

The recognizer works by aligned tree diff: for every position of the old
formula it computes the unique replacement (the residual) that would turn the
old formula into the new one there, then matches rule patterns two-sidedly
against the selected subformula and that residual. Matching both sides makes
reversed applications recognizable even when the reversed pattern alone would
not determine the output (a student rewriting T into p \\/ ~p is recognized
as a reversed complement step).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from logex.formula import (
    And,
    Formula,
    FormulaSyntaxError,
    Iff,
    Imp,
    Neg,
    Or,
    Position,
    conj,
    disj,
    equivalent,
    parse,
    positions,
    structurally_equal,
    subformula_at,
)
from logex.rules import (
    BuggyRule,
    LTR,
    RuleApplication,
    buggy_rules,
    match_buggy_at,
    match_rule_at,
    standard_rules,
)

STRICT = "strict"
LENIENT = "lenient"

# Diagnosis kinds
SYNTAX_ERROR = "syntax-error"
NOOP = "noop"
CORRECT = "correct"
WRONG_RULE_NAME = "wrong-rule-name"
BUGGY = "buggy"
BUGGY_EQUIVALENT = "buggy-equivalent"
NOT_EQUIVALENT = "not-equivalent"
EQUIVALENT_UNRECOGNIZED = "equivalent-unrecognized"


@dataclass(frozen=True)
class StepSubmission:
    before: Formula
    after_text: str
    claimed_rule: str | None = None
    mode: str = LENIENT  # STRICT: a correct rule name is required (proofs)
    direction: str = "forward"


@dataclass(frozen=True)
class Advisory:
    kind: str  # absorption-available | solution-longer-than-worked | diverged-from-strategy
    message: str
    position: Position | None = None


@dataclass(frozen=True)
class Diagnosis:
    kind: str
    accepted: bool
    message: str
    after: Formula | None = None
    application: RuleApplication | None = None
    detected_rule: str | None = None
    claimed_rule: str | None = None
    buggy_rule: str | None = None
    position: Position | None = None
    syntax_error: FormulaSyntaxError | None = None
    advisories: tuple[Advisory, ...] = ()

    def with_advisories(self, advisories) -> "Diagnosis":
        return dataclasses.replace(self, advisories=tuple(advisories))


def position_record(pos: Position | None):
    if pos is None:
        return None
    return {"path": list(pos.path), "span": list(pos.span) if pos.span else None}


def advisory_record(advisory: Advisory) -> dict:
    return {
        "kind": advisory.kind,
        "message": advisory.message,
        "position": position_record(advisory.position),
    }


def diagnosis_record(diag: Diagnosis) -> dict:
    """The serialized form shared by the HTTP API, the CLI, and the event log."""
    return {
        "kind": diag.kind,
        "accepted": diag.accepted,
        "message": diag.message,
        "after": str(diag.after) if diag.after is not None else None,
        "ruleId": diag.detected_rule or diag.buggy_rule,
        "claimedRuleId": diag.claimed_rule,
        "position": position_record(diag.position),
        "advisories": [advisory_record(a) for a in diag.advisories],
    }


# ---------------------------------------------------------------------------
# Residuals

def _kids(f: Formula):
    if isinstance(f, Neg):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return f.operands
    if isinstance(f, (Imp, Iff)):
        return (f.lhs, f.rhs)
    return ()


def residual(before: Formula, after: Formula, pos: Position) -> Formula | None:
    """The unique g with replace_at(before, pos, g) == after, or None.

    Accounts for the splicing that replace_at performs inside flattened
    n-ary nodes: a residual inside an And/Or is reconstructed from the
    operand run left over once the unchanged prefix and suffix are aligned.
    """
    node, target = before, after
    path = list(pos.path)
    while path:
        i = path.pop(0)
        if isinstance(node, Neg):
            if not isinstance(target, Neg) or i != 0:
                return None
            node, target = node.child, target.child
            continue
        if isinstance(node, (Imp, Iff)):
            if type(target) is not type(node) or i not in (0, 1):
                return None
            same = [node.lhs, node.rhs]
            other = [target.lhs, target.rhs]
            if same[1 - i] != other[1 - i]:
                return None
            node, target = same[i], other[i]
            continue
        if isinstance(node, (And, Or)):
            if i >= len(node.operands):
                return None
            child = node.operands[i]
            if not path and not (
                pos.span is not None
                and isinstance(child, (And, Or))
                and pos.span[1] < len(child.operands)
            ):
                # Replacing the whole operand (or a full span of it) splices
                # into this node, so align here as the span (i, 1).
                return _span_residual(node, target, i, 1)
            # Aligned descent: a deeper change cannot alter this node's arity.
            if type(target) is not type(node) or len(target.operands) != len(
                node.operands
            ):
                return None
            for j, (a, b) in enumerate(zip(node.operands, target.operands)):
                if j != i and a != b:
                    return None
            node, target = child, target.operands[i]
            continue
        return None
    if pos.span is None or not isinstance(node, (And, Or)):
        return target
    start, length = pos.span
    if length >= len(node.operands):
        return target
    return _span_residual(node, target, start, length)


def _span_residual(node, target, start, length):
    if type(target) is not type(node):
        return None
    ops, tops = node.operands, target.operands
    removed = len(ops) - length
    if len(tops) < removed + 1:
        return None
    if ops[:start] != tops[:start]:
        return None
    suffix = len(ops) - start - length
    if suffix and ops[-suffix:] != tops[-suffix:]:
        return None
    middle = tops[start : len(tops) - suffix]
    if len(middle) == 1:
        # A same-connective replacement would have been spliced, so a single
        # leftover operand can only come from a non-spliced replacement.
        return middle[0]
    return conj(middle) if isinstance(node, And) else disj(middle)


def candidate_positions(f: Formula) -> list[Position]:
    """Positions at which a rewrite may have happened, outermost first."""
    return positions(f)


def recognize(before: Formula, after: Formula) -> list[RuleApplication]:
    """Every (rule, variant, direction, position) turning before into after.

    Deterministic order: outermost position first, catalog order as tie-break.
    An empty list means no single standard-rule application explains the step.
    """
    found: list[RuleApplication] = []
    seen = set()
    for pos in candidate_positions(before):
        res = residual(before, after, pos)
        if res is None:
            continue
        sub = subformula_at(before, pos)
        if sub == res:
            continue
        for rule in standard_rules():
            for variant_id, direction in match_rule_at(rule, sub, res):
                key = (rule.id, variant_id, direction, pos)
                if key in seen:
                    continue
                seen.add(key)
                found.append(
                    RuleApplication(rule.id, variant_id, direction, pos, before, after)
                )
    return found


def match_buggy(before: Formula, after: Formula) -> list[tuple[BuggyRule, Position]]:
    """All buggy rules whose application somewhere in before yields after."""
    found: list[tuple[BuggyRule, Position]] = []
    seen = set()
    for pos in candidate_positions(before):
        res = residual(before, after, pos)
        if res is None:
            continue
        sub = subformula_at(before, pos)
        for buggy in buggy_rules():
            if (buggy.id, pos) in seen:
                continue
            if match_buggy_at(buggy, sub, res):
                seen.add((buggy.id, pos))
                found.append((buggy, pos))
    return found


# ---------------------------------------------------------------------------
# The diagnosis pipeline

def diagnose(sub: StepSubmission, *, buggy_equivalent_feedback: bool = True) -> Diagnosis:
    """Diagnose one student step.

    Pipeline: parse, no-op check, rule recognition with rule-name comparison,
    then the semantic check with buggy-rule matching for the unrecognized
    rest. buggy_equivalent_feedback gates the error-specific message on steps
    that are equivalent yet match a buggy rule (the pilot configuration kept
    it off).
    """
    try:
        after = parse(sub.after_text)
    except FormulaSyntaxError as err:
        return Diagnosis(
            SYNTAX_ERROR,
            accepted=False,
            message=str(err),
            syntax_error=err,
        )

    if structurally_equal(sub.before, after):
        return Diagnosis(
            NOOP,
            accepted=True,
            message="No rewriting happened (parenthesization only); nothing to check.",
            after=after,
        )

    applications = recognize(sub.before, after)
    if applications:
        if sub.claimed_rule is not None:
            chosen = next(
                (app for app in applications if app.rule_id == sub.claimed_rule), None
            )
            if chosen is not None:
                return Diagnosis(
                    CORRECT,
                    accepted=True,
                    message=f"Correct: {chosen.describe()}.",
                    after=after,
                    application=chosen,
                    detected_rule=chosen.rule_id,
                    claimed_rule=sub.claimed_rule,
                    position=chosen.position,
                )
            detected = applications[0]
            return Diagnosis(
                WRONG_RULE_NAME,
                accepted=False,
                message=(
                    f"The step is a valid application of {detected.rule_id}, "
                    f"not of {sub.claimed_rule}."
                ),
                after=after,
                detected_rule=detected.rule_id,
                claimed_rule=sub.claimed_rule,
                position=detected.position,
            )
        if sub.mode == STRICT:
            detected = applications[0]
            return Diagnosis(
                WRONG_RULE_NAME,
                accepted=False,
                message=(
                    "Each step must be motivated with a rule name; "
                    f"this step looks like {detected.rule_id}."
                ),
                after=after,
                detected_rule=detected.rule_id,
                position=detected.position,
            )
        chosen = applications[0]
        return Diagnosis(
            CORRECT,
            accepted=True,
            message=f"Correct: {chosen.describe()}.",
            after=after,
            application=chosen,
            detected_rule=chosen.rule_id,
            position=chosen.position,
        )

    if not equivalent(sub.before, after):
        buggy = match_buggy(sub.before, after)
        if buggy:
            rule, pos = buggy[0]
            return Diagnosis(
                BUGGY,
                accepted=False,
                message=rule.message,
                after=after,
                buggy_rule=rule.id,
                position=pos,
            )
        return Diagnosis(
            NOT_EQUIVALENT,
            accepted=False,
            message="The new formula is not equivalent to the previous one.",
            after=after,
        )

    if buggy_equivalent_feedback:
        buggy = match_buggy(sub.before, after)
        if buggy:
            rule, pos = buggy[0]
            return Diagnosis(
                BUGGY_EQUIVALENT,
                accepted=False,
                message=(
                    "The formulas happen to be equivalent, but the step is "
                    "not a correct rule application. " + rule.message
                ),
                after=after,
                buggy_rule=rule.id,
                position=pos,
            )

    if sub.mode == STRICT:
        return Diagnosis(
            EQUIVALENT_UNRECOGNIZED,
            accepted=False,
            message=(
                "The formulas are equivalent, but this is not a single "
                "rule application; prove it in smaller steps."
            ),
            after=after,
        )
    return Diagnosis(
        EQUIVALENT_UNRECOGNIZED,
        accepted=True,
        message=(
            "Accepted: the formulas are equivalent, but no single standard "
            "rule matches this step."
        ),
        after=after,
    )
