"""Solution strategies: normal-form rewriting, equivalence proofs, hints.

Normal-form derivations repeatedly take the first applicable phase:

  1. eliminate biconditionals (outermost first)
  2. eliminate implications (outermost first)
  3. simplify: complement, true/false laws, idempotency, absorption, in
     that order, leftmost-outermost
  4. push negations inward (generalized DeMorgan and double negation,
     outermost redex first)
  5. generalized distribution toward the target form (outermost first)

Simplification runs before negation pushing and distribution on purpose:
eliminating a biconditional or implication can drop constants and duplicate
operands into the formula, and distributing over that material multiplies
cleanup work into dozens of pointless steps. Simplifying eagerly keeps
worked solutions short, which also keeps the efficiency metric meaningful.

Proofs derive both sides to the simplified disjunctive normal form and meet
in the middle. When the two simplified forms differ structurally, the solver
first aligns operand order (commutativity steps toward a canonical order,
re-simplifying as duplicates surface), and as a last resort expands both
sides to the full minterm form over the shared atom set, which is uniquely
determined by the truth table, so equivalent sides always meet. Every emitted
step is a single catalog-rule application.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from logex.formula import (
    And,
    Atom,
    Const,
    FALSE,
    Formula,
    Iff,
    Imp,
    Neg,
    Or,
    Position,
    ROOT,
    TRUE,
    atom_names,
    equivalent,
    flatten,
    format_formula,
    positions,
    positions_with_subformulas,
    replace_at,
    size,
    structurally_equal,
    subformula_at,
)
from logex.rules import (
    LTR,
    RTL,
    RuleApplication,
    rule_by_id,
    rule_tops,
    variant_result,
)

DNF = "dnf"
CNF = "cnf"


class StrategyError(Exception):
    pass


class NotEquivalentError(StrategyError):
    """The two sides of a proof exercise are not semantically equivalent."""


class ExerciseSolvedError(StrategyError):
    """Feed forward was requested on an already finished exercise."""


class TargetUnreachableError(StrategyError):
    """A step-count target is neither on the derivation nor equivalent to its head."""


# ---------------------------------------------------------------------------
# States

@dataclass(frozen=True)
class DerivationState:
    kind: str  # DNF | CNF
    start: Formula
    steps: tuple[RuleApplication, ...] = ()

    @property
    def head(self) -> Formula:
        return self.steps[-1].after if self.steps else self.start

    def extend(self, app: RuleApplication) -> "DerivationState":
        assert structurally_equal(app.before, self.head)
        return replace(self, steps=self.steps + (app,))


@dataclass(frozen=True)
class ProofState:
    lhs: Formula
    rhs: Formula
    forward: tuple[RuleApplication, ...] = ()
    backward: tuple[RuleApplication, ...] = ()

    @property
    def forward_head(self) -> Formula:
        return self.forward[-1].after if self.forward else self.lhs

    @property
    def backward_head(self) -> Formula:
        return self.backward[-1].after if self.backward else self.rhs

    @property
    def closed(self) -> bool:
        return structurally_equal(self.forward_head, self.backward_head)

    def extend(self, app: RuleApplication, direction: str) -> "ProofState":
        if direction == "forward":
            assert structurally_equal(app.before, self.forward_head)
            return replace(self, forward=self.forward + (app,))
        assert structurally_equal(app.before, self.backward_head)
        return replace(self, backward=self.backward + (app,))


@dataclass(frozen=True)
class Hint:
    level: int
    text: str
    direction: str | None = None
    step: RuleApplication | None = None
    solution: object | None = None  # DerivationState | ProofState at level 3


# ---------------------------------------------------------------------------
# Normal-form predicates

def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Neg) and isinstance(f.child, Atom))


def _clause(f: Formula, inner) -> bool:
    if is_literal(f):
        return True
    return isinstance(f, inner) and all(is_literal(op) for op in f.operands)


def is_dnf(f: Formula) -> bool:
    """Disjunction of conjunctions of literals; a lone literal, a single
    conjunction, and the constants are the degenerate cases."""
    if isinstance(f, Const):
        return True
    if isinstance(f, Or):
        return all(_clause(op, And) for op in f.operands)
    return _clause(f, And)


def is_cnf(f: Formula) -> bool:
    if isinstance(f, Const):
        return True
    if isinstance(f, And):
        return all(_clause(op, Or) for op in f.operands)
    return _clause(f, Or)


# ---------------------------------------------------------------------------
# Phases

_NEG_PUSH = ("demorgan-and", "demorgan-or", "double-negation")
_SIMPLIFY = (
    "complement-or",
    "complement-and",
    "true-and",
    "false-or",
    "true-or",
    "false-and",
    "not-true",
    "not-false",
    "idempotency-and",
    "idempotency-or",
    "absorption-or",
    "absorption-and",
)


from functools import lru_cache


@lru_cache(maxsize=None)
def _phases(kind: str):
    distr = "distr-and-over-or" if kind == DNF else "distr-or-over-and"
    # (rules, rule-major order): simplification scans rule by rule, the
    # other phases scan position by position.
    table = (
        (("equivalence-def",), False),
        (("implication-def",), False),
        (_SIMPLIFY, True),
        (_NEG_PUSH, False),
        ((distr,), False),
    )
    return tuple(
        (tuple(rule_by_id(rule_id) for rule_id in ids), rule_major)
        for ids, rule_major in table
    )


def _ltr_result(rule, sub: Formula) -> tuple[Formula, str] | None:
    for var in rule.variants:
        result = variant_result(var, LTR, sub)
        if result is not None:
            return result, var.id
    return None


def _scan(f: Formula, pairs, rules, rule_major: bool, first_only: bool):
    found = []
    combos = (
        ((rule, pair) for rule in rules for pair in pairs)
        if rule_major
        else ((rule, pair) for pair in pairs for rule in rules)
    )
    for rule, (pos, sub) in combos:
        if not isinstance(sub, rule_tops(rule)):
            continue
        got = _ltr_result(rule, sub)
        if got is None:
            continue
        result, variant = got
        after = replace_at(f, pos, result)
        if after == f:
            continue
        app = RuleApplication(rule.id, variant, LTR, pos, f, after)
        if first_only:
            return [app]
        found.append(app)
    return found


_NODE_ONLY_PHASES = (0, 1, 3)  # iff/imp elimination and negation pushing


def _phase_scan(f: Formula, kind: str, first_only: bool):
    # Elimination and negation-pushing rules never match the virtual nodes
    # that span positions select, so those phases scan plain nodes only.
    node_pairs = positions_with_subformulas(f, spans=False)
    span_pairs = None
    for index, (rules, rule_major) in enumerate(_phases(kind)):
        if index in _NODE_ONLY_PHASES:
            pairs = node_pairs
        else:
            if span_pairs is None:
                span_pairs = positions_with_subformulas(f)
            pairs = span_pairs
        apps = _scan(f, pairs, rules, rule_major, first_only)
        if apps:
            return apps
    return []


def next_application(f: Formula, kind: str) -> RuleApplication | None:
    """The deterministic strategy's next step at f, or None when finished."""
    apps = _phase_scan(f, kind, first_only=True)
    return apps[0] if apps else None


def strategy_applications(f: Formula, kind: str) -> list[RuleApplication]:
    """Every application the current phase permits (the strategy relation)."""
    return _phase_scan(f, kind, first_only=False)


_STEP_CAP = 400


def solve_normal_form(start: Formula, kind: str) -> DerivationState:
    """A complete derivation to the fully simplified target normal form."""
    state = DerivationState(kind, flatten(start))
    while True:
        app = next_application(state.head, kind)
        if app is None:
            return state
        state = state.extend(app)
        if len(state.steps) > _STEP_CAP:
            raise StrategyError(f"derivation from {start} exceeded {_STEP_CAP} steps")


# ---------------------------------------------------------------------------
# Termination measure (asserted per generated step by the test suite)

def _iff_weight(f: Formula) -> int:
    if isinstance(f, (Atom, Const)):
        return 1
    if isinstance(f, Neg):
        return _iff_weight(f.child)
    if isinstance(f, (And, Or)):
        w = 1
        for op in f.operands:
            w *= _iff_weight(op)
        return w
    if isinstance(f, Imp):
        return _iff_weight(f.lhs) * _iff_weight(f.rhs)
    if isinstance(f, Iff):
        return (_iff_weight(f.lhs) * _iff_weight(f.rhs)) ** 2 + 1
    raise TypeError(f)


def _imp_count(f: Formula) -> int:
    from logex.formula import subformulas

    return sum(1 for g in subformulas(f) if isinstance(g, Imp))


def _neg_weight(f: Formula) -> int:
    from logex.formula import subformulas

    return sum(
        size(g.child)
        for g in subformulas(f)
        if isinstance(g, Neg) and not isinstance(g.child, (Atom, Const))
    )


def _distr_weight(f: Formula, kind: str) -> int:
    multiplicative = And if kind == DNF else Or

    def walk(g: Formula) -> int:
        if isinstance(g, (Atom, Const)):
            return 2
        if isinstance(g, Neg):
            return walk(g.child)
        if isinstance(g, (Imp, Iff)):
            return walk(g.lhs) + walk(g.rhs) + 1
        if isinstance(g, multiplicative):
            w = 1
            for op in g.operands:
                w *= walk(op)
            return w
        return sum(walk(op) for op in g.operands) + 1

    return walk(f)


def phase_measure(f: Formula, kind: str) -> tuple[int, int, int, int, int]:
    """A tuple that strictly decreases (lexicographically) with every step the
    strategy takes: biconditional weight, implication count, weight of
    negations above connectives, distribution weight for the target form,
    and formula size."""
    return (
        _iff_weight(f),
        _imp_count(f),
        _neg_weight(f),
        _distr_weight(f, kind),
        size(f),
    )


# ---------------------------------------------------------------------------
# Canonical alignment (proofs)

def _operand_key(f: Formula):
    if isinstance(f, Atom):
        return (0, f.name, 0)
    if isinstance(f, Neg) and isinstance(f.child, Atom):
        return (0, f.child.name, 1)
    if isinstance(f, Const):
        return (1, "T" if f.value else "F", 0)
    return (2, format_formula(f), 0)


def _first_unsorted(f: Formula) -> tuple[Position, Formula] | None:
    for pos in positions(f):
        if pos.span is not None:
            continue
        node = subformula_at(f, pos)
        if not isinstance(node, (And, Or)):
            continue
        ordered = tuple(sorted(node.operands, key=_operand_key))
        if ordered != node.operands:
            return pos, type(node)(ordered)
    return None


def _comm_id(node: Formula) -> str:
    return "commutativity-and" if isinstance(node, And) else "commutativity-or"


def canonical_steps(f: Formula, kind: str = DNF) -> list[RuleApplication]:
    """Steps from f to its canonical form: strategy steps while any apply,
    otherwise one commutativity step per out-of-order node, until neither
    does anything. Sorting groups complementary literals and equal operands
    next to each other, so new simplification steps may surface after it."""
    steps: list[RuleApplication] = []
    cur = f
    while True:
        app = next_application(cur, kind)
        if app is None:
            unsorted = _first_unsorted(cur)
            if unsorted is None:
                return steps
            pos, ordered_node = unsorted
            node = subformula_at(cur, pos)
            after = replace_at(cur, pos, ordered_node)
            app = RuleApplication(_comm_id(node), "permute", LTR, pos, cur, after)
        steps.append(app)
        cur = app.after
        if len(steps) > _STEP_CAP:
            raise StrategyError("canonical alignment did not terminate")


def _minterm_steps(f: Formula, atoms: list[str]) -> list[RuleApplication]:
    """Expand a canonical simplified DNF to the full minterm form over atoms.

    Per missing atom x of a conjunct C this emits C -> C /\\ T (reversed
    true-and), T -> x \\/ ~x (reversed complement), then one distribution,
    and finally re-canonicalizes; the result is determined by the truth
    table alone, so both sides of an equivalence reach the same formula.
    """
    steps: list[RuleApplication] = []
    cur = f

    def emit(rule_id, direction, pos, after, variant="base"):
        nonlocal cur
        steps.append(RuleApplication(rule_id, variant, direction, pos, cur, after))
        cur = after

    while True:
        conjuncts = cur.operands if isinstance(cur, Or) else (cur,)
        expanded = False
        for i, conjunct in enumerate(conjuncts):
            pos = Position((i,)) if isinstance(cur, Or) else ROOT
            missing = sorted(set(atoms) - atom_names(conjunct))
            if not missing:
                continue
            x = Atom(missing[0])
            split = Or((x, Neg(x)))
            if isinstance(conjunct, Const) and conjunct.value:
                emit("complement-or", RTL, pos, replace_at(cur, pos, split))
                expanded = True
                break
            ops = conjunct.operands if isinstance(conjunct, And) else (conjunct,)
            widened = And(ops + (TRUE,))
            emit("true-and", RTL, pos, replace_at(cur, pos, widened))
            t_pos = Position(pos.path + (len(ops),))
            emit("complement-or", RTL, t_pos, replace_at(cur, t_pos, split))
            distributed = Or((And(ops + (x,)), And(ops + (Neg(x),))))
            emit("distr-and-over-or", LTR, pos, replace_at(cur, pos, distributed))
            expanded = True
            break
        if not expanded:
            break
        if len(steps) > 12 * _STEP_CAP:
            raise StrategyError("minterm expansion did not terminate")
    for app in canonical_steps(cur, DNF):
        steps.append(app)
        cur = app.after
    return steps


def _resolve_proof(
    fwd_head: Formula, bwd_head: Formula
) -> tuple[list[RuleApplication], list[RuleApplication]]:
    fwd = canonical_steps(fwd_head, DNF)
    bwd = canonical_steps(bwd_head, DNF)
    m1 = fwd[-1].after if fwd else fwd_head
    m2 = bwd[-1].after if bwd else bwd_head
    if not structurally_equal(m1, m2):
        atoms = sorted(atom_names(m1) | atom_names(m2))
        fwd += _minterm_steps(m1, atoms)
        bwd += _minterm_steps(m2, atoms)
        m1 = fwd[-1].after if fwd else fwd_head
        m2 = bwd[-1].after if bwd else bwd_head
        if not structurally_equal(m1, m2):
            raise StrategyError("proof sides failed to meet at the minterm form")
    return fwd, bwd


def solve_proof(lhs: Formula, rhs: Formula) -> ProofState:
    """A closed proof for an equivalent pair; NotEquivalentError otherwise.

    Trailing steps shared by both derivations are trimmed so neither side
    repeats work the other already shows.
    """
    lhs, rhs = flatten(lhs), flatten(rhs)
    if not equivalent(lhs, rhs):
        raise NotEquivalentError(
            f"{format_formula(lhs)} and {format_formula(rhs)} are not equivalent"
        )
    fwd, bwd = _resolve_proof(lhs, rhs)
    while (
        fwd
        and bwd
        and structurally_equal(fwd[-1].before, bwd[-1].before)
        and structurally_equal(fwd[-1].after, bwd[-1].after)
    ):
        fwd.pop()
        bwd.pop()
    state = ProofState(lhs, rhs, tuple(fwd), tuple(bwd))
    assert state.closed
    return state


# ---------------------------------------------------------------------------
# Feed forward

def next_step(state) -> tuple[RuleApplication, str]:
    """The next strategy step from the current state, with its direction.

    Works from any reachable state, including ones off the strategy's own
    path: the continuation is recomputed from the current head(s).
    """
    if isinstance(state, DerivationState):
        finished = is_finished(state)
        if finished:
            raise ExerciseSolvedError("exercise already solved")
        app = next_application(state.head, state.kind)
        if app is None:
            raise ExerciseSolvedError("exercise already solved")
        return app, "forward"
    if state.closed:
        raise ExerciseSolvedError("exercise already solved")
    fwd, bwd = _resolve_proof(state.forward_head, state.backward_head)
    if fwd:
        return fwd[0], "forward"
    assert bwd
    return bwd[0], "backward"


def is_finished(state) -> bool:
    if isinstance(state, DerivationState):
        predicate = is_dnf if state.kind == DNF else is_cnf
        return predicate(state.head) and next_application(state.head, state.kind) is None
    return state.closed


def hint(state, level: int) -> Hint:
    """Feed forward at three granularities: name the rule, give the step,
    or hand over the complete worked-out solution from the original start."""
    if level not in (1, 2, 3):
        raise ValueError("hint level must be 1, 2 or 3")
    if level == 3:
        if isinstance(state, DerivationState):
            solution = solve_normal_form(state.start, state.kind)
        else:
            solution = solve_proof(state.lhs, state.rhs)
        return Hint(3, "Complete worked-out solution.", solution=solution)
    app, direction = next_step(state)
    if level == 1:
        if isinstance(state, DerivationState):
            text = f"Apply {app.rule_id}."
        else:
            text = f"Perform a {direction} step: apply {app.rule_id}."
        return Hint(1, text, direction=direction)
    return Hint(2, f"Apply {app.rule_id}.", direction=direction, step=app)


def worked_solution(state) -> int:
    """Length of the generated solution for the state's exercise."""
    if isinstance(state, DerivationState):
        return len(solve_normal_form(state.start, state.kind).steps)
    proof = solve_proof(state.lhs, state.rhs)
    return len(proof.forward) + len(proof.backward)


def worked_solution_length(start: Formula, kind: str, target: Formula) -> int:
    """Steps of the generated solution up to the student's simplification level.

    Counts steps to the first generated state structurally equal to target
    (flattening only; operand order matters). A target on no prefix state but
    equivalent to the final head scores the full solution length.
    """
    derivation = solve_normal_form(start, kind)
    target = flatten(target)
    state = derivation.start
    if structurally_equal(state, target):
        return 0
    for i, app in enumerate(derivation.steps, start=1):
        if structurally_equal(app.after, target):
            return i
    if equivalent(target, derivation.head):
        return len(derivation.steps)
    raise TargetUnreachableError(
        f"{format_formula(target)} is not on the worked solution and does not "
        f"match its final simplification"
    )


# ---------------------------------------------------------------------------
# Divergence detection

def _permitted_afters(head: Formula, kind: str, other_head: Formula | None) -> set[Formula]:
    afters = {app.after for app in strategy_applications(head, kind)}
    if not afters and other_head is not None:
        # Phases are done on this side; for proofs, canonical alignment and
        # the minterm bridge are still strategy moves.
        if not structurally_equal(head, other_head):
            fwd, _ = _resolve_proof(head, other_head)
            if fwd:
                afters.add(fwd[0].after)
    return afters


def on_path(state) -> bool:
    """Whether every step so far is one the strategy itself could have taken
    (the strategy relation, not just the single deterministic trace)."""
    if isinstance(state, DerivationState):
        cur = state.start
        for app in state.steps:
            if app.after not in _permitted_afters(cur, state.kind, None):
                return False
            cur = app.after
        return True
    cur = state.lhs
    for app in state.forward:
        if app.after not in _permitted_afters(cur, DNF, state.backward_head):
            return False
        cur = app.after
    cur = state.rhs
    for app in state.backward:
        if app.after not in _permitted_afters(cur, DNF, state.forward_head):
            return False
        cur = app.after
    return True
