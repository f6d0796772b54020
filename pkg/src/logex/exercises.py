"""The exercise bank: fixed ordered sets per kind, plus user-entered exercises.

The fixed sets ship as a versioned data file (five exercises per kind, fixed
order) so evaluation runs see byte-identical content. User exercises are
validated (atom cap; proof pairs must be equivalent) and given a difficulty
from the worked-solution length.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from logex.formula import (
    Formula,
    FormulaSyntaxError,
    MAX_ATOMS,
    atom_names,
    equivalent,
    parse,
)
from logex.strategy import (
    CNF,
    DNF,
    DerivationState,
    NotEquivalentError,
    ProofState,
    solve_normal_form,
    solve_proof,
)

PROOF = "proof"
KINDS = (DNF, CNF, PROOF)

EASY_MAX = 3
MEDIUM_MAX = 7
SOLVABILITY_CAP = 25


class RejectedExercise(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class Exercise:
    id: str
    kind: str  # DNF | CNF | PROOF
    difficulty: str  # easy | medium | hard
    ordinal: int
    start: Formula | None = None  # normal-form exercises
    lhs: Formula | None = None  # proofs
    rhs: Formula | None = None

    def initial_state(self):
        if self.kind == PROOF:
            return ProofState(lhs=self.lhs, rhs=self.rhs)
        return DerivationState(kind=self.kind, start=self.start)

    def worked_length(self) -> int:
        if self.kind == PROOF:
            proof = solve_proof(self.lhs, self.rhs)
            return len(proof.forward) + len(proof.backward)
        return len(solve_normal_form(self.start, self.kind).steps)

    def payload_texts(self) -> dict:
        if self.kind == PROOF:
            return {"lhs": str(self.lhs), "rhs": str(self.rhs)}
        return {"start": str(self.start)}


def difficulty_for(worked_length: int) -> str:
    if worked_length <= EASY_MAX:
        return "easy"
    if worked_length <= MEDIUM_MAX:
        return "medium"
    return "hard"


class ExerciseFileError(Exception):
    pass


def _parse_record(record: dict, where: str) -> Exercise:
    try:
        kind = record["kind"]
        if kind not in KINDS:
            raise ExerciseFileError(f"{where}: unknown kind {kind!r}")
        common = dict(
            id=record["id"],
            kind=kind,
            difficulty=record["difficulty"],
            ordinal=int(record["ordinal"]),
        )
        if kind == PROOF:
            return Exercise(**common, lhs=parse(record["lhs"]), rhs=parse(record["rhs"]))
        return Exercise(**common, start=parse(record["start"]))
    except KeyError as err:
        raise ExerciseFileError(f"{where}: missing field {err}") from None
    except FormulaSyntaxError as err:
        raise ExerciseFileError(f"{where}: bad formula: {err}") from None


def load_exercise_file(path: str | Path) -> list[Exercise]:
    """Load and validate an exercise file (the service's startup path)."""
    raw = Path(path).read_text(encoding="utf-8")
    return _load(raw, str(path))


def _load(raw: str, where: str) -> list[Exercise]:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ExerciseFileError(f"{where}: not valid JSON: {err}") from None
    records = doc.get("exercises")
    if not isinstance(records, list):
        raise ExerciseFileError(f"{where}: missing 'exercises' list")
    out = [
        _parse_record(rec, f"{where}[{i}]") for i, rec in enumerate(records)
    ]
    seen = set()
    for exercise in out:
        if exercise.id in seen:
            raise ExerciseFileError(f"{where}: duplicate id {exercise.id!r}")
        seen.add(exercise.id)
    for exercise in out:
        if exercise.kind == PROOF and not equivalent(exercise.lhs, exercise.rhs):
            raise ExerciseFileError(
                f"{where}: proof pair {exercise.id} is not equivalent"
            )
    return out


def _bundled_raw() -> str:
    return (
        resources.files("logex.data").joinpath("exercises.json").read_text("utf-8")
    )


_FIXED: list[Exercise] | None = None


def _fixed() -> list[Exercise]:
    global _FIXED
    if _FIXED is None:
        _FIXED = _load(_bundled_raw(), "bundled exercises")
    return _FIXED


def fixed_set(kind: str) -> tuple[Exercise, ...]:
    """The fixed, ordered exercise set for one kind (five per kind)."""
    if kind not in KINDS:
        raise ValueError(f"unknown exercise kind {kind!r}")
    chosen = [e for e in _fixed() if e.kind == kind]
    chosen.sort(key=lambda e: e.ordinal)
    return tuple(chosen)


def all_fixed() -> tuple[Exercise, ...]:
    return tuple(e for kind in KINDS for e in fixed_set(kind))


def content_hash() -> str:
    """Version hash of the bundled exercise content (byte stability check)."""
    return hashlib.sha256(_bundled_raw().encode("utf-8")).hexdigest()


def create_user_exercise(kind: str, payload: dict, exercise_id: str = "user") -> Exercise:
    """Validate and build a user-entered exercise.

    Raises RejectedExercise for non-equivalent proof pairs or formulas beyond
    the atom cap; FormulaSyntaxError propagates for unparseable payloads.
    """
    if kind not in KINDS:
        raise RejectedExercise(f"unknown exercise kind {kind!r}")
    if kind == PROOF:
        lhs, rhs = parse(payload["lhs"]), parse(payload["rhs"])
        if len(atom_names(lhs) | atom_names(rhs)) > MAX_ATOMS:
            raise RejectedExercise(f"more than {MAX_ATOMS} distinct atoms")
        if not equivalent(lhs, rhs):
            raise RejectedExercise("the two formulas are not equivalent")
        proof = solve_proof(lhs, rhs)
        worked = len(proof.forward) + len(proof.backward)
        return Exercise(exercise_id, kind, difficulty_for(worked), 0, lhs=lhs, rhs=rhs)
    start = parse(payload["start"])
    if len(atom_names(start)) > MAX_ATOMS:
        raise RejectedExercise(f"more than {MAX_ATOMS} distinct atoms")
    worked = len(solve_normal_form(start, kind).steps)
    return Exercise(exercise_id, kind, difficulty_for(worked), 0, start=start)
