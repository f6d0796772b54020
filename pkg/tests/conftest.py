"""Shared fixtures: random formula generation and the brute-force semantics oracle."""

import itertools
import random

import pytest

from logex.formula import (
    And,
    Atom,
    Const,
    FALSE,
    Iff,
    Imp,
    Neg,
    Or,
    TRUE,
    atom_names,
    conj,
    disj,
    evaluate,
)

ATOM_POOL = ["p", "q", "r", "s", "t", "u"]


def random_formula(rng: random.Random, atoms=None, depth=4, constants=True):
    """A random flattened formula. Depth bounds nesting; atoms is the name pool."""
    atoms = atoms or ATOM_POOL
    if depth <= 0:
        if constants and rng.random() < 0.08:
            return TRUE if rng.random() < 0.5 else FALSE
        return Atom(rng.choice(atoms))
    kind = rng.choice(["atom", "neg", "and", "or", "imp", "iff"])
    if kind == "atom":
        return random_formula(rng, atoms, 0, constants)
    if kind == "neg":
        return Neg(random_formula(rng, atoms, depth - 1, constants))
    if kind in ("and", "or"):
        n = rng.choice([2, 2, 2, 3, 3, 4])
        ops = [random_formula(rng, atoms, depth - 1, constants) for _ in range(n)]
        return conj(ops) if kind == "and" else disj(ops)
    a = random_formula(rng, atoms, depth - 1, constants)
    b = random_formula(rng, atoms, depth - 1, constants)
    return Imp(a, b) if kind == "imp" else Iff(a, b)


def exercise_formula(rng: random.Random, atoms=None, depth=5, budget=8):
    """A random formula at the scale of real exercises: depth-capped, with a
    connective budget and at most one biconditional, the way the exercise
    sheets use them (stacked biconditionals blow derivations far past
    anything a student would be given)."""
    atoms = atoms or ATOM_POOL[:5]
    iffs_left = 1

    def grow(depth_left, budget_left):
        nonlocal iffs_left
        if depth_left <= 0 or budget_left <= 0:
            return random_formula(rng, atoms, 0, constants=True), budget_left
        kinds = ["atom", "neg", "and", "or", "imp"]
        weights = [3, 3, 4, 4, 2]
        if iffs_left > 0:
            kinds.append("iff")
            weights.append(1)
        kind = rng.choices(kinds, weights=weights)[0]
        if kind == "atom":
            return random_formula(rng, atoms, 0, constants=True), budget_left
        if kind == "neg":
            child, left = grow(depth_left - 1, budget_left - 1)
            return Neg(child), left
        if kind in ("and", "or"):
            n = rng.choice([2, 2, 2, 3])
            ops, left = [], budget_left - (n - 1)
            for _ in range(n):
                op, left = grow(depth_left - 1, left)
                ops.append(op)
            return (conj(ops) if kind == "and" else disj(ops)), left
        if kind == "iff":
            # Biconditionals take leaf operands, as on real exercise sheets;
            # eliminating one duplicates both operands into the result.
            iffs_left -= 1
            a, left = grow(0, budget_left - 1)
            b, left = grow(0, left)
            return Iff(a, b), left
        a, left = grow(depth_left - 1, budget_left - 1)
        b, left = grow(depth_left - 1, left)
        return Imp(a, b), left

    f, _ = grow(depth, budget)
    return f


def naive_equivalent(a, b):
    """Equivalence by explicit enumeration of valuations (independent oracle)."""
    names = sorted(atom_names(a) | atom_names(b))
    for bits in itertools.product([False, True], repeat=len(names)):
        v = dict(zip(names, bits))
        if evaluate(a, v) != evaluate(b, v):
            return False
    return True


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
