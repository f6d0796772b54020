import random

import pytest

from logex.formula import (
    And,
    Atom,
    FALSE,
    Neg,
    Or,
    Position,
    ROOT,
    TRUE,
    equivalent,
    parse,
)
from logex.rules import (
    LTR,
    NoMatchError,
    PEach,
    PHole,
    PNeg,
    PSeq,
    PVar,
    RTL,
    apply_rule,
    buggy_rules,
    instantiate,
    match,
    pand,
    pattern_vars,
    por,
    rule_by_id,
    rule_sheet,
    standard_rules,
)
from tests.conftest import random_formula

p, q, r, s = Atom("p"), Atom("q"), Atom("r"), Atom("s")


class TestPatternMatching:
    def test_var_binds_and_constrains(self):
        assert match(pand(PVar("a"), PVar("a")), And((p, p))) == {"a": p}
        assert match(pand(PVar("a"), PVar("a")), And((p, q))) is None

    def test_seq_binds_runs(self):
        b = match(PNeg(pand(PSeq("xs", 2))), Neg(And((p, q, r))))
        assert b == {"xs": (p, q, r)}

    def test_seq_respects_minimum(self):
        assert match(pand(PSeq("xs", 1), por(PSeq("ys", 2))), And((Or((p, q)),))) is None

    def test_each_extracts_holes(self):
        pat = por(PEach("xs", PNeg(PHole())))
        assert match(pat, Or((Neg(p), Neg(q)))) == {"xs": (p, q)}
        assert match(pat, Or((Neg(p), q))) is None

    def test_each_shares_outer_bindings(self):
        # Factoring: every operand must repeat the same shared part.
        pat = por(PEach("alts", pand(PSeq("parts", 1), PHole())))
        good = Or((And((p, q)), And((p, r))))
        assert match(pat, good) == {"parts": (p,), "alts": (q, r)}
        bad = Or((And((p, q)), And((s, r))))
        assert match(pat, bad) is None

    def test_instantiate_each(self):
        pat = por(PEach("xs", PNeg(PHole())))
        assert instantiate(pat, {"xs": (p, q)}) == Or((Neg(p), Neg(q)))

    def test_pattern_vars(self):
        pat = pand(PSeq("parts", 1), por(PSeq("alts", 2)))
        assert pattern_vars(pat) == {"parts", "alts"}


class TestCatalog:
    def test_stable_ids_and_order(self):
        ids = [rule.id for rule in standard_rules()]
        assert ids == sorted(set(ids), key=ids.index)
        assert "distr-and-over-or" in ids
        assert "absorption-or" in ids and "absorption-and" in ids
        assert "commutativity-and" in ids and "commutativity-or" in ids

    def test_sheet_export(self):
        sheet = rule_sheet()
        assert all(set(row) == {"id", "schema"} for row in sheet)
        assert any("phi /\\ (psi \\/ chi)" in row["schema"] for row in sheet)

    def test_soundness_sampled(self, rng):
        # Full 200-instantiation sweep lives in the acceptance suite.
        for rule in standard_rules():
            if rule.permutation:
                continue
            for variant in rule.variants:
                for _ in range(20):
                    binding = _random_binding(rng, variant.lhs)
                    lhs = instantiate(variant.lhs, binding)
                    rhs = instantiate(variant.rhs, binding)
                    assert equivalent(lhs, rhs), (rule.id, variant.id, lhs, rhs)

    def test_buggy_witnesses_are_not_equivalences(self):
        for buggy in buggy_rules():
            binding = dict(buggy.witness)
            lhs = instantiate(buggy.lhs, binding)
            rhs = instantiate(buggy.rhs, binding)
            assert not equivalent(lhs, rhs), buggy.id


def _random_binding(rng, pattern):
    binding = {}
    for name in pattern_vars(pattern):
        if name in ("ops", "alts"):
            n = rng.choice([2, 2, 3, 4])
            binding[name] = tuple(random_formula(rng, depth=1) for _ in range(n))
        elif name in ("parts", "rest"):
            n = rng.choice([1, 1, 2, 3])
            binding[name] = tuple(random_formula(rng, depth=1) for _ in range(n))
        else:
            binding[name] = random_formula(rng, depth=2)
    return binding


class TestApply:
    def test_generalized_demorgan_single_step(self):
        got = apply_rule("demorgan-and", parse("~(p /\\ q /\\ r)"), ROOT)
        assert got == parse("~p \\/ ~q \\/ ~r")

    def test_distribution_commutative_variant(self):
        got = apply_rule("distr-and-over-or", parse("(q \\/ r) /\\ p"), ROOT)
        assert got == parse("(q /\\ p) \\/ (r /\\ p)")

    def test_generalized_distribution(self):
        got = apply_rule("distr-and-over-or", parse("p /\\ q /\\ (r \\/ s)"), ROOT)
        assert got == parse("(p /\\ q /\\ r) \\/ (p /\\ q /\\ s)")

    def test_idempotency_at_span(self):
        got = apply_rule("idempotency-or", Or((q, p, p, s)), Position((), (1, 2)))
        assert got == Or((q, p, s))

    def test_double_negation(self):
        assert apply_rule("double-negation", parse("~~p"), ROOT) == p

    def test_double_negation_reversed(self):
        assert apply_rule("double-negation", p, ROOT, direction=RTL) == parse("~~p")

    def test_reversed_distribution_is_factoring(self):
        got = apply_rule(
            "distr-and-over-or", parse("(p /\\ q) \\/ (p /\\ r)"), ROOT, direction=RTL
        )
        assert got == parse("p /\\ (q \\/ r)")

    def test_underdetermined_reverse_raises(self):
        with pytest.raises(NoMatchError):
            apply_rule("complement-or", TRUE, ROOT, direction=RTL)

    def test_commutativity_swaps_pair(self):
        got = apply_rule("commutativity-or", Or((p, q, r)), Position((), (0, 2)))
        assert got == Or((q, p, r))

    def test_no_match(self):
        with pytest.raises(NoMatchError):
            apply_rule("demorgan-and", parse("p /\\ q"), ROOT)

    def test_result_always_flattened(self, rng):
        from logex.formula import flatten

        for _ in range(200):
            f = random_formula(rng)
            apps = _applicable(rng, f)
            if not apps:
                continue
            rule, pos, direction = rng.choice(apps)
            got = apply_rule(rule, f, pos, direction=direction)
            assert got == flatten(got)
            assert equivalent(f, got)


def _applicable(rng, f):
    from logex.diagnose import candidate_positions

    out = []
    for pos in candidate_positions(f):
        for rule in standard_rules():
            for direction in rule.directions():
                try:
                    apply_rule(rule, f, pos, direction=direction)
                except NoMatchError:
                    continue
                out.append((rule, pos, direction))
    return out
