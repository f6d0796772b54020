import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from logex.formula import (
    And,
    Atom,
    FALSE,
    FormulaSyntaxError,
    Iff,
    Imp,
    InvalidPositionError,
    Neg,
    Or,
    Position,
    ROOT,
    TooManyAtomsError,
    TRUE,
    atom_names,
    conj,
    disj,
    equivalent,
    evaluate,
    flatten,
    format_formula,
    parse,
    positions,
    replace_at,
    structurally_equal,
    subformula_at,
    truth_vector,
)
from tests.conftest import ATOM_POOL, naive_equivalent, random_formula

p, q, r, s = Atom("p"), Atom("q"), Atom("r"), Atom("s")


class TestParse:
    def test_chain_is_flattened(self):
        assert parse("p \\/ q \\/ r") == Or((p, q, r))

    def test_parens_in_chain_are_no_structure(self):
        assert parse("(p \\/ q) \\/ r") == Or((p, q, r))
        assert parse("p \\/ (q \\/ r)") == Or((p, q, r))

    def test_negated_nary_conjunction(self):
        assert parse("~(p /\\ q /\\ r)") == Neg(And((p, q, r)))

    def test_precedence(self):
        assert parse("~p /\\ q \\/ r") == Or((And((Neg(p), q)), r))
        assert parse("p -> q -> r") == Imp(p, Imp(q, r))
        assert parse("p /\\ q -> r \\/ s") == Imp(And((p, q)), Or((r, s)))

    def test_constants_and_iff(self):
        assert parse("T <-> p") == Iff(TRUE, p)
        assert parse("F") == FALSE

    def test_unicode_aliases(self):
        assert parse("¬(p ∧ q) ∨ r → p ↔ q") == parse("~(p /\\ q) \\/ r -> p <-> q")

    def test_atom_names(self):
        assert parse("ab1 /\\ p0") == And((Atom("ab1"), Atom("p0")))

    def test_dangling_negation_blames_the_operator(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p \\/ ~")
        assert exc.value.offset == 5
        assert "formula after '~'" in exc.value.expected

    def test_dangling_binary_operator(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p /\\ ")
        assert exc.value.offset == 2
        assert "formula after" in exc.value.expected

    def test_unbalanced_parenthesis_names_the_opener(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("(p \\/ q")
        assert exc.value.offset == 0
        assert "closing parenthesis" in exc.value.expected

    def test_unknown_token(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p & q")
        assert exc.value.offset == 2

    def test_uppercase_atom_suggestion(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("P")
        assert "lowercase" in exc.value.suggestion

    def test_chained_iff_needs_parens(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p <-> q <-> r")
        assert "parenthesize" in exc.value.suggestion
        parse("(p <-> q) <-> r")

    def test_adjacent_formulas_rejected(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p q")
        assert exc.value.offset == 2


class TestPrint:
    def test_flat_chain(self):
        assert format_formula(Or((p, q, r))) == "p \\/ q \\/ r"

    def test_negation_parenthesizes_composites(self):
        assert format_formula(Neg(Or((p, q)))) == "~(p \\/ q)"
        assert format_formula(Neg(Neg(p))) == "~~p"

    def test_conjunction_inside_disjunction(self):
        assert format_formula(Or((And((q, Neg(r))), q, r))) == "(q /\\ ~r) \\/ q \\/ r"

    def test_implication_chain_stays_flat(self):
        assert format_formula(Imp(p, Imp(q, r))) == "p -> q -> r"
        assert format_formula(Imp(Imp(p, q), r)) == "(p -> q) -> r"

    def test_constants(self):
        assert format_formula(Iff(TRUE, FALSE)) == "T <-> F"


def formula_strategy():
    atoms = st.sampled_from([Atom(name) for name in ATOM_POOL])
    consts = st.sampled_from([TRUE, FALSE])
    return st.recursive(
        atoms | consts,
        lambda inner: st.one_of(
            inner.map(Neg),
            st.lists(inner, min_size=2, max_size=4).map(conj),
            st.lists(inner, min_size=2, max_size=4).map(disj),
            st.tuples(inner, inner).map(lambda ab: Imp(*ab)),
            st.tuples(inner, inner).map(lambda ab: Iff(*ab)),
        ),
        max_leaves=25,
    )


class TestRoundTrip:
    @given(formula_strategy())
    @settings(max_examples=300, deadline=None)
    def test_parse_print_round_trip(self, f):
        assert parse(format_formula(f)) == f

    @given(formula_strategy())
    @settings(max_examples=200, deadline=None)
    def test_flatten_is_idempotent_and_preserving(self, f):
        assert flatten(f) == f  # strategy builds flattened formulas
        assert equivalent(f, flatten(f))

    def test_paper_parenthesis_identity(self):
        assert structurally_equal(
            parse("q \\/ (~p \\/ q) \\/ p"), parse("q \\/ ~p \\/ q \\/ p")
        )


class TestEvaluate:
    def test_constants(self):
        assert evaluate(TRUE, {}) is True
        assert evaluate(FALSE, {}) is False

    def test_implication_table(self):
        f = Imp(p, q)
        assert evaluate(f, {"p": True, "q": False}) is False
        assert evaluate(f, {"p": False, "q": False}) is True

    def test_negated_disjunction(self):
        # Direct table evaluation: ~(T \/ F) = F.
        assert evaluate(Neg(Or((p, q))), {"p": True, "q": False}) is False

    def test_missing_atom(self):
        from logex.formula import EvaluationError

        with pytest.raises(EvaluationError):
            evaluate(And((p, q)), {"p": True})


class TestEquivalent:
    def test_demorgan_pair(self):
        assert equivalent(parse("~(p \\/ q)"), parse("~p /\\ ~q"))

    def test_buggy_demorgan_pair(self):
        assert not equivalent(parse("~(p \\/ q)"), parse("~p \\/ ~q"))

    def test_reflexive(self, rng):
        for _ in range(25):
            f = random_formula(rng)
            assert equivalent(f, f)

    def test_matches_naive_oracle(self, rng):
        # The bit-vector path must agree with explicit valuation enumeration.
        for _ in range(150):
            a = random_formula(rng, depth=3)
            b = random_formula(rng, depth=3)
            assert equivalent(a, b) == naive_equivalent(a, b)

    def test_equivalence_relation_sampled(self, rng):
        pool = [random_formula(rng, atoms=["p", "q"], depth=2) for _ in range(30)]
        for a, b, c in itertools.islice(itertools.combinations(pool, 3), 300):
            ab, bc, ac = equivalent(a, b), equivalent(b, c), equivalent(a, c)
            assert equivalent(b, a) == ab
            if ab and bc:
                assert ac

    def test_atom_cap(self):
        wide = disj([Atom(f"a{i}") for i in range(21)])
        with pytest.raises(TooManyAtomsError):
            equivalent(wide, TRUE)

    def test_truth_vector_degenerate(self):
        assert truth_vector(TRUE, []) == 1
        assert truth_vector(FALSE, []) == 0


class TestPositions:
    def test_span_subformula(self):
        f = Or((q, p, p, s))
        assert subformula_at(f, Position((), (1, 2))) == Or((p, p))

    def test_span_replacement_reflattens(self):
        f = Or((q, p, p, s))
        assert replace_at(f, Position((), (1, 2)), p) == Or((q, p, s))

    def test_root_replacement(self, rng):
        f = random_formula(rng)
        g = random_formula(rng)
        assert replace_at(f, ROOT, g) == flatten(g)

    def test_replacement_splices_same_connective(self):
        f = Or((q, p))
        assert replace_at(f, Position((1,)), Or((r, s))) == Or((q, r, s))

    def test_replace_with_own_subformula_is_identity(self, rng):
        for _ in range(60):
            f = random_formula(rng)
            for pos in positions(f):
                assert replace_at(f, pos, subformula_at(f, pos)) == f

    def test_invalid_path(self):
        with pytest.raises(InvalidPositionError):
            subformula_at(p, Position((0,)))
        with pytest.raises(InvalidPositionError):
            subformula_at(Or((p, q)), Position((), (1, 2)))

    def test_positions_outermost_first(self):
        f = Or((And((p, q)), r, Neg(s)))
        pos = positions(f)
        assert pos[0] == ROOT
        depths = [len(pp.path) for pp in pos]
        assert depths == sorted(depths)

    def test_atom_names(self):
        assert atom_names(parse("p -> (q <-> ~r)")) == {"p", "q", "r"}
