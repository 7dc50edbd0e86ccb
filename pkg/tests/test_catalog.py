import json
import random

import pytest
from hypothesis import given, settings

from src.assets.catalog import (
    APERIODIC_SENTENCE,
    BUILTINS,
    CONGRUENCES,
    DEFINITIONAL_CHECKERS,
    EQUIVALENT_SENTENCES,
    Derived,
    IdentityBasis,
    MembershipChecker,
    Operator,
    Sentence,
    apply_operator,
    builtin,
    check_membership,
    check_membership_safe,
    congruence_partition,
    definitional_checker,
    operator_oracle,
    parse_variety_expression,
    restricted_subset,
)
from src.assets.cli import CORPUS_OPERATORS
from src.assets.config import create_toolkit_config
from src.assets.errors import (
    FormulaSyntaxError,
    NotASemigroup,
    UnknownVariety,
    UnsupportedRealization,
)
from src.assets.formulas import evaluate
from src.assets.groupoid import (
    PartialGroupoid,
    cyclic_group,
    left_zero,
    right_zero,
    trivial,
    verify_congruence,
)
from src.assets.instances import random_transformation_semigroup
from tests.strategies import partial_groupoids

NOT_ASSOCIATIVE = PartialGroupoid(2, ((2, 1), (1, 1)))


@pytest.fixture
def checker():
    return MembershipChecker()


def test_group_is_not_aperiodic(checker, c2):
    assert checker.check(c2, "G")
    result = checker.check(c2, "A")
    assert not result
    assert result.witness == {"identity": "x^w x = x^w", "assignment": {"x": 2}}
    assert result.trace == [{"identity": "x^w x = x^w"}]


def test_right_zero_is_a_band_in_k_but_not_d(checker, rz2):
    assert checker.check(rz2, "B")
    assert checker.check(rz2, "K")
    result = checker.check(rz2, "D")
    assert not result
    assert result.witness["assignment"] == {"x": 1, "y": 2}


def test_null_semigroup_is_nilpotent(checker, n2):
    assert checker.check(n2, "N")
    assert checker.check(n2, "A")
    assert not checker.check(n2, "M")


def test_brandt_is_in_ea(checker, b2):
    result = checker.check(b2, "EA")
    assert result.member
    assert result.witness is None
    assert [record["class_min_id"] for record in result.trace] == [1, 2]


def test_sentence_witness_names_failing_conjunct(checker):
    result = checker.check(NOT_ASSOCIATIVE, "B")
    assert not result
    assert result.witness["conjunct"] == 1
    assert result.witness["assignment"] == {"x": 1, "y": 1, "z": 2}
    assert result.trace[0]["probes"] > 0


def test_result_serializes_to_json(checker, c2):
    payload = json.loads(json.dumps(checker.check(c2, "A").to_dict()))
    assert payload["member"] is False
    assert payload["variety"] == "A"


def test_builtin_realizations():
    assert isinstance(builtin("A").realization, IdentityBasis)
    assert isinstance(builtin("G").realization, Sentence)
    assert set(BUILTINS) == set(DEFINITIONAL_CHECKERS)
    with pytest.raises(UnknownVariety):
        builtin("Q")
    with pytest.raises(UnknownVariety):
        definitional_checker("Q")


def test_algorithmic_realization_has_no_sentence():
    with pytest.raises(UnsupportedRealization):
        builtin("EA").sentence()
    with pytest.raises(UnsupportedRealization):
        apply_operator(Operator.D, builtin("EA"))
    with pytest.raises(UnsupportedRealization):
        parse_variety_expression("K@D(EA)")


def test_identity_classes_require_semigroups(checker):
    with pytest.raises(NotASemigroup):
        checker.check(NOT_ASSOCIATIVE, "A")
    with pytest.raises(NotASemigroup):
        checker.check(NOT_ASSOCIATIVE, "EA")
    assert check_membership_safe(NOT_ASSOCIATIVE, "A") is None
    assert check_membership_safe(NOT_ASSOCIATIVE, "Q") is None


def test_catalog_agrees_with_definitions(checker, small_corpus, b2, c2):
    for s in small_corpus + [b2, right_zero(3), left_zero(3)]:
        for name, direct in DEFINITIONAL_CHECKERS.items():
            assert checker.check(s, name).member == direct(s), (name, s.table)


@pytest.mark.slow
def test_catalog_agrees_with_definitions_on_order_three(checker, order3_corpus):
    for s in order3_corpus:
        for name, direct in DEFINITIONAL_CHECKERS.items():
            assert checker.check(s, name).member == direct(s), (name, s.table)


@settings(max_examples=80, deadline=None)
@given(partial_groupoids(max_order=3))
def test_sentences_agree_with_definitions_on_partial_tables(g):
    for name, spec in BUILTINS.items():
        if isinstance(spec.realization, Sentence):
            assert check_membership(g, spec).member == DEFINITIONAL_CHECKERS[name](g)


@pytest.mark.parametrize(
    "text, name",
    [
        ("A", "A"),
        ("(A)", "A"),
        ("D(A)", "D(A)"),
        ("Hbar(G)", "Hbar(G)"),
        ("L(I)", "L(I)"),
        ("K@D(A)", "K@D(A)"),
        ("LG@ A", "LG@A"),
        ("D@A", "D@A"),
    ],
)
def test_parse_variety_expression(text, name):
    assert parse_variety_expression(text).name == name


def test_nested_expression_structure():
    spec = parse_variety_expression("K@D(A)")
    assert isinstance(spec.realization, Derived)
    assert spec.realization.operator is Operator.MALCEV_K
    inner = spec.realization.inner
    assert inner.realization.operator is Operator.D
    assert inner.realization.inner == builtin("A")


@pytest.mark.parametrize(
    "text, error",
    [
        ("D(A", FormulaSyntaxError),
        ("A B", FormulaSyntaxError),
        ("A + B", FormulaSyntaxError),
        ("", FormulaSyntaxError),
        ("Q", UnknownVariety),
        ("X@A", UnknownVariety),
        ("Foo(A)", UnknownVariety),
    ],
)
def test_parse_variety_expression_errors(text, error):
    with pytest.raises(error):
        parse_variety_expression(text)


def test_expression_error_positions():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_variety_expression("D(A")
    assert info.value.position == 3
    with pytest.raises(FormulaSyntaxError) as info:
        parse_variety_expression("A + B")
    assert info.value.position == 2


def test_derived_class_on_small_examples(checker, c2):
    assert not checker.check(c2, "D(A)")
    assert checker.check(trivial(), "K@D(A)")
    assert not checker.check(c2, "K@D(A)")
    assert checker.check(c2, "Hbar(G)")


def test_guard_decides_empty_restrictions(c2):
    # the local monoid at a non-idempotent is empty and has no identity
    guarded = apply_operator(Operator.L, builtin("M"))
    unguarded = apply_operator(Operator.L, builtin("M"), guard_nonempty=False)
    assert check_membership(c2, guarded)
    assert not check_membership(c2, unguarded)
    config = create_toolkit_config(guard_nonempty=False)
    assert not MembershipChecker(config).check(c2, "L(M)")


@pytest.mark.parametrize(
    "op, inner", CORPUS_OPERATORS, ids=lambda item: getattr(item, "value", item)
)
def test_operator_sentence_matches_explicit_construction(op, inner, small_corpus):
    spec = apply_operator(op, builtin(inner))
    for s in small_corpus:
        assert check_membership(s, spec).member == operator_oracle(op, builtin(inner), s)


def test_congruences_are_compatible(small_corpus, b2):
    for s in small_corpus + [b2]:
        for name in CONGRUENCES:
            assert verify_congruence(s, congruence_partition(s, name)) is None


def test_right_mapping_congruence_classes():
    assert congruence_partition(left_zero(2), "RM").as_lists() == [[1, 2]]
    assert congruence_partition(right_zero(2), "RM").as_lists() == [[1], [2]]
    assert congruence_partition(right_zero(2), "LM").as_lists() == [[1, 2]]
    with pytest.raises(UnknownVariety):
        congruence_partition(right_zero(2), "XM")


def _transformation_semigroups(count, max_size, seed):
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        s = random_transformation_semigroup(
            rng.randint(2, 3), rng.randint(1, 3), seed=rng.randrange(10**6)
        )
        if s.n <= max_size:
            found.append(s)
    return found


def test_aperiodic_sentence_matches_identity_basis(checker, small_corpus, b2):
    corpus = small_corpus + [b2, cyclic_group(3)] + _transformation_semigroups(20, 12, seed=3)
    for s in corpus:
        assert evaluate(s, APERIODIC_SENTENCE) == checker.check(s, "A").member, s.table
    assert EQUIVALENT_SENTENCES["A"] is APERIODIC_SENTENCE


@pytest.mark.slow
def test_aperiodic_sentence_matches_identity_basis_on_order_three(checker, order3_corpus):
    corpus = order3_corpus + _transformation_semigroups(60, 27, seed=4)
    for s in corpus:
        assert evaluate(s, APERIODIC_SENTENCE) == checker.check(s, "A").member, s.table


@pytest.mark.slow
@pytest.mark.parametrize(
    "op, inner", CORPUS_OPERATORS, ids=lambda item: getattr(item, "value", item)
)
def test_operator_sentence_matches_explicit_construction_on_order_three(
    op, inner, order3_corpus
):
    spec = apply_operator(op, builtin(inner))
    for s in order3_corpus + _transformation_semigroups(25, 7, seed=5):
        assert check_membership(s, spec).member == operator_oracle(op, builtin(inner), s), (
            spec.name,
            s.table,
        )


@pytest.mark.slow
def test_congruences_are_compatible_on_order_three(order3_corpus):
    for s in order3_corpus + _transformation_semigroups(25, 12, seed=6):
        for name in CONGRUENCES:
            assert verify_congruence(s, congruence_partition(s, name)) is None, (name, s.table)


def test_restriction_witness_names_element_and_inner_failure(checker, c2):
    result = checker.check(c2, "D(A)")
    assert not result
    assert result.witness == {
        "operator": "D",
        "inner": "A",
        "element": 1,
        "subset": [1, 2],
        "inner_verdict": {
            "member": False,
            "identity": "x^w x = x^w",
            "assignment": {"x": 2},
        },
    }


def test_empty_restriction_witness(c2):
    config = create_toolkit_config(guard_nonempty=False)
    result = MembershipChecker(config).check(c2, "L(M)")
    assert result.witness["element"] == 2
    assert result.witness["subset"] == []
    assert result.witness["inner_verdict"] == {"member": False, "empty": True}


def test_malcev_witness_lists_quotient_classes(checker, c2):
    result = checker.check(c2, "K@D(A)")
    assert not result
    witness = result.witness
    assert (witness["operator"], witness["inner"], witness["congruence"]) == (
        "MalcevK",
        "D(A)",
        "RM",
    )
    assert witness["classes"] == [[1], [2]]
    nested = witness["inner_verdict"]
    assert nested["member"] is False
    assert nested["witness"]["operator"] == "D"
    assert nested["witness"]["element"] == 1
    assert "formula" not in json.dumps(result.to_dict())


def test_derived_witness_on_non_semigroup(checker):
    result = checker.check(NOT_ASSOCIATIVE, "D(B)")
    assert not result
    assert result.witness == {
        "operator": "D",
        "inner": "B",
        "associativity_witness": [1, 1, 2],
    }


def test_restricted_subset(b2):
    assert restricted_subset(b2, Operator.D, 2) == {2, 3, 4, 5}
    assert restricted_subset(b2, Operator.L, 2) == {1, 2}
    assert restricted_subset(b2, Operator.HBAR, 2) == {2}
    assert restricted_subset(b2, Operator.D, 3) == frozenset()
