import random

import pytest

from src.assets.catalog import congruence_partition
from src.assets.errors import FormulaSyntaxError, NotASemigroup, UnboundVariable
from src.assets.formulas import Evaluator, evaluate
from src.assets.groupoid import (
    GreenRelation,
    PartialGroupoid,
    cyclic_group,
    direct_product,
    generated_subset,
    green_holds,
    idempotents,
    omega,
    quotient,
    right_zero,
    subsemigroup,
)
from src.assets.instances import random_transformation_semigroup
from src.assets.omega_terms import (
    Concat,
    OmegaIdentity,
    OmegaPower,
    Var,
    assignments,
    eval_term,
    format_identity,
    identity_to_formula,
    parse_identity,
    parse_identity_file,
    rename_identity,
    satisfies_basis,
    satisfies_identity,
)

IDENTITIES = [
    "x^w x = x^w",
    "(x y)^w x = x (y x)^w",
    "x x = x",
    "x y = y x",
    "x^w y = x^w",
    "y x^w = x^w",
    "x^w y x^w = x^w",
    "x y x = x",
    "(x y)^w = (y x)^w",
    "x^w = x^w x^w",
    "x y z = x z y",
    "x^w y^w = y^w x^w",
    "(x^w y^w)^w = x^w y^w",
    "x = y",
    "x y = x",
    "x y = y",
    "x x x = x",
    "(x y x)^w = x^w",
    "x^w y x = x^w x y",
    "(x^w y)^w x^w = x^w",
]


def test_parse_identity_structure():
    identity = parse_identity("(x y)^w x = x")
    assert identity.lhs == Concat(OmegaPower(Concat(Var("x"), Var("y"))), Var("x"))
    assert identity.rhs == Var("x")
    assert identity.vars == ("x", "y")
    assert not identity.is_equation
    assert parse_identity("x y = y x").is_equation


def test_concatenation_associates_to_the_left():
    identity = parse_identity("x y z = x")
    assert identity.lhs == Concat(Concat(Var("x"), Var("y")), Var("z"))


def test_omega_binds_tighter_than_concatenation():
    assert parse_identity("x y^w = x").lhs == Concat(Var("x"), OmegaPower(Var("y")))


@pytest.mark.parametrize("text", IDENTITIES)
def test_format_identity_parses_back(text):
    identity = parse_identity(text)
    assert parse_identity(format_identity(identity)) == identity


@pytest.mark.parametrize(
    "text, position",
    [("x = ", 4), ("x y", 3), ("(x = x", 3), ("x ? y = x", 2), ("x^ = x", 1)],
)
def test_syntax_errors_report_positions(text, position):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_identity(text)
    assert info.value.position == position


def test_identity_rejects_undeclared_variables():
    with pytest.raises(UnboundVariable):
        OmegaIdentity(Var("x"), Var("y"), ("x",))


def test_identity_file_with_comments():
    bases = parse_identity_file("# aperiodic\nx^w x = x^w\n\nx x = x; x y = y x  # semilattices\n")
    assert [len(b) for b in bases] == [1, 2]
    assert format_identity(bases[1][1]) == "x y = y x"


def test_identity_file_positions_are_global():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_identity_file("x = x\nx = ?\n")
    assert info.value.position == 10


def test_rename_identity():
    renamed = rename_identity(parse_identity("x y = y x"), {"x": "a", "y": "b"})
    assert format_identity(renamed) == "a b = b a"


def test_eval_term_uses_omega(c2):
    term = parse_identity("x^w x = x^w").lhs
    assert eval_term(c2, term, {"x": 2}) == 2


def test_eval_term_requires_a_semigroup():
    g = PartialGroupoid(2, ((2, 1), (1, 1)))
    with pytest.raises(NotASemigroup):
        eval_term(g, Var("x"), {"x": 1})


def test_assignments_are_lexicographic(c2):
    assert list(assignments(c2, ["x", "y"])) == [
        {"x": 1, "y": 1},
        {"x": 1, "y": 2},
        {"x": 2, "y": 1},
        {"x": 2, "y": 2},
    ]


def test_satisfies_identity_reports_first_failure(c2, rz2):
    aperiodic = parse_identity("x^w x = x^w")
    assert satisfies_identity(rz2, aperiodic)
    verdict = satisfies_identity(c2, aperiodic)
    assert not verdict
    assert verdict.assignment == {"x": 2}
    assert verdict.identity == aperiodic


def test_satisfies_basis_stops_at_first_failing_identity(rz2):
    basis = [parse_identity("x x = x"), parse_identity("x y = x"), parse_identity("x y = y x")]
    verdict = satisfies_basis(rz2, basis)
    assert verdict.identity == basis[1]
    assert verdict.assignment == {"x": 1, "y": 2}


def _omega_characterization(s, x):
    """The ≤H-maximal idempotent t with xt R t and tx L t."""
    candidates = [
        t
        for t in idempotents(s)
        if green_holds(s, GreenRelation.R, s.product(x, t), t)
        and green_holds(s, GreenRelation.L, s.product(t, x), t)
    ]
    maximal = [
        t
        for t in candidates
        if all(
            not green_holds(s, GreenRelation.LEQ_H, t, u) or u == t for u in candidates
        )
    ]
    assert len(maximal) == 1
    return maximal[0]


def test_omega_is_the_maximal_stable_idempotent():
    rng = random.Random(7)
    for _ in range(40):
        s = random_transformation_semigroup(
            rng.randint(1, 4), rng.randint(1, 3), seed=rng.randrange(10**6)
        )
        if s.n > 40:
            continue
        for x in s.elements:
            assert omega(s, x) == _omega_characterization(s, x)


@pytest.mark.slow
def test_omega_characterization_on_many_transformation_semigroups():
    rng = random.Random(2024)
    checked = 0
    while checked < 500:
        s = random_transformation_semigroup(
            rng.randint(1, 4), rng.randint(1, 3), seed=rng.randrange(10**6)
        )
        if s.n > 40:
            continue
        checked += 1
        for x in s.elements:
            assert omega(s, x) == _omega_characterization(s, x)


def test_compiled_identity_agrees_with_brute_force(small_corpus, b2):
    corpus = small_corpus + [b2, cyclic_group(3)]
    for text in IDENTITIES:
        identity = parse_identity(text)
        formula = identity_to_formula(identity)
        for s in corpus:
            for h in assignments(s, identity.vars):
                expected = eval_term(s, identity.lhs, h) == eval_term(s, identity.rhs, h)
                assert evaluate(s, formula, h) == expected, (text, s.table, h)


def test_closed_compilation_is_a_sentence(c2, rz2):
    sentence = identity_to_formula(parse_identity("x^w x = x^w"), close=True)
    assert evaluate(rz2, sentence) is True
    assert evaluate(c2, sentence) is False


def _transformation_corpus(count, max_size, seed):
    rng = random.Random(seed)
    corpus = []
    while len(corpus) < count:
        s = random_transformation_semigroup(
            rng.randint(2, 4), rng.randint(1, 3), seed=rng.randrange(10**6)
        )
        if s.n <= max_size:
            corpus.append(s)
    return corpus


def _assert_compilation_agrees(identities, corpus):
    for text in identities:
        identity = parse_identity(text)
        formula = identity_to_formula(identity)
        for s in corpus:
            evaluator = Evaluator(s)
            for h in assignments(s, identity.vars):
                expected = eval_term(s, identity.lhs, h) == eval_term(s, identity.rhs, h)
                assert evaluator.evaluate(formula, h) == expected, (text, s.table, h)


@pytest.mark.slow
def test_compiled_identity_agrees_on_order_three_and_transformations(order3_corpus):
    corpus = order3_corpus[:70] + _transformation_corpus(30, 15, seed=99)
    _assert_compilation_agrees(IDENTITIES[:20], corpus)


def test_satisfied_identities_survive_products_subsemigroups_and_quotients(small_corpus):
    corpus = small_corpus + [cyclic_group(3), right_zero(3)]
    for text in IDENTITIES:
        identity = parse_identity(text)
        models = [s for s in corpus if satisfies_identity(s, identity)]
        for s in models:
            for x in s.elements:
                assert satisfies_identity(subsemigroup(s, generated_subset(s, {x})), identity)
            for name in ("RM", "LM"):
                assert satisfies_identity(
                    quotient(s, congruence_partition(s, name)), identity
                ), (text, name, s.table)
        for s in models[:4]:
            for t in models[:4]:
                assert satisfies_identity(direct_product(s, t), identity), (text, s.table, t.table)
