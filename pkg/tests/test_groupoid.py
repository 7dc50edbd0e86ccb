import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.assets.errors import (
    EmptySubset,
    MalformedInput,
    NotACongruence,
    NotASemigroup,
    NotIdempotent,
)
from src.assets.groupoid import (
    PACKED_HEADER_BYTES,
    GreenRelation,
    PartialGroupoid,
    Partition,
    associativity_witness,
    cyclic_group,
    direct_product,
    egg_box,
    format_egg_box,
    generated_subset,
    green_classes,
    green_holds,
    idempotents,
    induced_partial,
    is_associative,
    is_total,
    j_classes,
    load_groupoid,
    load_groupoid_safe,
    local_monoid,
    omega,
    parse_groupoid,
    partition_from_relation,
    quotient,
    save_groupoid,
    serialize_groupoid,
    subsemigroup,
    verify_congruence,
)
from tests.strategies import partial_groupoids, transformation_semigroups

PREORDERS = (GreenRelation.LEQ_R, GreenRelation.LEQ_L, GreenRelation.LEQ_J)


def test_parse_text_table(c2):
    g = parse_groupoid("2\n1 2\n2 1\n")
    assert g == c2
    assert g.is_semigroup


def test_parse_text_ignores_comments_and_blank_lines():
    g = parse_groupoid("# a comment\n\n1\n1  # the only product\n")
    assert g.table == ((1,),)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "0\n",
        "2\n1 2\n",
        "2\n1 2\n2\n",
        "2\n1 x\n2 1\n",
        "2\n1 3\n2 1\n",
        "2 2\n1 2\n2 1\n",
    ],
)
def test_parse_text_rejects_malformed_tables(text):
    with pytest.raises(MalformedInput):
        parse_groupoid(text)


def test_packed_out_of_range_entries_are_undefined():
    # n = 2 packs two bits per entry: 11 01 10 00
    data = (2).to_bytes(PACKED_HEADER_BYTES, "big") + bytes([0b11011000])
    g = parse_groupoid(data, "packed")
    assert g.table == ((0, 1), (2, 0))


def test_packed_rejects_wrong_body_length():
    data = (2).to_bytes(PACKED_HEADER_BYTES, "big") + bytes(2)
    with pytest.raises(MalformedInput):
        parse_groupoid(data, "packed")


@settings(max_examples=200)
@given(partial_groupoids())
def test_both_formats_reproduce_the_table(g):
    for fmt in ("text", "packed"):
        assert parse_groupoid(serialize_groupoid(g, fmt), fmt) == g


@pytest.mark.slow
@settings(max_examples=1000, deadline=None)
@given(partial_groupoids(max_order=8))
def test_both_formats_reproduce_many_tables(g):
    for fmt in ("text", "packed"):
        assert parse_groupoid(serialize_groupoid(g, fmt), fmt) == g


def test_save_and_load_infer_format_from_suffix(tmp_path, b2):
    packed = save_groupoid(b2, tmp_path / "b2.mtb")
    text = save_groupoid(b2, tmp_path / "b2.mt")
    assert packed.read_bytes()[:PACKED_HEADER_BYTES] == (5).to_bytes(PACKED_HEADER_BYTES, "big")
    assert load_groupoid(packed) == b2
    assert load_groupoid(text) == b2
    assert load_groupoid(text).name == "b2"


def test_load_groupoid_safe_returns_none_for_missing_file(tmp_path):
    assert load_groupoid_safe(tmp_path / "missing.mt") is None


def test_associativity_witness_is_lexicographically_first():
    g = PartialGroupoid(2, ((2, 1), (1, 1)))
    assert associativity_witness(g) == (1, 1, 2)
    assert not is_associative(g)
    assert not g.is_semigroup


def test_partial_table_is_not_a_semigroup():
    g = PartialGroupoid(2, ((1, 0), (2, 2)))
    assert not is_total(g)
    assert associativity_witness(g) == (1, 2, 0)
    with pytest.raises(NotASemigroup) as info:
        green_classes(g, "R")
    assert info.value.witness == (1, 2, 0)


def test_idempotents(b2, c2, n2):
    assert idempotents(b2) == {1, 2, 5}
    assert idempotents(c2) == {1}
    assert idempotents(n2) == {1}


def test_omega_picks_the_idempotent_power(c2, n2):
    assert omega(c2, 2) == 1
    assert omega(n2, 2) == 1
    c4 = cyclic_group(4)
    assert all(omega(c4, x) == 1 for x in c4.elements)


def test_omega_is_undefined_without_a_defined_idempotent_power():
    assert omega(PartialGroupoid(1, ((0,),)), 1) is None
    assert omega(PartialGroupoid(2, ((2, 0), (0, 0))), 1) is None


def test_green_classes_of_right_zero(rz2):
    assert green_classes(rz2, "R").as_lists() == [[1, 2]]
    assert green_classes(rz2, "L").as_lists() == [[1], [2]]
    assert green_classes(rz2, "H").as_lists() == [[1], [2]]
    assert green_classes(rz2, "J").as_lists() == [[1, 2]]


def test_green_holds_matches_classes(b2):
    for kind in "RLHJ":
        partition = green_classes(b2, kind)
        for x in b2.elements:
            for y in b2.elements:
                assert green_holds(b2, GreenRelation(kind), x, y) == partition.same(x, y)


def test_zero_is_below_everything(b2):
    assert all(green_holds(b2, GreenRelation.LEQ_J, 1, y) for y in b2.elements)
    assert not green_holds(b2, GreenRelation.LEQ_J, 2, 1)


def test_j_classes_of_brandt(b2):
    assert j_classes(b2) == [frozenset({1}), frozenset({2, 3, 4, 5})]
    assert j_classes(b2, regular_only=True) == j_classes(b2)


def test_lenient_j_classes_on_non_semigroup():
    g = PartialGroupoid(2, ((2, 1), (1, 1)))
    with pytest.raises(NotASemigroup):
        j_classes(g)
    classes = j_classes(g, strict=False)
    assert sorted(x for block in classes for x in block) == [1, 2]


def test_egg_box_of_brandt(b2):
    boxes = egg_box(b2)
    assert len(boxes) == 2
    big = boxes[1]
    assert big.regular
    assert len(big.cells) == 2 and all(len(row) == 2 for row in big.cells)
    assert sorted(x for row in big.cells for cell in row for x in cell) == [2, 3, 4, 5]
    text = format_egg_box(b2)
    assert "2*" in text and "5*" in text and "3*" not in text


def test_induced_partial_renumbers_and_records_origin(b2):
    t = induced_partial(b2, {2, 3, 4, 5})
    assert t.n == 4
    assert t.origin == (2, 3, 4, 5)
    # e12 * e12 = 0 lies outside the subset
    assert t.product(2, 2) == 0
    with pytest.raises(EmptySubset):
        induced_partial(b2, [])


def test_subsemigroup_requires_closure(b2):
    assert subsemigroup(b2, {1, 2}).is_semigroup
    with pytest.raises(MalformedInput):
        subsemigroup(b2, {2, 3})


def test_local_monoid(b2):
    m = local_monoid(b2, 2)
    assert m.origin == (1, 2)
    assert m.table == ((1, 1), (1, 2))
    with pytest.raises(NotIdempotent):
        local_monoid(b2, 3)


def test_direct_product_of_groups(c2):
    product = direct_product(c2, c2)
    assert product.n == 4
    assert is_associative(product)
    assert idempotents(product) == {1}


def test_quotient_by_full_partition_is_trivial(c2):
    q = quotient(c2, Partition.full(2))
    assert q.table == ((1,),)


def test_quotient_rejects_non_congruence():
    c3 = cyclic_group(3)
    p = Partition.from_classes([[1, 2], [3]], 3)
    assert verify_congruence(c3, p) is not None
    with pytest.raises(NotACongruence):
        quotient(c3, p)


def test_partition_from_relation_requires_equivalence():
    same_parity = partition_from_relation(4, lambda x, y: x % 2 == y % 2)
    assert same_parity.as_lists() == [[1, 3], [2, 4]]
    with pytest.raises(NotACongruence):
        partition_from_relation(3, lambda x, y: abs(x - y) <= 1)


def test_partition_rejects_overlapping_classes():
    with pytest.raises(MalformedInput):
        Partition.from_classes([[1, 2], [2, 3]], 3)


def test_idempotents_of_brandt_generate_zero_and_diagonal(b2):
    assert generated_subset(b2, idempotents(b2)) == {1, 2, 5}
    assert generated_subset(b2, {3}) == {1, 3}
    assert generated_subset(b2, {3, 4}) == {1, 2, 3, 4, 5}
    with pytest.raises(EmptySubset):
        generated_subset(b2, [])


@settings(max_examples=60, deadline=None)
@given(transformation_semigroups(), st.data())
def test_generated_subset_is_the_least_closed_superset(s, data):
    gens = data.draw(st.sets(st.integers(min_value=1, max_value=s.n), min_size=1))
    closed = generated_subset(s, gens)
    assert gens <= closed
    assert all(s.product(x, y) in closed for x in closed for y in closed)
    assert generated_subset(s, closed) == closed
    assert subsemigroup(s, closed).is_semigroup


@settings(max_examples=40, deadline=None)
@given(transformation_semigroups())
def test_h_is_the_intersection_of_r_and_l(s):
    r, l, h = (green_classes(s, kind) for kind in "RLH")
    for x in s.elements:
        for y in s.elements:
            assert h.same(x, y) == (r.same(x, y) and l.same(x, y))


@settings(max_examples=40, deadline=None)
@given(transformation_semigroups(max_points=3, max_generators=2))
def test_green_preorders_are_reflexive_and_transitive(s):
    for rel in PREORDERS:
        below = {
            (x, y) for x in s.elements for y in s.elements if green_holds(s, rel, x, y)
        }
        assert all((x, x) in below for x in s.elements)
        for x, y in below:
            for z in s.elements:
                if (y, z) in below:
                    assert (x, z) in below, (rel, x, y, z)


@settings(max_examples=60, deadline=None)
@given(transformation_semigroups())
def test_omega_is_an_idempotent_commuting_with_x(s):
    for x in s.elements:
        e = omega(s, x)
        assert e is not None
        assert s.product(e, e) == e
        assert omega(s, e) == e
        assert s.product(x, e) == s.product(e, x)
