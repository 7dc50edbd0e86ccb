import itertools
import json
import logging
import random

import networkx as nx
import pytest

from src.assets.config import create_toolkit_config
from src.assets.errors import MalformedInput, NotAForest, NotIdempotent, UnknownVariety
from src.assets.groupoid import idempotents, j_classes, load_groupoid
from src.assets.instances import graham_semigroup, random_graph, random_transformation_semigroup
from src.assets.rees import (
    ZERO,
    EADecider,
    brute_force_ea,
    classify_rees,
    cycle_check,
    euler_tour_label,
    incidence_graph,
    is_in_ea,
    path_label,
    rees_multiply,
    rees_representation,
    rees_to_parent,
    spanning_forest,
)


@pytest.fixture
def graham_path(tables_dir):
    return load_groupoid(tables_dir / "graham_path.mt")


@pytest.fixture
def graham_graph(graham_path):
    return incidence_graph(rees_representation(graham_path, 1))


def test_rees_representation_of_brandt(b2):
    r = rees_representation(b2, 2)
    assert r.a_indices == (2, 4)
    assert r.b_indices == (2, 3)
    assert r.h_class == frozenset({2})
    assert r.group.n == 1
    assert r.sandwich == {(2, 2): 2, (2, 4): ZERO, (3, 2): ZERO, (3, 4): 2}
    assert r.coordinates == {2: (2, 2, 2), 3: (2, 2, 3), 4: (4, 2, 2), 5: (4, 2, 3)}
    assert r.source.j_class == frozenset({2, 3, 4, 5})


def test_rees_representation_requires_an_idempotent(b2):
    with pytest.raises(NotIdempotent):
        rees_representation(b2, 3)


@pytest.mark.parametrize("table, e", [("b2.mt", 2), ("b2.mt", 5), ("graham_path.mt", 1)])
def test_rees_multiplication_matches_parent(tables_dir, table, e):
    s = load_groupoid(tables_dir / table)
    r = rees_representation(s, e)
    members = r.source.j_class
    for x, y in itertools.product(sorted(members), repeat=2):
        product = rees_multiply(r, r.coordinates[x], r.coordinates[y])
        if s.product(x, y) in members:
            assert rees_to_parent(r, product) == s.product(x, y)
        else:
            assert product is ZERO
    assert rees_multiply(r, ZERO, r.coordinates[min(members)]) is ZERO
    assert rees_to_parent(r, ZERO) is None


def test_incidence_graph_of_graham_path(graham_graph):
    assert graham_graph.rees.a_indices == (1, 7, 13)
    assert graham_graph.rees.b_indices == (1, 3, 5)
    assert len(graham_graph.edges) == 9
    assert graham_graph.rees.sandwich[(1, 13)] == 2
    assert graham_graph.rees.sandwich[(5, 1)] == 2


def test_spanning_forest_depends_on_edge_order(graham_graph):
    lexicographic = spanning_forest(graham_graph)
    assert lexicographic == {(1, 1), (1, 7), (1, 13), (3, 1), (5, 1)}
    reversed_forest = spanning_forest(graham_graph, "reversed")
    assert reversed_forest == {(5, 13), (5, 7), (5, 1), (3, 13), (1, 13)}
    explicit = spanning_forest(graham_graph, sorted(graham_graph.edges, reverse=True))
    assert explicit == reversed_forest


def test_spanning_forest_rejects_bad_orders(graham_graph):
    with pytest.raises(MalformedInput):
        spanning_forest(graham_graph, "random")
    with pytest.raises(MalformedInput):
        spanning_forest(graham_graph, [(1, 1)])


def test_cycle_check_reports_offending_cycle(graham_graph):
    verdict = cycle_check(graham_graph, spanning_forest(graham_graph))
    assert not verdict
    assert verdict.bridges == 4
    assert verdict.offending_bridge == (3, 13)
    assert verdict.offending_cycle == ["A13", "B1", "A1", "B3", "A13"]
    assert verdict.cycle_label == 2


def test_cycle_verdict_does_not_depend_on_forest(graham_graph):
    for order in ("lexicographic", "reversed"):
        assert not cycle_check(graham_graph, spanning_forest(graham_graph, order))


def test_cycle_check_rejects_non_forests(graham_graph):
    with pytest.raises(NotAForest):
        cycle_check(graham_graph, frozenset(graham_graph.edges))
    with pytest.raises(NotAForest):
        cycle_check(graham_graph, frozenset())
    with pytest.raises(NotAForest):
        cycle_check(graham_graph, frozenset({(1, 2)}))


def test_euler_tour_label_matches_path_label(graham_graph):
    vertices = sorted(graham_graph.graph.nodes)
    for order in ("lexicographic", "reversed"):
        forest = spanning_forest(graham_graph, order)
        for start, goal in itertools.product(vertices, repeat=2):
            assert euler_tour_label(graham_graph, forest, start, goal) == path_label(
                graham_graph, forest, start, goal
            )


def test_euler_tour_label_across_trees(b2):
    ig = incidence_graph(rees_representation(b2, 2))
    forest = spanning_forest(ig)
    assert euler_tour_label(ig, forest, ("A", 2), ("A", 4)) is None
    assert euler_tour_label(ig, forest, ("A", 2), ("B", 2)) == 2


def test_decider_trace_on_graham_path(graham_path):
    result = is_in_ea(graham_path)
    assert not result
    first, second = result.records
    assert (first.class_min_id, first.a_size, first.b_size, first.g_size) == (1, 3, 3, 2)
    assert (first.edges, first.bridges, first.verdict) == (9, 4, False)
    assert first.offending_cycle == ["A13", "B1", "A1", "B3", "A13"]
    assert second.class_min_id == 19 and second.verdict
    assert result.offending is first


def test_json_lines_have_sorted_keys(graham_path):
    lines = is_in_ea(graham_path).to_json_lines().splitlines()
    assert len(lines) == 2
    records = [json.loads(line) for line in lines]
    assert records[0]["offending_cycle"][0] == "A13"
    assert "offending_cycle" not in records[1]
    assert lines[1] == json.dumps(records[1], sort_keys=True)


def test_decider_agrees_with_brute_force(small_corpus, b2, graham_path):
    for s in small_corpus + [b2, graham_path]:
        assert is_in_ea(s).member == brute_force_ea(s), s.table


def test_decider_agrees_with_brute_force_on_transformations():
    rng = random.Random(11)
    for _ in range(30):
        s = random_transformation_semigroup(
            rng.randint(1, 3), rng.randint(1, 3), seed=rng.randrange(10**6)
        )
        assert is_in_ea(s).member == brute_force_ea(s), s.label()


@pytest.mark.slow
def test_decider_agrees_with_brute_force_on_order_three(order3_corpus):
    for s in order3_corpus:
        assert is_in_ea(s).member == brute_force_ea(s), s.table


def test_debug_mode_checks_every_base_idempotent(graham_path, caplog):
    decider = EADecider(
        create_toolkit_config(debug=True), logger=logging.getLogger("tests.ea")
    )
    with caplog.at_level(logging.DEBUG, logger="tests.ea"):
        assert not decider.decide(graham_path)
    assert not [r for r in caplog.records if r.levelno >= logging.ERROR]
    assert any("is not in EA" in r.getMessage() for r in caplog.records)


def test_classify_rees(graham_graph, b2):
    assert not classify_rees(graham_graph.rees)
    brandt = classify_rees(rees_representation(b2, 2), "AvG")
    assert brandt.member and brandt.variety == "AvG"
    assert brandt.scope == "Rees-scope only"
    with pytest.raises(UnknownVariety):
        classify_rees(graham_graph.rees, "A")


def _incidence_graphs(s):
    idem = idempotents(s)
    for block in j_classes(s, regular_only=True):
        yield incidence_graph(rees_representation(s, min(block & idem)))


def _assert_forest_independence(ig, rng):
    shuffled = sorted(ig.edges)
    rng.shuffle(shuffled)
    forests = [
        spanning_forest(ig),
        spanning_forest(ig, "reversed"),
        spanning_forest(ig, shuffled),
    ]
    verdicts = {cycle_check(ig, forest).holds for forest in forests}
    assert len(verdicts) == 1
    vertices = sorted(ig.graph.nodes)
    for forest in forests:
        for start, goal in itertools.product(vertices, repeat=2):
            walked = euler_tour_label(ig, forest, start, goal)
            if nx.has_path(ig.graph, start, goal):
                assert walked == path_label(ig, forest, start, goal)
            else:
                assert walked is None


def _graham_instances(count, seed_offset):
    for seed in range(count):
        g = random_graph(2 + seed % 7, p=0.3, seed=seed_offset + seed)
        yield graham_semigroup(g)


def _transformation_instances(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_transformation_semigroup(
            rng.randint(1, 3), rng.randint(1, 3), seed=rng.randrange(10**6)
        )


def test_forest_independence_on_generated_instances():
    rng = random.Random(17)
    instances = list(_graham_instances(15, 0)) + list(_transformation_instances(15, 23))
    for s in instances:
        for ig in _incidence_graphs(s):
            _assert_forest_independence(ig, rng)


@pytest.mark.slow
def test_forest_independence_on_every_acceptance_instance():
    rng = random.Random(29)
    instances = list(_graham_instances(200, 1000)) + list(_transformation_instances(30, 11))
    for s in instances:
        for ig in _incidence_graphs(s):
            _assert_forest_independence(ig, rng)
