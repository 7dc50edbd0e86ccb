"""
Membership in 𝔼A, the finite semigroups whose idempotent-generated
subsemigroup is aperiodic.

Each regular J-class is put into Rees matrix form (A, G, B, C) around its
minimal idempotent e. The incidence graph joins b ∈ B to a ∈ A whenever
C(b, a) lies in the structure group, labelled by that group element; the
semigroup is in 𝔼A iff every simple cycle of every such graph has label 1.
Cycles are checked through the bridges of a spanning forest.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx

from src.assets.config import ToolkitConfig, resolve_config, setup_default_logger
from src.assets.errors import (
    MalformedInput,
    NotAForest,
    NotIdempotent,
    SemigroupToolkitError,
    UnknownVariety,
)
from src.assets.groupoid import (
    PartialGroupoid,
    generated_subset,
    green_classes,
    idempotents,
    induced_partial,
    j_classes,
    require_semigroup,
    subsemigroup,
)

logger = logging.getLogger(__name__)


class Zero(Enum):
    """The adjoined zero of a Rees matrix semigroup, never an element id."""

    ZERO = "0"

    def __repr__(self) -> str:
        return "ZERO"


ZERO = Zero.ZERO
Triple = Tuple[int, int, int]
Vertex = Tuple[str, int]


@dataclass(frozen=True)
class ReesSource:
    parent: str
    j_class: FrozenSet[int]
    idempotent: int


@dataclass(eq=False)
class ReesMatrixSemigroup:
    """
    Rees coordinates of a regular J-class.

    A and B list minimal elements of the H-classes in the L-class and the
    R-class of e. Group elements are the parent's ids in H_e, multiplied in the
    parent. `coordinates` maps each parent element of the J-class to its triple
    (a, g, b) with a·g·b = element.
    """

    parent: PartialGroupoid
    a_indices: Tuple[int, ...]
    b_indices: Tuple[int, ...]
    identity: int
    h_class: FrozenSet[int]
    group: PartialGroupoid
    sandwich: Dict[Tuple[int, int], Union[int, Zero]]
    inverses: Dict[int, int]
    coordinates: Dict[int, Triple]
    source: ReesSource

    def multiply(self, g: int, h: int) -> int:
        return self.parent.product(g, h)

    def inverse(self, g: int) -> int:
        return self.inverses[g]


def rees_representation(s: PartialGroupoid, e: int) -> ReesMatrixSemigroup:
    """
    Rees matrix representation of the J-class of the idempotent e.

    Raises:
        NotASemigroup: If s is not a semigroup
        NotIdempotent: If e·e ≠ e
    """
    require_semigroup(s, "rees_representation")
    if s.product(e, e) != e:
        raise NotIdempotent(f"Element {e} of {s.label()} is not idempotent")

    r_classes = green_classes(s, "R")
    l_classes = green_classes(s, "L")
    h_classes = green_classes(s, "H")
    j_partition = green_classes(s, "J")

    r_e = r_classes.classes[r_classes.class_of[e]]
    l_e = l_classes.classes[l_classes.class_of[e]]
    h_e = h_classes.classes[h_classes.class_of[e]]
    j_e = j_partition.classes[j_partition.class_of[e]]

    a_indices = tuple(sorted({min(h_classes.classes[h_classes.class_of[x]]) for x in l_e}))
    b_indices = tuple(sorted({min(h_classes.classes[h_classes.class_of[x]]) for x in r_e}))

    inverses = {}
    for g in h_e:
        for candidate in h_e:
            if s.product(g, candidate) == e == s.product(candidate, g):
                inverses[g] = candidate
                break
        else:
            raise SemigroupToolkitError(f"H-class of {e} is not a group")

    sandwich: Dict[Tuple[int, int], Union[int, Zero]] = {}
    for b in b_indices:
        for a in a_indices:
            ba = s.product(b, a)
            sandwich[(b, a)] = ba if ba in h_e else ZERO

    coordinates = {}
    for a in a_indices:
        for g in sorted(h_e):
            for b in b_indices:
                coordinates[s.product(s.product(a, g), b)] = (a, g, b)
    if set(coordinates) != set(j_e):
        raise SemigroupToolkitError(
            f"Rees coordinates do not cover the J-class of {e} in {s.label()}"
        )

    group = induced_partial(s, h_e)
    logger.debug(
        f"Rees form of J-class {min(j_e)}: |A|={len(a_indices)}, "
        f"|B|={len(b_indices)}, |G|={len(h_e)}"
    )
    return ReesMatrixSemigroup(
        parent=s,
        a_indices=a_indices,
        b_indices=b_indices,
        identity=e,
        h_class=h_e,
        group=group,
        sandwich=sandwich,
        inverses=inverses,
        coordinates=coordinates,
        source=ReesSource(s.label(), j_e, e),
    )


def rees_to_parent(r: ReesMatrixSemigroup, triple: Union[Triple, Zero]) -> Optional[int]:
    """Parent element a·g·b of a triple; None for the adjoined zero."""
    if triple is ZERO:
        return None
    a, g, b = triple
    return r.parent.product(r.parent.product(a, g), b)


def rees_multiply(
    r: ReesMatrixSemigroup, x: Union[Triple, Zero], y: Union[Triple, Zero]
) -> Union[Triple, Zero]:
    """(a₁, g₁, b₁)(a₂, g₂, b₂) = (a₁, g₁·C(b₁, a₂)·g₂, b₂), or zero."""
    if x is ZERO or y is ZERO:
        return ZERO
    a1, g1, b1 = x
    a2, g2, b2 = y
    c = r.sandwich[(b1, a2)]
    if c is ZERO:
        return ZERO
    return (a1, r.multiply(r.multiply(g1, c), g2), b2)


# ---------------------------------------------------------------------------
# Incidence graph and spanning forests


@dataclass(eq=False)
class IncidenceGraph:
    """Bipartite graph on ("A", a) and ("B", b) with an edge per non-zero C(b, a)."""

    rees: ReesMatrixSemigroup
    graph: nx.Graph
    edges: Tuple[Tuple[int, int], ...]

    def label(self, u: Vertex, v: Vertex) -> int:
        """Label of the traversal u → v; B → A reads C(b, a), A → B its inverse."""
        if u[0] == "B":
            return self.rees.sandwich[(u[1], v[1])]
        return self.rees.inverse(self.rees.sandwich[(v[1], u[1])])


def incidence_graph(r: ReesMatrixSemigroup) -> IncidenceGraph:
    graph = nx.Graph()
    graph.add_nodes_from(("A", a) for a in r.a_indices)
    graph.add_nodes_from(("B", b) for b in r.b_indices)
    edges = []
    for b in r.b_indices:
        for a in r.a_indices:
            c = r.sandwich[(b, a)]
            if c is not ZERO:
                graph.add_edge(("B", b), ("A", a), label=c)
                edges.append((b, a))
    return IncidenceGraph(r, graph, tuple(edges))


def spanning_forest(
    ig: IncidenceGraph, order: Union[str, Sequence[Tuple[int, int]]] = "lexicographic"
) -> FrozenSet[Tuple[int, int]]:
    """
    Greedy spanning forest: an edge joins the forest iff its endpoints are not
    yet connected by earlier edges of `order`.

    Args:
        ig: The incidence graph
        order: "lexicographic", "reversed" or an explicit permutation of edges
    """
    if order == "lexicographic":
        ordered = sorted(ig.edges)
    elif order == "reversed":
        ordered = sorted(ig.edges, reverse=True)
    elif isinstance(order, str):
        raise MalformedInput(f"Unknown edge order: {order}")
    else:
        ordered = list(order)
        if sorted(ordered) != sorted(ig.edges):
            raise MalformedInput("Edge order must be a permutation of the graph's edges")

    components = nx.utils.UnionFind(ig.graph.nodes)
    forest = []
    for b, a in ordered:
        if components[("B", b)] != components[("A", a)]:
            components.union(("B", b), ("A", a))
            forest.append((b, a))
    return frozenset(forest)


def _forest_graph(ig: IncidenceGraph, forest: FrozenSet[Tuple[int, int]]) -> nx.Graph:
    tree = nx.Graph()
    tree.add_nodes_from(ig.graph.nodes)
    tree.add_edges_from((("B", b), ("A", a)) for b, a in forest)
    return tree


def _validate_forest(ig: IncidenceGraph, forest: FrozenSet[Tuple[int, int]]) -> nx.Graph:
    if not set(forest) <= set(ig.edges):
        raise NotAForest("Forest uses edges outside the incidence graph")
    tree = _forest_graph(ig, forest)
    if not nx.is_forest(tree):
        raise NotAForest("Edge set contains a cycle")
    if nx.number_connected_components(tree) != nx.number_connected_components(ig.graph):
        raise NotAForest("Edge set does not span every component")
    return tree


def _vertex_name(v: Vertex) -> str:
    return f"{v[0]}{v[1]}"


@dataclass
class CycleVerdict:
    """Result of the bridge check; `offending_cycle` lists vertices a … b a."""

    holds: bool
    bridges: int
    offending_bridge: Optional[Tuple[int, int]] = None
    offending_cycle: Optional[List[str]] = None
    cycle_label: Optional[int] = None

    def __bool__(self) -> bool:
        return self.holds


def forest_potentials(ig: IncidenceGraph, tree: nx.Graph) -> Dict[Vertex, int]:
    """pot(root) = e and pot(v) = pot(u)·label(u → v) along tree edges."""
    group = ig.rees
    potentials: Dict[Vertex, int] = {}
    for component in sorted(nx.connected_components(tree), key=min):
        root = min(component)
        potentials[root] = group.identity
        for u, v in nx.bfs_edges(tree, root, sort_neighbors=sorted):
            potentials[v] = group.multiply(potentials[u], ig.label(u, v))
    return potentials


def cycle_check(ig: IncidenceGraph, forest: FrozenSet[Tuple[int, int]]) -> CycleVerdict:
    """
    Check that every bridge closes a cycle with label 1.

    The bridge (b, a) passes iff pot(b)·C(b, a) = pot(a).

    Raises:
        NotAForest: If `forest` is not a spanning forest of ig
    """
    tree = _validate_forest(ig, forest)
    potentials = forest_potentials(ig, tree)
    group = ig.rees
    bridges = [edge for edge in ig.edges if edge not in forest]
    for b, a in bridges:
        through = group.multiply(potentials[("B", b)], group.sandwich[(b, a)])
        if through != potentials[("A", a)]:
            path = nx.shortest_path(tree, ("A", a), ("B", b))
            label = group.multiply(path_label(ig, forest, ("A", a), ("B", b)), group.sandwich[(b, a)])
            return CycleVerdict(
                False,
                len(bridges),
                offending_bridge=(b, a),
                offending_cycle=[_vertex_name(v) for v in path] + [_vertex_name(path[0])],
                cycle_label=label,
            )
    return CycleVerdict(True, len(bridges))


def path_label(
    ig: IncidenceGraph, forest: FrozenSet[Tuple[int, int]], start: Vertex, goal: Vertex
) -> int:
    """Label product along the unique forest path from start to goal."""
    path = nx.shortest_path(_forest_graph(ig, forest), start, goal)
    label = ig.rees.identity
    for u, v in zip(path, path[1:]):
        label = ig.rees.multiply(label, ig.label(u, v))
    return label


def euler_tour_label(
    ig: IncidenceGraph, forest: FrozenSet[Tuple[int, int]], start: Vertex, goal: Vertex
) -> Optional[int]:
    """
    Label of the walk that follows an Euler tour of the forest from start
    until it reaches goal, multiplying labels edge by edge. Edges walked twice
    cancel, so the result is the forest path label. None when goal lies in
    another tree.
    """
    group = ig.rees
    if start == goal:
        return group.identity

    incident: Dict[Vertex, List[Tuple[int, int]]] = {}
    for b, a in sorted(forest):
        incident.setdefault(("B", b), []).append((b, a))
        incident.setdefault(("A", a), []).append((b, a))
    if start not in incident:
        return None

    label = group.identity
    current = start
    edge = incident[start][0]
    for _ in range(2 * len(forest)):
        b, a = edge
        following = ("A", a) if current == ("B", b) else ("B", b)
        label = group.multiply(label, ig.label(current, following))
        current = following
        if current == goal:
            return label
        options = incident[current]
        later = [candidate for candidate in options if candidate > edge]
        edge = later[0] if later else options[0]
    return None


# ---------------------------------------------------------------------------
# Deciders


@dataclass
class JClassRecord:
    """One line of the decision trace."""

    class_min_id: int
    a_size: int
    b_size: int
    g_size: int
    edges: int
    bridges: int
    verdict: bool
    offending_cycle: Optional[List[str]] = None

    def to_dict(self) -> dict:
        record = {
            "class_min_id": self.class_min_id,
            "|A|": self.a_size,
            "|B|": self.b_size,
            "|G|": self.g_size,
            "edges": self.edges,
            "bridges": self.bridges,
            "verdict": self.verdict,
        }
        if self.offending_cycle is not None:
            record["offending_cycle"] = self.offending_cycle
        return record


@dataclass
class EAResult:
    member: bool
    records: List[JClassRecord] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.member

    @property
    def offending(self) -> Optional[JClassRecord]:
        return next((r for r in self.records if not r.verdict), None)

    def to_json_lines(self) -> str:
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in self.records)


class EADecider:
    """
    Structural 𝔼A decider, one Rees representation per regular J-class.

    In debug mode every idempotent of each class is tried as the base point
    and disagreements are logged as errors.
    """

    def __init__(
        self, config: Optional[ToolkitConfig] = None, logger: Optional[logging.Logger] = None
    ):
        self.config = resolve_config(config)
        self.logger = logger or setup_default_logger(__name__)

    def decide(self, s: PartialGroupoid) -> EAResult:
        require_semigroup(s, "is_in_ea")
        idem = idempotents(s)
        records = []
        for block in j_classes(s, regular_only=True):
            e = min(block & idem)
            record = self._check_class(s, block, e)
            records.append(record)
            self.logger.debug(f"J-class {record.class_min_id}: {record.to_dict()}")
            if self.config.debug:
                self._check_independence(s, block, idem, record.verdict)

        result = EAResult(all(r.verdict for r in records), records)
        self.logger.info(
            f"{s.label()} {'is' if result.member else 'is not'} in EA "
            f"({len(records)} regular J-classes)"
        )
        return result

    def _check_class(self, s: PartialGroupoid, block: FrozenSet[int], e: int) -> JClassRecord:
        r = rees_representation(s, e)
        ig = incidence_graph(r)
        verdict = cycle_check(ig, spanning_forest(ig))
        return JClassRecord(
            class_min_id=min(block),
            a_size=len(r.a_indices),
            b_size=len(r.b_indices),
            g_size=len(r.h_class),
            edges=len(ig.edges),
            bridges=verdict.bridges,
            verdict=verdict.holds,
            offending_cycle=verdict.offending_cycle,
        )

    def _check_independence(
        self, s: PartialGroupoid, block: FrozenSet[int], idem: FrozenSet[int], verdict: bool
    ) -> None:
        for e in sorted(block & idem):
            other = self._check_class(s, block, e).verdict
            if other != verdict:
                self.logger.error(
                    f"Verdict for J-class {min(block)} changes with base idempotent {e}"
                )


def is_in_ea(s: PartialGroupoid, config: Optional[ToolkitConfig] = None) -> EAResult:
    return EADecider(config, logger=logger).decide(s)


def brute_force_ea(s: PartialGroupoid) -> bool:
    """⟨E(S)⟩ built explicitly and tested for H-triviality."""
    require_semigroup(s, "brute_force_ea")
    generated = subsemigroup(s, generated_subset(s, idempotents(s)))
    return all(len(block) == 1 for block in green_classes(generated, "H").classes)


REES_VARIETIES = ("EA", "AvG", "AstarG")


@dataclass
class ReesVerdict:
    member: bool
    variety: str
    scope: str = "Rees-scope only"

    def __bool__(self) -> bool:
        return self.member


def classify_rees(r: ReesMatrixSemigroup, variety: str = "EA") -> ReesVerdict:
    """
    𝔼A, A∨G and A*G coincide on Rees matrix semigroups; all three names use
    the cycle-label criterion.
    """
    if variety not in REES_VARIETIES:
        raise UnknownVariety(
            f"Unknown Rees variety '{variety}', expected one of {', '.join(REES_VARIETIES)}"
        )
    ig = incidence_graph(r)
    return ReesVerdict(cycle_check(ig, spanning_forest(ig)).holds, variety)
