"""
Test instances: the graph → Rees matrix semigroup construction, random
transformation semigroups, DFA transition semigroups and the exhaustive list
of small semigroups.

Transformations act on the left-to-right convention (f·g)(x) = g(f(x)), the
way a DFA reads a word.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from src.assets.config import ToolkitConfig, resolve_config
from src.assets.errors import InvalidGraph, MalformedInput, SemigroupToolkitError, SizeCap
from src.assets.groupoid import PartialGroupoid, associativity_witness

logger = logging.getLogger(__name__)

Transformation = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Graphs


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple graph on 1..v with two distinct, non-adjacent vertices s and t."""

    v: int
    edges: FrozenSet[FrozenSet[int]]
    s: int
    t: int

    def __post_init__(self):
        if self.v < 2:
            raise InvalidGraph("Graph needs at least two vertices")
        for vertex in (self.s, self.t):
            if not 1 <= vertex <= self.v:
                raise InvalidGraph(f"Vertex {vertex} outside 1..{self.v}")
        if self.s == self.t:
            raise InvalidGraph("s and t must differ")
        normalized = frozenset(frozenset(edge) for edge in self.edges)
        for edge in normalized:
            if len(edge) != 2 or not all(1 <= x <= self.v for x in edge):
                raise InvalidGraph(f"Invalid edge {sorted(edge)}")
        if frozenset({self.s, self.t}) in normalized:
            raise InvalidGraph("{s, t} must not be an edge")
        object.__setattr__(self, "edges", normalized)

    def adjacent(self, x: int, y: int) -> bool:
        return frozenset({x, y}) in self.edges

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.v + 1))
        graph.add_edges_from(tuple(edge) for edge in self.edges)
        return graph


def parse_graph(text: str) -> UndirectedGraph:
    """First line ``v s t``, then one ``x y`` edge per line; '#' comments."""
    lines = [raw.split("#", 1)[0].split() for raw in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise MalformedInput("Empty graph file")
    try:
        header = [int(tok) for tok in lines[0]]
        pairs = [tuple(int(tok) for tok in line) for line in lines[1:]]
    except ValueError as e:
        raise MalformedInput(f"Non-integer in graph file: {e}")
    if len(header) != 3:
        raise MalformedInput("Graph header must be 'v s t'")
    for pair in pairs:
        if len(pair) != 2:
            raise MalformedInput(f"Edge lines hold two vertices, got {pair}")
    v, s, t = header
    return UndirectedGraph(v, frozenset(frozenset(p) for p in pairs), s, t)


def format_graph(g: UndirectedGraph) -> str:
    lines = [f"{g.v} {g.s} {g.t}"]
    lines.extend(f"{x} {y}" for x, y in sorted(tuple(sorted(e)) for e in g.edges))
    return "\n".join(lines) + "\n"


def random_graph(vertices: int, p: float = 0.3, seed: Optional[int] = None) -> UndirectedGraph:
    """
    G(n, p) graph relabelled to 1..n with s, t drawn until they are distinct
    and non-adjacent (the graph is redrawn if no such pair exists).
    """
    if vertices < 2:
        raise InvalidGraph("Graph needs at least two vertices")
    rng = random.Random(seed)
    while True:
        graph = nx.gnp_random_graph(vertices, p, seed=rng.randrange(2**32))
        edges = frozenset(frozenset((x + 1, y + 1)) for x, y in graph.edges)
        free_pairs = [
            (x, y)
            for x, y in itertools.permutations(range(1, vertices + 1), 2)
            if frozenset((x, y)) not in edges
        ]
        if not free_pairs:
            continue
        while True:
            s, t = rng.randint(1, vertices), rng.randint(1, vertices)
            if s != t and frozenset((s, t)) not in edges:
                return UndirectedGraph(vertices, edges, s, t)


def reachable(g: UndirectedGraph) -> bool:
    """Whether t can be reached from s."""
    return nx.has_path(g.to_networkx(), g.s, g.t)


def graham_element(g: UndirectedGraph, v: int, a: bool, w: int) -> int:
    """Id of (v, a^[a], w); the zero is 2|V|² + 1."""
    return 1 + 2 * ((v - 1) * g.v + (w - 1)) + int(a)


def graham_semigroup(
    g: UndirectedGraph, config: Optional[ToolkitConfig] = None
) -> PartialGroupoid:
    """
    Rees matrix semigroup V × C₂ × V ∪ {0} over C₂ = {1, a} with sandwich
    C(v, w) = 1 if v = w or {v, w} ∈ E, a if {v, w} = {s, t}, 0 otherwise.

    It lies in 𝔼A iff t is not reachable from s.
    """
    config = resolve_config(config)
    zero = 2 * g.v * g.v + 1

    def sandwich(v: int, w: int) -> Optional[bool]:
        if v == w or g.adjacent(v, w):
            return False
        if {v, w} == {g.s, g.t}:
            return True
        return None

    triples = [
        (v, a, w)
        for v in range(1, g.v + 1)
        for w in range(1, g.v + 1)
        for a in (False, True)
    ]
    triples.sort(key=lambda triple: graham_element(g, *triple))
    rows = []
    for v1, a1, w1 in triples:
        row = []
        for v2, a2, w2 in triples:
            c = sandwich(w1, v2)
            row.append(zero if c is None else graham_element(g, v1, a1 ^ c ^ a2, w2))
        row.append(zero)
        rows.append(tuple(row))
    rows.append(tuple([zero] * zero))

    s = PartialGroupoid(
        zero, tuple(rows), name=f"graham_v{g.v}_e{len(g.edges)}", semigroup=True
    )
    if config.debug:
        witness = associativity_witness(s)
        if witness is not None:
            raise SemigroupToolkitError(f"Generated table is not associative at {witness}")
    logger.info(f"Generated Graham semigroup with {zero} elements from {g.v} vertices")
    return s


# ---------------------------------------------------------------------------
# Transformation semigroups


def compose(f: Transformation, g: Transformation) -> Transformation:
    """(f·g)(x) = g(f(x)) on points 1..k."""
    return tuple(g[x - 1] for x in f)


@dataclass
class TransformationClosure:
    maps: List[Transformation]
    semigroup: PartialGroupoid
    generator_ids: List[int] = field(default_factory=list)


def transformation_closure(
    generators: Sequence[Transformation],
    size_cap: int = 4096,
    name: Optional[str] = None,
) -> TransformationClosure:
    """
    Semigroup generated by self-maps of 1..k under composition, elements
    numbered in order of discovery.

    Raises:
        SizeCap: If the closure has more than `size_cap` elements
    """
    if not generators:
        raise MalformedInput("At least one generator is required")
    index: Dict[Transformation, int] = {}
    maps: List[Transformation] = []

    def add(f: Transformation) -> int:
        if f not in index:
            if len(maps) >= size_cap:
                raise SizeCap(f"Transformation semigroup exceeds {size_cap} elements")
            index[f] = len(maps)
            maps.append(f)
        return index[f]

    generator_ids = [add(tuple(f)) + 1 for f in generators]
    position = 0
    while position < len(maps):
        for gen in generators:
            add(compose(maps[position], tuple(gen)))
        position += 1

    rows = tuple(
        tuple(index[compose(f, g)] + 1 for g in maps) for f in maps
    )
    semigroup = PartialGroupoid(len(maps), rows, name=name, semigroup=True)
    return TransformationClosure(maps, semigroup, generator_ids)


def random_transformation_semigroup(
    points: int,
    generators: int,
    seed: Optional[int] = None,
    config: Optional[ToolkitConfig] = None,
) -> PartialGroupoid:
    """Closure of `generators` random self-maps of 1..points; deterministic per seed."""
    if points < 1 or generators < 1:
        raise MalformedInput("Need at least one point and one generator")
    config = resolve_config(config)
    rng = random.Random(seed)
    gens = [
        tuple(rng.randint(1, points) for _ in range(points)) for _ in range(generators)
    ]
    closure = transformation_closure(
        gens, config.size_cap, name=f"transformations_k{points}_m{generators}_seed{seed}"
    )
    logger.info(f"Generated transformation semigroup of order {closure.semigroup.n}")
    return closure.semigroup


# ---------------------------------------------------------------------------
# Automata


@dataclass(frozen=True)
class Dfa:
    """Complete DFA on states 1..states; `transitions[(q, letter)]` is the target."""

    states: int
    alphabet: Tuple[str, ...]
    transitions: Dict[Tuple[int, str], int] = field(hash=False)

    def __post_init__(self):
        if self.states < 1 or not self.alphabet:
            raise MalformedInput("A DFA needs states and letters")
        for q in range(1, self.states + 1):
            for letter in self.alphabet:
                target = self.transitions.get((q, letter))
                if target is None or not 1 <= target <= self.states:
                    raise MalformedInput(f"Missing or invalid transition ({q}, {letter})")

    def letter_map(self, letter: str) -> Transformation:
        return tuple(self.transitions[(q, letter)] for q in range(1, self.states + 1))


def parse_dfa(text: str) -> Dfa:
    """Header ``states letter₁ … letterₘ`` then one row of targets per state."""
    lines = [raw.split("#", 1)[0].split() for raw in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise MalformedInput("Empty DFA file")
    header = lines[0]
    try:
        states = int(header[0])
        rows = [[int(tok) for tok in line] for line in lines[1:]]
    except ValueError as e:
        raise MalformedInput(f"Non-integer in DFA file: {e}")
    alphabet = tuple(header[1:])
    if len(rows) != states:
        raise MalformedInput(f"Expected {states} transition rows, found {len(rows)}")
    transitions = {}
    for q, row in enumerate(rows, start=1):
        if len(row) != len(alphabet):
            raise MalformedInput(f"State {q} has {len(row)} targets, expected {len(alphabet)}")
        for letter, target in zip(alphabet, row):
            transitions[(q, letter)] = target
    return Dfa(states, alphabet, transitions)


def dfa_transition_semigroup(
    d: Dfa, config: Optional[ToolkitConfig] = None
) -> Tuple[PartialGroupoid, Dict[str, int]]:
    """Transition semigroup of d and the element id of every letter."""
    config = resolve_config(config)
    closure = transformation_closure(
        [d.letter_map(letter) for letter in d.alphabet],
        config.size_cap,
        name=f"transition semigroup of a {d.states}-state DFA",
    )
    letters = dict(zip(d.alphabet, closure.generator_ids))
    return closure.semigroup, letters


# ---------------------------------------------------------------------------
# Exhaustive enumeration


def _rows_consistent(n: int, rows: List[Tuple[int, ...]]) -> bool:
    """Associativity on every triple (a, b, c) whose products lie in the filled rows."""
    filled = len(rows)
    for a in range(filled):
        row_a = rows[a]
        for b in range(filled):
            ab = row_a[b]
            if ab >= filled:
                continue
            row_b, row_ab = rows[b], rows[ab]
            for c in range(n):
                if row_ab[c] != row_a[row_b[c]]:
                    return False
    return True


def enumerate_semigroups(n: int) -> Iterator[PartialGroupoid]:
    """
    Every associative table on 1..n, in lexicographic order of the table.

    Rows are chosen one at a time; a partial table is abandoned as soon as a
    triple whose products are all known fails associativity.
    """
    if n < 1:
        raise MalformedInput("Order must be positive")
    rows: List[Tuple[int, ...]] = []

    def extend() -> Iterator[Tuple[Tuple[int, ...], ...]]:
        if len(rows) == n:
            yield tuple(rows)
            return
        for row in itertools.product(range(n), repeat=n):
            rows.append(row)
            if _rows_consistent(n, rows):
                yield from extend()
            rows.pop()

    for count, table in enumerate(extend(), start=1):
        shifted = tuple(tuple(v + 1 for v in row) for row in table)
        yield PartialGroupoid(n, shifted, name=f"order{n}_#{count}", semigroup=True)


def load_text(path: Union[str, Path], encoding: str = "utf-8") -> str:
    file_path = Path(path)
    try:
        return file_path.read_text(encoding=encoding)
    except UnicodeDecodeError as e:
        raise MalformedInput(f"Encoding error reading {file_path}: {e}")
    except OSError as e:
        raise MalformedInput(f"Error reading {file_path}: {e}")
