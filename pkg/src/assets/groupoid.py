"""
Finite partial groupoids given by multiplication tables.

Elements are the ids 1..n; the table entry 0 means "product undefined". The
module covers parsing and serializing the text (.mt) and packed (.mtb) table
formats, Green's relations, the omega operator, substructures, direct products
and quotients.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import networkx as nx

from src.assets.errors import (
    EmptySubset,
    MalformedInput,
    NotACongruence,
    NotASemigroup,
    NotIdempotent,
)

logger = logging.getLogger(__name__)

UNDEFINED = 0
PACKED_HEADER_BYTES = 8


class GreenRelation(str, Enum):
    """Green's preorders and equivalences, spelled as in the formula DSL."""

    LEQ_R = "<=R"
    LEQ_L = "<=L"
    LEQ_J = "<=J"
    LEQ_H = "<=H"
    R = "R"
    L = "L"
    J = "J"
    H = "H"

    @property
    def is_preorder(self) -> bool:
        return self.value.startswith("<=")

    @property
    def letter(self) -> str:
        return self.value[-1]


@dataclass(frozen=True)
class PartialGroupoid:
    """
    A finite partial groupoid as an n×n table over {0, 1..n}.

    `semigroup` flags tables known to be total and associative (generators set
    it so that large instances skip the n³ check). `origin` maps the ids of an
    induced structure back to the ids of its parent.
    """

    n: int
    table: Tuple[Tuple[int, ...], ...]
    name: Optional[str] = field(default=None, compare=False)
    semigroup: bool = field(default=False, compare=False)
    origin: Optional[Tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise MalformedInput("A partial groupoid needs at least one element")

        rows = tuple(tuple(int(v) for v in row) for row in self.table)
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            raise MalformedInput(f"Table must be {self.n}x{self.n}")
        for row in rows:
            for value in row:
                if value < 0 or value > self.n:
                    raise MalformedInput(
                        f"Table entry {value} outside 0..{self.n}"
                    )
        object.__setattr__(self, "table", rows)

    @property
    def elements(self) -> range:
        return range(1, self.n + 1)

    def product(self, x: int, y: int) -> int:
        """Return x·y, or 0 when the product is undefined."""
        return self.table[x - 1][y - 1]

    def label(self) -> str:
        return self.name or f"groupoid of order {self.n}"

    @cached_property
    def is_semigroup(self) -> bool:
        return self.semigroup or associativity_witness(self) is None

    @cached_property
    def right_ideals(self) -> Tuple[FrozenSet[int], ...]:
        """Principal right ideals yS¹ (index y-1)."""
        return tuple(
            frozenset({y} | {v for v in self.table[y - 1] if v}) for y in self.elements
        )

    @cached_property
    def left_ideals(self) -> Tuple[FrozenSet[int], ...]:
        """Principal left ideals S¹y (index y-1)."""
        return tuple(
            frozenset({y} | {self.table[p - 1][y - 1] for p in self.elements} - {0})
            for y in self.elements
        )

    @cached_property
    def two_sided_ideals(self) -> Tuple[FrozenSet[int], ...]:
        """S¹yS¹ evaluated as {y} ∪ yS ∪ Sy ∪ (Sy)S."""
        ideals = []
        for y in self.elements:
            ideal = set(self.right_ideals[y - 1]) | set(self.left_ideals[y - 1])
            for p in self.elements:
                py = self.table[p - 1][y - 1]
                if py:
                    ideal.update(v for v in self.table[py - 1] if v)
            ideals.append(frozenset(ideal))
        return tuple(ideals)


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty classes covering 1..n, ordered by minimal member."""

    classes: Tuple[FrozenSet[int], ...]

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]], n: int) -> "Partition":
        blocks = [frozenset(c) for c in classes]
        if any(not block for block in blocks):
            raise MalformedInput("Partition classes must be non-empty")
        covered = [x for block in blocks for x in block]
        if len(covered) != len(set(covered)) or set(covered) != set(range(1, n + 1)):
            raise MalformedInput(f"Classes must be disjoint and cover 1..{n}")
        return cls(tuple(sorted(blocks, key=min)))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls.from_classes(([x] for x in range(1, n + 1)), n)

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls.from_classes([range(1, n + 1)], n)

    @cached_property
    def class_of(self) -> Dict[int, int]:
        return {x: i for i, block in enumerate(self.classes) for x in block}

    def same(self, x: int, y: int) -> bool:
        return self.class_of[x] == self.class_of[y]

    def as_lists(self) -> List[List[int]]:
        return [sorted(block) for block in self.classes]


# ---------------------------------------------------------------------------
# Table formats


def _packed_width(n: int) -> int:
    # ⌈log2(n+1)⌉ bits per entry
    return n.bit_length()


def parse_groupoid(
    source: Union[str, bytes], format: str = "text", name: Optional[str] = None
) -> PartialGroupoid:
    """
    Parse a multiplication table.

    Args:
        source: Text (.mt) or bytes (.mtb) content
        format: "text" or "packed"
        name: Optional label stored as metadata

    Returns:
        The parsed PartialGroupoid

    Raises:
        MalformedInput: On bad syntax, wrong row count or n = 0
    """
    if format == "text":
        if isinstance(source, bytes):
            try:
                source = source.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedInput(f"Encoding error reading table: {e}")
        return _parse_text(source, name)
    if format == "packed":
        if isinstance(source, str):
            raise MalformedInput("Packed tables must be given as bytes")
        return _parse_packed(source, name)
    raise MalformedInput(f"Unknown table format: {format}")


def _parse_text(text: str, name: Optional[str]) -> PartialGroupoid:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MalformedInput("Empty table file")

    try:
        header = lines[0].split()
        if len(header) != 1:
            raise MalformedInput(f"First line must hold only n, got '{lines[0]}'")
        n = int(header[0])
        rows = [[int(tok) for tok in line.split()] for line in lines[1:]]
    except ValueError as e:
        raise MalformedInput(f"Non-integer table entry: {e}")

    if n < 1:
        raise MalformedInput("A partial groupoid needs at least one element")
    if len(rows) != n:
        raise MalformedInput(f"Expected {n} table rows, found {len(rows)}")
    for i, row in enumerate(rows, start=1):
        if len(row) != n:
            raise MalformedInput(f"Row {i} has {len(row)} entries, expected {n}")
    return PartialGroupoid(n, tuple(tuple(row) for row in rows), name=name)


def _parse_packed(data: bytes, name: Optional[str]) -> PartialGroupoid:
    if len(data) < PACKED_HEADER_BYTES:
        raise MalformedInput("Packed table is shorter than its header")
    n = int.from_bytes(data[:PACKED_HEADER_BYTES], "big")
    if n < 1:
        raise MalformedInput("A partial groupoid needs at least one element")

    width = _packed_width(n)
    total_bits = n * n * width
    body = data[PACKED_HEADER_BYTES:]
    expected = (total_bits + 7) // 8
    if len(body) != expected:
        raise MalformedInput(
            f"Packed body has {len(body)} bytes, expected {expected} for n={n}"
        )

    bits = int.from_bytes(body, "big") >> (expected * 8 - total_bits)
    mask = (1 << width) - 1
    values = []
    for i in range(n * n):
        shift = (n * n - 1 - i) * width
        value = (bits >> shift) & mask
        # invalid encodings mean "undefined"
        values.append(value if value <= n else UNDEFINED)
    rows = tuple(tuple(values[r * n : (r + 1) * n]) for r in range(n))
    return PartialGroupoid(n, rows, name=name)


def serialize_groupoid(g: PartialGroupoid, format: str = "text") -> Union[str, bytes]:
    """Render g in the text or packed table format."""
    if format == "text":
        lines = []
        if g.name:
            lines.append(f"# {g.name}")
        lines.append(str(g.n))
        lines.extend(" ".join(str(v) for v in row) for row in g.table)
        return "\n".join(lines) + "\n"
    if format == "packed":
        width = _packed_width(g.n)
        total_bits = g.n * g.n * width
        nbytes = (total_bits + 7) // 8
        bits = 0
        for row in g.table:
            for value in row:
                bits = (bits << width) | value
        bits <<= nbytes * 8 - total_bits
        return g.n.to_bytes(PACKED_HEADER_BYTES, "big") + bits.to_bytes(nbytes, "big")
    raise MalformedInput(f"Unknown table format: {format}")


def infer_format(path: Union[str, Path]) -> str:
    return "packed" if Path(path).suffix.lower() == ".mtb" else "text"


def load_groupoid(
    path: Union[str, Path], format: Optional[str] = None, encoding: str = "utf-8"
) -> PartialGroupoid:
    """Read a table file; the format defaults to the one implied by the suffix."""
    file_path = Path(path)
    fmt = format or infer_format(file_path)
    if not file_path.is_file():
        raise MalformedInput(f"Input file not found: {file_path}")
    try:
        if fmt == "packed":
            source: Union[str, bytes] = file_path.read_bytes()
        else:
            source = file_path.read_text(encoding=encoding)
    except UnicodeDecodeError as e:
        raise MalformedInput(f"Encoding error reading {file_path}: {e}")
    except OSError as e:
        raise MalformedInput(f"Error reading {file_path}: {e}")

    g = parse_groupoid(source, fmt, name=file_path.stem)
    logger.info(f"Read {fmt} table of order {g.n} from {file_path}")
    return g


def load_groupoid_safe(
    path: Union[str, Path], format: Optional[str] = None
) -> Optional[PartialGroupoid]:
    """Version of load_groupoid that logs failures and returns None."""
    try:
        return load_groupoid(path, format)
    except MalformedInput as e:
        logger.error(f"Loading table failed: {e}")
        return None


def save_groupoid(
    g: PartialGroupoid, path: Union[str, Path], format: Optional[str] = None
) -> Path:
    file_path = Path(path)
    fmt = format or infer_format(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    payload = serialize_groupoid(g, fmt)
    if isinstance(payload, bytes):
        file_path.write_bytes(payload)
    else:
        file_path.write_text(payload, encoding="utf-8")
    logger.info(f"Wrote {fmt} table of order {g.n} to {file_path}")
    return file_path


# ---------------------------------------------------------------------------
# Basic properties


def is_total(g: PartialGroupoid) -> bool:
    return all(v != UNDEFINED for row in g.table for v in row)


def associativity_witness(g: PartialGroupoid) -> Optional[Tuple[int, int, int]]:
    """First triple (x, y, z) in lexicographic order with (xy)z ≠ x(yz)."""
    if not is_total(g):
        for x, y in itertools.product(g.elements, repeat=2):
            if g.product(x, y) == UNDEFINED:
                return (x, y, 0)
    t = g.table
    for x in g.elements:
        row_x = t[x - 1]
        for y in g.elements:
            row_xy = t[row_x[y - 1] - 1]
            row_y = t[y - 1]
            for z in g.elements:
                if row_xy[z - 1] != row_x[row_y[z - 1] - 1]:
                    return (x, y, z)
    return None


def is_associative(g: PartialGroupoid) -> bool:
    """True iff g is total and (xy)z = x(yz) for all triples."""
    return associativity_witness(g) is None


def require_semigroup(g: PartialGroupoid, operation: str = "operation") -> None:
    if not g.is_semigroup:
        witness = associativity_witness(g)
        raise NotASemigroup(
            f"{operation} needs a semigroup, but {g.label()} is not "
            f"(first failing triple {witness})",
            witness=witness,
        )


def idempotents(g: PartialGroupoid) -> FrozenSet[int]:
    return frozenset(x for x in g.elements if g.product(x, x) == x)


def omega(g: PartialGroupoid, x: int) -> Optional[int]:
    """
    The unique idempotent among the powers x, x·x, (x·x)·x, ...

    Returns None (undefined) when the powers contain no idempotent or more than
    one, or when a product is undefined before an idempotent shows up.
    """
    powers: List[int] = []
    seen = set()
    p = x
    for _ in range(g.n + 1):
        if p == UNDEFINED or p in seen:
            break
        powers.append(p)
        seen.add(p)
        p = g.product(p, x)
    found = [q for q in powers if g.product(q, q) == q]
    return found[0] if len(found) == 1 else None


def green_holds(g: PartialGroupoid, rel: GreenRelation, x: int, y: int) -> bool:
    """Truth of `x rel y`, with multipliers ranging over S¹."""
    rel = GreenRelation(rel)
    letter = rel.letter
    if rel.is_preorder:
        if letter == "R":
            return x in g.right_ideals[y - 1]
        if letter == "L":
            return x in g.left_ideals[y - 1]
        if letter == "J":
            return x in g.two_sided_ideals[y - 1]
        return x in g.right_ideals[y - 1] and x in g.left_ideals[y - 1]
    below = GreenRelation("<=" + letter)
    return green_holds(g, below, x, y) and green_holds(g, below, y, x)


# ---------------------------------------------------------------------------
# Green classes


def _scc_partition(n: int, graph: nx.DiGraph) -> Partition:
    return Partition.from_classes(nx.strongly_connected_components(graph), n)


def _right_cayley_graph(g: PartialGroupoid) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(g.elements)
    graph.add_edges_from(
        (y, v) for y in g.elements for v in g.table[y - 1] if v != UNDEFINED
    )
    return graph


def _left_cayley_graph(g: PartialGroupoid) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(g.elements)
    graph.add_edges_from(
        (y, g.product(p, y))
        for y in g.elements
        for p in g.elements
        if g.product(p, y) != UNDEFINED
    )
    return graph


def green_classes(s: PartialGroupoid, kind: str, strict: bool = True) -> Partition:
    """
    R-, L-, H- or J-classes of a semigroup.

    R and L are the strongly connected components of the right and left Cayley
    graphs; H intersects them; J joins them (J = D in finite semigroups). With
    strict off, non-semigroups get J as mutual-≤J components instead.
    """
    letter = GreenRelation(kind).letter
    if not s.is_semigroup:
        if strict:
            require_semigroup(s, "green_classes")
        logger.warning(
            f"Computing {letter}-components of non-semigroup {s.label()}; "
            "they need not be equivalence classes"
        )
        below = GreenRelation("<=" + letter)
        graph = nx.DiGraph()
        graph.add_nodes_from(s.elements)
        graph.add_edges_from(
            (y, x)
            for x in s.elements
            for y in s.elements
            if green_holds(s, below, x, y)
        )
        return _scc_partition(s.n, graph)

    r_classes = _scc_partition(s.n, _right_cayley_graph(s))
    if letter == "R":
        return r_classes
    l_classes = _scc_partition(s.n, _left_cayley_graph(s))
    if letter == "L":
        return l_classes
    if letter == "H":
        cells: Dict[Tuple[int, int], set] = {}
        for x in s.elements:
            key = (r_classes.class_of[x], l_classes.class_of[x])
            cells.setdefault(key, set()).add(x)
        return Partition.from_classes(cells.values(), s.n)

    uf = nx.utils.UnionFind(s.elements)
    for partition in (r_classes, l_classes):
        for block in partition.classes:
            uf.union(*block)
    return Partition.from_classes(uf.to_sets(), s.n)


def j_classes(
    g: PartialGroupoid, regular_only: bool = False, strict: bool = True
) -> List[FrozenSet[int]]:
    """J-classes ordered by minimal element, optionally only the regular ones."""
    classes = list(green_classes(g, "J", strict=strict).classes)
    if regular_only:
        idem = idempotents(g)
        classes = [c for c in classes if c & idem]
    return classes


@dataclass(frozen=True)
class EggBoxClass:
    """One J-class drawn as R-class rows by L-class columns of H-classes."""

    members: FrozenSet[int]
    regular: bool
    cells: Tuple[Tuple[FrozenSet[int], ...], ...]


def egg_box(s: PartialGroupoid) -> List[EggBoxClass]:
    require_semigroup(s, "egg_box")
    r_classes = green_classes(s, "R")
    l_classes = green_classes(s, "L")
    idem = idempotents(s)
    boxes = []
    for block in j_classes(s):
        rows = sorted({r_classes.class_of[x] for x in block})
        cols = sorted({l_classes.class_of[x] for x in block})
        cells = tuple(
            tuple(r_classes.classes[r] & l_classes.classes[c] for c in cols)
            for r in rows
        )
        boxes.append(EggBoxClass(block, bool(block & idem), cells))
    return boxes


def format_egg_box(s: PartialGroupoid) -> str:
    """Plain-text egg-box diagram; idempotents carry a trailing '*'."""
    idem = idempotents(s)
    out = []
    for box in egg_box(s):
        tag = "regular" if box.regular else "non-regular"
        out.append(f"J-class {{{', '.join(map(str, sorted(box.members)))}}} ({tag})")
        rendered = [
            [
                " ".join(f"{x}*" if x in idem else str(x) for x in sorted(cell))
                for cell in row
            ]
            for row in box.cells
        ]
        width = max(len(text) for row in rendered for text in row)
        for row in rendered:
            out.append("  | " + " | ".join(text.ljust(width) for text in row) + " |")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Substructures, products and quotients


def induced_partial(g: PartialGroupoid, subset: Iterable[int]) -> PartialGroupoid:
    """
    The partial groupoid on `subset` with x∘y = xy when xy stays in the subset.

    Ids are renumbered 1..m in ascending order of the original ids; the
    result's `origin` maps them back.
    """
    members = sorted(set(subset))
    if not members:
        raise EmptySubset("Induced structure needs a non-empty subset")
    index = {x: i for i, x in enumerate(members, start=1)}
    rows = tuple(
        tuple(index.get(g.product(x, y), UNDEFINED) for y in members) for x in members
    )
    name = f"{g.label()} restricted to {len(members)} elements"
    return PartialGroupoid(len(members), rows, name=name, origin=tuple(members))


def subsemigroup(s: PartialGroupoid, subset: Iterable[int]) -> PartialGroupoid:
    """Induced structure on a subset closed under the (total) product of s."""
    require_semigroup(s, "subsemigroup")
    t = induced_partial(s, subset)
    if not is_total(t):
        raise MalformedInput(f"Subset is not closed under the product of {s.label()}")
    return PartialGroupoid(t.n, t.table, name=t.name, semigroup=True, origin=t.origin)


def generated_subset(g: PartialGroupoid, gens: Iterable[int]) -> FrozenSet[int]:
    """Closure of `gens` under all defined products."""
    closed = set(gens)
    if not closed:
        raise EmptySubset("Generating set must be non-empty")
    pending = list(closed)
    while pending:
        x = pending.pop()
        for y in list(closed):
            for v in (g.product(x, y), g.product(y, x)):
                if v != UNDEFINED and v not in closed:
                    closed.add(v)
                    pending.append(v)
    return frozenset(closed)


def local_monoid(s: PartialGroupoid, e: int) -> PartialGroupoid:
    """The monoid eSe with identity e."""
    require_semigroup(s, "local_monoid")
    if s.product(e, e) != e:
        raise NotIdempotent(f"Element {e} of {s.label()} is not idempotent")
    members = {s.product(s.product(e, z), e) for z in s.elements}
    m = subsemigroup(s, members)
    return PartialGroupoid(
        m.n, m.table, name=f"{s.label()} local monoid at {e}", semigroup=True,
        origin=m.origin,
    )


def direct_product(s: PartialGroupoid, t: PartialGroupoid) -> PartialGroupoid:
    """S×T with (a,b)(c,d) = (ac, bd); pair (a, b) gets id (a-1)·|T| + b."""

    def pair_id(a: int, b: int) -> int:
        return (a - 1) * t.n + b

    rows = []
    for a, b in itertools.product(s.elements, t.elements):
        row = []
        for c, d in itertools.product(s.elements, t.elements):
            ac, bd = s.product(a, c), t.product(b, d)
            row.append(pair_id(ac, bd) if ac and bd else UNDEFINED)
        rows.append(tuple(row))
    return PartialGroupoid(
        s.n * t.n,
        tuple(rows),
        name=f"{s.label()} x {t.label()}",
        semigroup=s.semigroup and t.semigroup,
    )


def verify_congruence(
    s: PartialGroupoid, p: Partition
) -> Optional[Tuple[int, int, int, str]]:
    """
    First (x, x', z, side) with x ~ x' but zx ≁ zx' (side "left") or
    xz ≁ x'z (side "right"); None when p is a congruence.
    """
    for block in p.classes:
        members = sorted(block)
        rep = members[0]
        for x in members[1:]:
            for z in s.elements:
                if not p.same(s.product(rep, z), s.product(x, z)):
                    return (rep, x, z, "right")
                if not p.same(s.product(z, rep), s.product(z, x)):
                    return (rep, x, z, "left")
    return None


def partition_from_relation(n: int, holds: Callable[[int, int], bool]) -> Partition:
    """
    Turn an equivalence relation given as a predicate into a Partition.

    Raises:
        NotACongruence: If the predicate is not an equivalence relation
    """
    class_of: Dict[int, int] = {}
    blocks: List[List[int]] = []
    for x in range(1, n + 1):
        if x in class_of:
            continue
        if not holds(x, x):
            raise NotACongruence(f"Relation is not reflexive at {x}", witness=(x, x))
        block = [y for y in range(1, n + 1) if y not in class_of and holds(x, y)]
        for y in block:
            class_of[y] = len(blocks)
        blocks.append(block)
    for x, y in itertools.product(range(1, n + 1), repeat=2):
        if holds(x, y) != (class_of[x] == class_of[y]):
            raise NotACongruence(
                f"Relation is not an equivalence at ({x}, {y})", witness=(x, y)
            )
    return Partition.from_classes(blocks, n)


def quotient(
    s: PartialGroupoid, p: Partition, verify: bool = True
) -> PartialGroupoid:
    """
    S/~ on the classes of p (class i gets id i+1), [x][y] = [xy].

    Raises:
        NotASemigroup: If s is not a semigroup
        NotACongruence: If verify is set and p is not compatible
    """
    require_semigroup(s, "quotient")
    if len(p.class_of) != s.n:
        raise MalformedInput(f"Partition does not cover 1..{s.n}")
    if verify:
        witness = verify_congruence(s, p)
        if witness is not None:
            raise NotACongruence(
                f"Partition is not a congruence on {s.label()}: {witness}",
                witness=witness,
            )
    reps = [min(block) for block in p.classes]
    rows = tuple(
        tuple(p.class_of[s.product(a, b)] + 1 for b in reps) for a in reps
    )
    return PartialGroupoid(
        len(reps), rows, name=f"{s.label()} quotient", semigroup=verify
    )


# ---------------------------------------------------------------------------
# Named small semigroups


def _from_rule(
    n: int, rule: Callable[[int, int], int], name: str, semigroup: bool = True
) -> PartialGroupoid:
    rows = tuple(tuple(rule(x, y) for y in range(1, n + 1)) for x in range(1, n + 1))
    return PartialGroupoid(n, rows, name=name, semigroup=semigroup)


def trivial() -> PartialGroupoid:
    return _from_rule(1, lambda x, y: 1, "trivial")


def cyclic_group(k: int) -> PartialGroupoid:
    """C_k with element i standing for g^(i-1); 1 is the identity."""
    return _from_rule(k, lambda x, y: (x + y - 2) % k + 1, f"C{k}")


def right_zero(k: int) -> PartialGroupoid:
    return _from_rule(k, lambda x, y: y, f"RZ{k}")


def left_zero(k: int) -> PartialGroupoid:
    return _from_rule(k, lambda x, y: x, f"LZ{k}")


def null_semigroup(k: int) -> PartialGroupoid:
    """All products equal the zero, element 1."""
    return _from_rule(k, lambda x, y: 1, f"N{k}")


BRANDT_B2_NAMES: Sequence[str] = ("0", "e11", "e12", "e21", "e22")


def brandt_b2() -> PartialGroupoid:
    """B2 on ids 1=0, 2=e11, 3=e12, 4=e21, 5=e22 with e_ij e_kl = [j=k] e_il."""
    units = {2: (1, 1), 3: (1, 2), 4: (2, 1), 5: (2, 2)}
    ids = {v: k for k, v in units.items()}

    def rule(x: int, y: int) -> int:
        if x == 1 or y == 1:
            return 1
        (i, j), (k, l) = units[x], units[y]
        return ids[(i, l)] if j == k else 1

    return _from_rule(5, rule, "B2")
