"""
First-order formulas over the multiplication predicate x*y = z.

Formulas are immutable trees. Besides the core atoms (multiplication and
equality) they may contain two kinds of macro atoms: Green relations
(``x R y``, ``x <=J y``, ...) and ω-identities (``[x^w x = x^w]``). The
module parses the formula DSL, expands macros into the core fragment,
evaluates formulas on partial groupoids and implements the two structural
rewrites used by the variety catalog: restriction to definable subsets and
rewriting modulo a definable congruence.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from src.assets.config import ToolkitConfig, resolve_config, setup_default_logger
from src.assets.errors import (
    ArityMismatch,
    FormulaSyntaxError,
    MalformedInput,
    UnboundVariable,
)
from src.assets.groupoid import GreenRelation, PartialGroupoid, green_holds, is_total
from src.assets.omega_terms import (
    OmegaIdentity,
    eval_term,
    format_identity,
    identity_to_formula,
    parse_identity,
    rename_identity,
)

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({"and", "or", "not", "exists", "forall", "R", "L", "J", "H"})
_FRESH = re.compile(r"^\$(\d+)$")


# ---------------------------------------------------------------------------
# Syntax tree


@dataclass(frozen=True)
class Mult:
    """x*y = z; false whenever the product is undefined."""

    x: str
    y: str
    z: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Green:
    rel: GreenRelation
    x: str
    y: str


@dataclass(frozen=True)
class IdentityMacro:
    """An ω-identity read as a formula in the identity's own variables."""

    identity: OmegaIdentity

    @property
    def bindings(self) -> Tuple[str, ...]:
        return self.identity.vars


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[
    Mult, Eq, Green, IdentityMacro, Not, Or, And, Implies, Iff, Exists, Forall
]
ATOMS = (Mult, Eq, Green, IdentityMacro)
BINARY = (Or, And, Implies, Iff)
QUANTIFIERS = (Exists, Forall)


def conjunction(parts: Sequence[Formula]) -> Formula:
    """Right-nested And of a non-empty sequence."""
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = And(part, result)
    return result


def disjunction(parts: Sequence[Formula]) -> Formula:
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Or(part, result)
    return result


def conjuncts(f: Formula) -> List[Formula]:
    """Flatten the top-level And tree, left to right."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def _atom_vars(f: Formula) -> Tuple[str, ...]:
    if isinstance(f, Mult):
        return (f.x, f.y, f.z)
    if isinstance(f, (Eq, Green)):
        return (f.x, f.y)
    return f.identity.vars


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, ATOMS):
        return frozenset(_atom_vars(f))
    if isinstance(f, Not):
        return free_vars(f.operand)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> Iterator[str]:
    """Every variable name occurring in f, free or bound."""
    if isinstance(f, ATOMS):
        yield from _atom_vars(f)
    elif isinstance(f, Not):
        yield from all_vars(f.operand)
    elif isinstance(f, BINARY):
        yield from all_vars(f.left)
        yield from all_vars(f.right)
    else:
        yield f.var
        yield from all_vars(f.body)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.operand)
    if isinstance(f, BINARY):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


class FreshNames:
    """Hands out $1, $2, ... above every $k already in use."""

    def __init__(self, start: int = 1):
        self.counter = start

    @classmethod
    def above(cls, *items: Union[Formula, str]) -> "FreshNames":
        highest = 0
        for item in items:
            names = [item] if isinstance(item, str) else all_vars(item)
            for name in names:
                match = _FRESH.match(name)
                if match:
                    highest = max(highest, int(match.group(1)))
        return cls(highest + 1)

    def next(self) -> str:
        name = f"${self.counter}"
        self.counter += 1
        return name


def substitute(
    f: Formula, mapping: Mapping[str, str], fresh: Optional[FreshNames] = None
) -> Formula:
    """Simultaneously rename free variables, renaming binders that would capture."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    fresh = fresh or FreshNames.above(f, *mapping.values())
    return _substitute(f, mapping, fresh)


def _substitute(f: Formula, mapping: Mapping[str, str], fresh: FreshNames) -> Formula:
    if isinstance(f, Mult):
        return Mult(*(mapping.get(v, v) for v in (f.x, f.y, f.z)))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.x, f.x), mapping.get(f.y, f.y))
    if isinstance(f, Green):
        return Green(f.rel, mapping.get(f.x, f.x), mapping.get(f.y, f.y))
    if isinstance(f, IdentityMacro):
        return IdentityMacro(rename_identity(f.identity, mapping))
    if isinstance(f, Not):
        return Not(_substitute(f.operand, mapping, fresh))
    if isinstance(f, BINARY):
        return type(f)(
            _substitute(f.left, mapping, fresh), _substitute(f.right, mapping, fresh)
        )

    inner_free = free_vars(f.body)
    relevant = {k: v for k, v in mapping.items() if k != f.var and k in inner_free}
    if not relevant:
        return f
    if f.var in relevant.values():
        renamed = fresh.next()
        body = _substitute(f.body, {**relevant, f.var: renamed}, fresh)
        return type(f)(renamed, body)
    return type(f)(f.var, _substitute(f.body, relevant, fresh))


# ---------------------------------------------------------------------------
# Macro expansion


def _leq_expansion(rel: GreenRelation, x: str, y: str, fresh: FreshNames) -> Formula:
    letter = rel.letter
    if letter == "H":
        return And(
            _leq_expansion(GreenRelation.LEQ_R, x, y, fresh),
            _leq_expansion(GreenRelation.LEQ_L, x, y, fresh),
        )
    z = fresh.next()
    if letter == "R":
        return Or(Eq(x, y), Exists(z, Mult(y, z, x)))
    if letter == "L":
        return Or(Eq(x, y), Exists(z, Mult(z, y, x)))
    z2, w, u = fresh.next(), fresh.next(), fresh.next()
    return disjunction(
        [
            Eq(x, y),
            Exists(z, Mult(y, z, x)),
            Exists(z2, Mult(z2, y, x)),
            Exists(w, Exists(u, Exists(z, And(Mult(w, y, z), Mult(z, u, x))))),
        ]
    )


def green_expansion(rel: GreenRelation, x: str, y: str, fresh: FreshNames) -> Formula:
    """Green macro written with equality, multiplication and ∃ only."""
    rel = GreenRelation(rel)
    if rel.is_preorder:
        return _leq_expansion(rel, x, y, fresh)
    below = GreenRelation("<=" + rel.letter)
    return And(_leq_expansion(below, x, y, fresh), _leq_expansion(below, y, x, fresh))


def _negate(f: Formula) -> Formula:
    return f.operand if isinstance(f, Not) else Not(f)


def _expand(f: Formula, fresh: FreshNames, core: bool) -> Formula:
    if isinstance(f, (Mult, Eq)):
        return f
    if isinstance(f, Green):
        expanded = green_expansion(f.rel, f.x, f.y, fresh)
        return _expand(expanded, fresh, core)
    if isinstance(f, IdentityMacro):
        return _expand(identity_to_formula(f.identity, fresh=fresh), fresh, core)
    if isinstance(f, Not):
        return _negate(_expand(f.operand, fresh, core))
    if isinstance(f, BINARY):
        left, right = _expand(f.left, fresh, core), _expand(f.right, fresh, core)
        if not core or isinstance(f, Or):
            return type(f)(left, right)
        if isinstance(f, And):
            return _negate(Or(_negate(left), _negate(right)))
        if isinstance(f, Implies):
            return Or(_negate(left), right)
        both = _negate(Or(_negate(left), _negate(right)))
        neither = _negate(Or(left, right))
        return Or(both, neither)
    body = _expand(f.body, fresh, core)
    if isinstance(f, Forall) and core:
        return _negate(Exists(f.var, _negate(body)))
    return type(f)(f.var, body)


def expand_macros(
    f: Formula, core: bool = True, fresh: Optional[FreshNames] = None
) -> Formula:
    """
    Replace Green and ω-identity macros by first-order formulas.

    With `core` set the result uses only x*y = z, equality, not, or and exists;
    otherwise the connectives and ∀ of the input are kept. Introduced bound
    variables are fresh ($k above every $k in f).
    """
    return _expand(f, fresh or FreshNames.above(f), core)


# ---------------------------------------------------------------------------
# Parsing and printing

_TOKEN = re.compile(
    r"\s*(?:(?P<green><=[RLJH])|(?P<arrow><->|->)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<punct>[*=():\[]))"
)


def _tokenize(source: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        stripped = len(source) - len(source[pos:].lstrip())
        if stripped >= len(source):
            break
        match = _TOKEN.match(source, pos)
        if not match:
            raise FormulaSyntaxError(
                f"Unexpected character '{source[stripped]}'", stripped
            )
        kind = match.lastgroup
        text = match.group(kind)
        start = match.start(kind)
        if text == "[":
            end = source.find("]", start)
            if end < 0:
                raise FormulaSyntaxError("Unclosed '[' in identity macro", start)
            tokens.append(("identity", source[start + 1 : end], start + 1))
            pos = end + 1
            continue
        if kind == "ident" and text in KEYWORDS:
            kind = "keyword"
        tokens.append((kind if kind != "punct" else text, text, start))
        pos = match.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _FormulaParser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, expected: str) -> None:
        _, text, pos = self.peek()
        raise FormulaSyntaxError(
            f"Expected {expected}, found '{text or 'end of input'}'", pos
        )

    def at_keyword(self, *words: str) -> bool:
        kind, text, _ = self.peek()
        return kind == "keyword" and text in words

    def variable(self) -> str:
        kind, text, _ = self.peek()
        if kind != "ident":
            self.fail("a variable")
        self.advance()
        return text

    def body(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "arrow":
            arrow = self.advance()[1]
            right = self.disj()
            return Implies(left, right) if arrow == "->" else Iff(left, right)
        return left

    def disj(self) -> Formula:
        result = self.conj()
        while self.at_keyword("or"):
            self.advance()
            result = Or(result, self.conj())
        return result

    def conj(self) -> Formula:
        result = self.unit()
        while self.at_keyword("and"):
            self.advance()
            result = And(result, self.unit())
        return result

    def unit(self) -> Formula:
        kind, text, pos = self.peek()
        if self.at_keyword("not"):
            self.advance()
            return Not(self.unit())
        if self.at_keyword("exists", "forall"):
            self.advance()
            var = self.variable()
            if self.peek()[0] == ":":
                self.advance()
            body = self.unit() if self.at_keyword("exists", "forall") else self.body()
            return Exists(var, body) if text == "exists" else Forall(var, body)
        if kind == "(":
            self.advance()
            inner = self.body()
            if self.peek()[0] != ")":
                self.fail("')'")
            self.advance()
            return inner
        if kind == "identity":
            self.advance()
            return IdentityMacro(parse_identity(text, offset=pos))
        return self.atom()

    def atom(self) -> Formula:
        x = self.variable()
        kind, text, _ = self.peek()
        if kind == "*":
            self.advance()
            y = self.variable()
            if self.peek()[0] != "=":
                self.fail("'='")
            self.advance()
            return Mult(x, y, self.variable())
        if kind == "=":
            self.advance()
            return Eq(x, self.variable())
        if kind == "green" or (kind == "keyword" and text in "RLJH"):
            self.advance()
            return Green(GreenRelation(text), x, self.variable())
        self.fail("'*', '=' or a Green relation")


def parse_formula(source: str) -> Formula:
    """
    Parse the formula DSL; macros are kept unexpanded.

    Raises:
        FormulaSyntaxError: With the character position of the problem
    """
    parser = _FormulaParser(source)
    result = parser.body()
    if parser.peek()[0] != "end":
        parser.fail("end of input")
    return result


_BINARY_WORDS = {Or: "or", And: "and", Implies: "->", Iff: "<->"}


def format_formula(f: Formula) -> str:
    """Fully parenthesised DSL text of f."""
    if isinstance(f, Mult):
        return f"{f.x}*{f.y} = {f.z}"
    if isinstance(f, Eq):
        return f"{f.x} = {f.y}"
    if isinstance(f, Green):
        return f"{f.x} {f.rel.value} {f.y}"
    if isinstance(f, IdentityMacro):
        return f"[{format_identity(f.identity)}]"
    if isinstance(f, Not):
        return f"not ({format_formula(f.operand)})"
    if isinstance(f, BINARY):
        word = _BINARY_WORDS[type(f)]
        return f"({format_formula(f.left)}) {word} ({format_formula(f.right)})"
    word = "exists" if isinstance(f, Exists) else "forall"
    return f"{word} {f.var}: {format_formula(f.body)}"


# ---------------------------------------------------------------------------
# Well-known sentences

GROUPOID_TEXT = "forall x forall y exists z: x*y = z"
ASSOCIATIVITY_TEXT = (
    "forall x forall y forall z exists u exists v exists w: "
    "x*y = u and u*z = v and x*w = v and y*z = w"
)

GROUPOID_SENTENCE = parse_formula(GROUPOID_TEXT)
ASSOCIATIVITY_SENTENCE = parse_formula(ASSOCIATIVITY_TEXT)
SEMIGROUP_SENTENCE = And(GROUPOID_SENTENCE, ASSOCIATIVITY_SENTENCE)

# decided from the table instead of by quantifier search
_TABLE_CHECKS: Dict[int, Callable[[PartialGroupoid], bool]] = {
    id(GROUPOID_SENTENCE): is_total,
    id(ASSOCIATIVITY_SENTENCE): lambda g: g.is_semigroup,
    id(SEMIGROUP_SENTENCE): lambda g: g.is_semigroup,
}


# ---------------------------------------------------------------------------
# Evaluation


@dataclass
class Counterexample:
    """A failing top-level conjunct and the first assignment refuting it."""

    conjunct_index: int
    conjunct: Formula
    assignment: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "conjunct": self.conjunct_index,
            "formula": format_formula(self.conjunct),
            "assignment": dict(sorted(self.assignment.items())),
        }


class Evaluator:
    """
    Tarskian evaluation of formulas on one partial groupoid.

    Quantifiers range over 1..n. Green macros are decided with the ideal sets
    of the groupoid; ω-identity macros by evaluating their terms when the
    groupoid is a semigroup and through their expansion otherwise. `probes`
    counts table lookups and macro decisions.
    """

    def __init__(
        self,
        g: PartialGroupoid,
        config: Optional[ToolkitConfig] = None,
        logger: Optional[logging.Logger] = None,
    ):
        self.g = g
        self.config = resolve_config(config)
        self.logger = logger or setup_default_logger(__name__)
        self.probes = 0
        self._memo: Dict[Tuple[int, Tuple[int, ...]], bool] = {}
        self._free: Dict[int, Tuple[Formula, Tuple[str, ...]]] = {}
        self._expansions: Dict[int, Tuple[Formula, Formula]] = {}

    def evaluate(self, f: Formula, assignment: Optional[Mapping[str, int]] = None) -> bool:
        """
        Truth of f under the assignment.

        Raises:
            UnboundVariable: If a free variable of f has no value
        """
        values = dict(assignment or {})
        missing = free_vars(f) - set(values)
        if missing:
            raise UnboundVariable(f"Unbound variables: {', '.join(sorted(missing))}")
        for name, value in values.items():
            if not 1 <= value <= self.g.n:
                raise MalformedInput(
                    f"Variable '{name}' is bound to {value}, not an element"
                )
        return self._holds(f, values)

    def _free_of(self, f: Formula) -> Tuple[str, ...]:
        entry = self._free.get(id(f))
        if entry is None:
            entry = (f, tuple(sorted(free_vars(f))))
            self._free[id(f)] = entry
        return entry[1]

    def _holds(self, f: Formula, a: Dict[str, int]) -> bool:
        kind = type(f)
        if kind is Mult:
            self.probes += 1
            return self.g.table[a[f.x] - 1][a[f.y] - 1] == a[f.z]
        if kind is Eq:
            return a[f.x] == a[f.y]
        if kind is Not:
            return not self._holds(f.operand, a)
        if kind is Or:
            return self._holds(f.left, a) or self._holds(f.right, a)
        if kind is And:
            if id(f) in _TABLE_CHECKS:
                return self._table_check(f)
            return self._holds(f.left, a) and self._holds(f.right, a)
        if kind is Implies:
            return not self._holds(f.left, a) or self._holds(f.right, a)
        if kind is Iff:
            return self._holds(f.left, a) == self._holds(f.right, a)
        if kind is Green:
            self.probes += 1
            return green_holds(self.g, f.rel, a[f.x], a[f.y])
        if kind is IdentityMacro:
            return self._identity_holds(f, a)
        return self._quantifier_holds(f, a)

    def _identity_holds(self, f: IdentityMacro, a: Dict[str, int]) -> bool:
        if self.g.is_semigroup:
            self.probes += 1
            h = {name: a[name] for name in f.identity.vars}
            identity = f.identity
            return eval_term(self.g, identity.lhs, h) == eval_term(self.g, identity.rhs, h)
        entry = self._expansions.get(id(f))
        if entry is None:
            entry = (f, expand_macros(f, core=False))
            self._expansions[id(f)] = entry
        return self._holds(entry[1], a)

    def _table_check(self, f: Formula) -> bool:
        self.probes += 1
        return _TABLE_CHECKS[id(f)](self.g)

    def _quantifier_holds(self, f: Union[Exists, Forall], a: Dict[str, int]) -> bool:
        if id(f) in _TABLE_CHECKS:
            return self._table_check(f)
        key = None
        if self.config.memoize:
            key = (id(f), tuple(a[v] for v in self._free_of(f)))
            cached = self._memo.get(key)
            if cached is not None:
                return cached

        var = f.var
        had_value = var in a
        saved = a.get(var)
        want = isinstance(f, Exists)
        result = not want
        for element in self.g.elements:
            a[var] = element
            if self._holds(f.body, a) == want:
                result = want
                break
        if had_value:
            a[var] = saved
        else:
            del a[var]

        if key is not None:
            self._memo[key] = result
        return result


def evaluate(
    g: PartialGroupoid,
    f: Formula,
    assignment: Optional[Mapping[str, int]] = None,
    config: Optional[ToolkitConfig] = None,
) -> bool:
    """Truth of f in g under the assignment (see Evaluator)."""
    return Evaluator(g, config, logger=logger).evaluate(f, assignment)


def evaluate_sentence(
    g: PartialGroupoid, f: Formula, config: Optional[ToolkitConfig] = None
) -> bool:
    if free_vars(f):
        raise UnboundVariable(
            f"Not a sentence, free variables: {', '.join(sorted(free_vars(f)))}"
        )
    return evaluate(g, f, {}, config)


def _leading_universals(f: Formula) -> Tuple[List[str], Formula]:
    names = []
    while isinstance(f, Forall):
        names.append(f.var)
        f = f.body
    return names, f


def find_counterexample(
    g: PartialGroupoid,
    f: Formula,
    config: Optional[ToolkitConfig] = None,
    evaluator: Optional[Evaluator] = None,
) -> Optional[Counterexample]:
    """
    First failing top-level conjunct of the sentence f, together with the
    lexicographically first assignment of its leading ∀-block that refutes
    it. None when f holds.
    """
    evaluator = evaluator or Evaluator(g, config, logger=logger)
    for index, part in enumerate(conjuncts(f)):
        if evaluator.evaluate(part):
            continue
        names, body = _leading_universals(part)
        for values in itertools.product(g.elements, repeat=len(names)):
            assignment = dict(zip(names, values))
            if not evaluator.evaluate(body, assignment):
                evaluator.logger.debug(
                    f"Conjunct {index} fails in {g.label()} at {assignment}"
                )
                return Counterexample(index, part, assignment)
        return Counterexample(index, part, {})
    return None


# ---------------------------------------------------------------------------
# Structural rewrites


def _check_binary(psi: Formula, params: Tuple[str, str]) -> None:
    extra = free_vars(psi) - set(params)
    if len(set(params)) != 2 or extra:
        raise ArityMismatch(
            f"Expected a formula in ({', '.join(params)}), "
            f"found free variables {sorted(free_vars(psi))}"
        )


def _instantiate(
    psi: Formula, params: Tuple[str, str], first: str, second: str, fresh: FreshNames
) -> Formula:
    return substitute(psi, {params[0]: first, params[1]: second}, fresh)


def relativize(
    phi: Formula,
    psi: Formula,
    guard_nonempty: bool = True,
    params: Tuple[str, str] = ("x", "y"),
) -> Formula:
    """
    Sentence saying that every set T_c = {t : ψ(c, t)} satisfies φ.

    Quantifiers of φ (after macro expansion) are bounded by ψ(c, ·):
    ∃y: χ becomes ∃y: ψ(c, y) ∧ χ' and ∀y: χ becomes ∀y: ψ(c, y) → χ'. The
    result is φ_S ∧ ∀c: φ'(c); with `guard_nonempty` it is
    φ_S ∧ ∀c: (∃y: ψ(c, y)) → φ'(c), skipping empty sets.

    Raises:
        ArityMismatch: If ψ has free variables other than `params`
    """
    _check_binary(psi, params)
    fresh = FreshNames.above(phi, psi, *params)
    expanded = expand_macros(phi, core=False, fresh=fresh)
    c = fresh.next()

    def walk(f: Formula) -> Formula:
        if isinstance(f, ATOMS):
            return f
        if isinstance(f, Not):
            return Not(walk(f.operand))
        if isinstance(f, BINARY):
            return type(f)(walk(f.left), walk(f.right))
        bound = _instantiate(psi, params, c, f.var, fresh)
        if isinstance(f, Exists):
            return Exists(f.var, And(bound, walk(f.body)))
        return Forall(f.var, Implies(bound, walk(f.body)))

    restricted = walk(expanded)
    if guard_nonempty:
        y = fresh.next()
        restricted = Implies(Exists(y, _instantiate(psi, params, c, y, fresh)), restricted)
    return And(SEMIGROUP_SENTENCE, Forall(c, restricted))


def quotient_rewrite(
    phi: Formula, psi: Formula, params: Tuple[str, str] = ("x", "y")
) -> Formula:
    """
    Sentence saying that S/ψ satisfies φ, for ψ defining a congruence.

    Every x*y = z becomes ∃w: x*y = w ∧ ψ(w, z) and every x = y becomes
    ψ(x, y); the result is φ_S ∧ φ'.

    Raises:
        ArityMismatch: If ψ has free variables other than `params`
    """
    _check_binary(psi, params)
    fresh = FreshNames.above(phi, psi, *params)
    expanded = expand_macros(phi, core=False, fresh=fresh)

    def walk(f: Formula) -> Formula:
        if isinstance(f, Mult):
            w = fresh.next()
            return Exists(w, And(Mult(f.x, f.y, w), _instantiate(psi, params, w, f.z, fresh)))
        if isinstance(f, Eq):
            return _instantiate(psi, params, f.x, f.y, fresh)
        if isinstance(f, Not):
            return Not(walk(f.operand))
        if isinstance(f, BINARY):
            return type(f)(walk(f.left), walk(f.right))
        return type(f)(f.var, walk(f.body))

    return And(SEMIGROUP_SENTENCE, walk(expanded))
