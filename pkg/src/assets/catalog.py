"""
Registry of named classes of finite partial groupoids and semigroups.

Every builtin is realized as a first-order sentence, a finite basis of
ω-identities or (for 𝔼A) a dedicated algorithm. Class operators build new
sentences: 𝔻, 𝕃 and H̄ restrict a sentence to definable subsets, the Mal'cev
operators rewrite it modulo a definable congruence.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

from src.assets.config import ToolkitConfig, resolve_config, setup_default_logger
from src.assets.errors import (
    FormulaSyntaxError,
    NotASemigroup,
    SemigroupToolkitError,
    UnknownVariety,
    UnsupportedRealization,
)
from src.assets.formulas import (
    GROUPOID_SENTENCE,
    SEMIGROUP_SENTENCE,
    And,
    Counterexample,
    Evaluator,
    Forall,
    Formula,
    IdentityMacro,
    conjunction,
    find_counterexample,
    parse_formula,
    quotient_rewrite,
    relativize,
)
from src.assets.groupoid import (
    PartialGroupoid,
    Partition,
    associativity_witness,
    green_classes,
    idempotents,
    induced_partial,
    is_total,
    j_classes,
    local_monoid,
    partition_from_relation,
    quotient,
    require_semigroup,
)
from src.assets.omega_terms import OmegaIdentity, format_identity, parse_identity, satisfies_basis
from src.assets.rees import brute_force_ea, is_in_ea

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Specs


@dataclass(frozen=True)
class Sentence:
    formula: Formula


@dataclass(frozen=True)
class IdentityBasis:
    identities: Tuple[OmegaIdentity, ...]


@dataclass(frozen=True)
class Algorithm:
    tag: str


class Operator(str, Enum):
    D = "D"
    L = "L"
    HBAR = "Hbar"
    MALCEV_K = "MalcevK"
    MALCEV_D = "MalcevD"
    MALCEV_N = "MalcevN"
    MALCEV_LI = "MalcevLI"
    MALCEV_LG = "MalcevLG"

    @property
    def is_malcev(self) -> bool:
        return self.value.startswith("Malcev")


MALCEV_PREFIXES = {
    "K": Operator.MALCEV_K,
    "D": Operator.MALCEV_D,
    "N": Operator.MALCEV_N,
    "LI": Operator.MALCEV_LI,
    "LG": Operator.MALCEV_LG,
}


@dataclass(frozen=True)
class Derived:
    operator: Operator
    inner: "VarietySpec"
    formula: Formula = field(compare=False)


Realization = Union[Sentence, IdentityBasis, Algorithm, Derived]


@dataclass(frozen=True)
class VarietySpec:
    name: str
    realization: Realization
    description: str = ""

    def sentence(self) -> Formula:
        """
        Defining sentence; an identity basis reads φ_S ∧ ⋀ ∀x̄: [identity].

        Raises:
            UnsupportedRealization: For algorithmic realizations
        """
        realization = self.realization
        if isinstance(realization, Sentence):
            return realization.formula
        if isinstance(realization, Derived):
            return realization.formula
        if isinstance(realization, IdentityBasis):
            return And(
                SEMIGROUP_SENTENCE,
                conjunction([_closed_macro(i) for i in realization.identities]),
            )
        raise UnsupportedRealization(
            f"{self.name} is decided by an algorithm and has no defining sentence"
        )


def _closed_macro(identity: OmegaIdentity) -> Formula:
    body: Formula = IdentityMacro(identity)
    for name in reversed(identity.vars):
        body = Forall(name, body)
    return body


# ---------------------------------------------------------------------------
# Builtin sentences and congruences


def _with_semigroup(text: str) -> Formula:
    return And(SEMIGROUP_SENTENCE, parse_formula(text))


PARTIAL_GROUPOID_SENTENCE = parse_formula("exists x: x = x")
TRIVIAL_SENTENCE = _with_semigroup("forall x forall y: x = y")
MONOID_SENTENCE = _with_semigroup("exists x: forall y: x*y = y and y*x = y")
GROUP_SENTENCE = And(
    MONOID_SENTENCE,
    parse_formula(
        "exists x: forall y: exists z: x*y = y and y*x = y and y*z = x and z*y = x"
    ),
)
BAND_SENTENCE = _with_semigroup("forall x: x*x = x")
ORTHODOX_SENTENCE = _with_semigroup(
    "forall x forall y: x*x = x and y*y = y -> exists z: x*y = z and z*z = z"
)
APERIODIC_SENTENCE = _with_semigroup("forall x forall y: x H y -> x = y")
NILPOTENT_SENTENCE = _with_semigroup(
    "forall x forall y: [x^w y = x^w] and [y x^w = x^w]"
)

REGULAR_TEXT = "exists e: e*e = e and e J x"

CONGRUENCE_TEXTS: Dict[str, str] = {
    "RM": (
        f"forall x: ({REGULAR_TEXT}) -> "
        "(not (exists u: x*s = u and u J x) and not (exists u: x*t = u and u J x))"
        " or (exists u: x*s = u and x*t = u)"
    ),
    "LM": (
        f"forall x: ({REGULAR_TEXT}) -> "
        "(not (exists u: s*x = u and u J x) and not (exists u: t*x = u and u J x))"
        " or (exists u: s*x = u and t*x = u)"
    ),
    "GGM": (
        f"forall x forall y: (({REGULAR_TEXT}) and x J y) -> "
        "(not (exists u exists v: x*s = u and u*y = v and v J x)"
        " and not (exists u exists v: x*t = u and u*y = v and v J x))"
        " or (exists u exists v exists w: x*s = u and u*y = w and x*t = v and v*y = w)"
    ),
    "AGGM": (
        f"forall x forall y: (({REGULAR_TEXT}) and x J y) -> "
        "((exists u exists v: x*s = u and u*y = v and v J x)"
        " <-> (exists u exists v: x*t = u and u*y = v and v J x))"
    ),
}
CONGRUENCE_PARAMS = ("s", "t")
CONGRUENCES: Dict[str, Formula] = {
    name: parse_formula(text) for name, text in CONGRUENCE_TEXTS.items()
}
CONGRUENCES["RM&LM"] = And(CONGRUENCES["RM"], CONGRUENCES["LM"])

MALCEV_CONGRUENCE = {
    Operator.MALCEV_K: "RM",
    Operator.MALCEV_D: "LM",
    Operator.MALCEV_N: "RM&LM",
    Operator.MALCEV_LI: "GGM",
    Operator.MALCEV_LG: "AGGM",
}

RESTRICTIONS: Dict[Operator, Formula] = {
    Operator.D: parse_formula("x*x = x and x J y"),
    Operator.L: parse_formula("x*x = x and exists z exists u: x*z = u and u*x = y"),
    Operator.HBAR: parse_formula("x*x = x and x H y"),
}


def _basis(*texts: str) -> IdentityBasis:
    return IdentityBasis(tuple(parse_identity(text) for text in texts))


BUILTINS: Dict[str, VarietySpec] = {
    spec.name: spec
    for spec in [
        VarietySpec("PGoid", Sentence(PARTIAL_GROUPOID_SENTENCE), "finite partial groupoids"),
        VarietySpec("Goid", Sentence(GROUPOID_SENTENCE), "finite groupoids"),
        VarietySpec("S", Sentence(SEMIGROUP_SENTENCE), "finite semigroups"),
        VarietySpec("I", Sentence(TRIVIAL_SENTENCE), "trivial semigroups"),
        VarietySpec("M", Sentence(MONOID_SENTENCE), "finite monoids"),
        VarietySpec("G", Sentence(GROUP_SENTENCE), "finite groups"),
        VarietySpec("B", Sentence(BAND_SENTENCE), "finite bands"),
        VarietySpec("O", Sentence(ORTHODOX_SENTENCE), "finite orthodox semigroups"),
        VarietySpec("A", _basis("x^w x = x^w"), "finite aperiodic semigroups"),
        VarietySpec("D", _basis("x^w y = x^w"), "ex = e for every idempotent e"),
        VarietySpec("K", _basis("y x^w = x^w"), "xe = e for every idempotent e"),
        VarietySpec("N", Sentence(NILPOTENT_SENTENCE), "finite nilpotent semigroups"),
        VarietySpec("EA", Algorithm("EA"), "idempotent-generated subsemigroup is aperiodic"),
    ]
}

# Second definitions of builtins, cross-checked by corpus-run.
EQUIVALENT_SENTENCES: Dict[str, Formula] = {"A": APERIODIC_SENTENCE}


def builtin(name: str) -> VarietySpec:
    try:
        return BUILTINS[name]
    except KeyError:
        raise UnknownVariety(
            f"Unknown variety '{name}', expected one of {', '.join(BUILTINS)}"
        )


def _innermost(spec: VarietySpec) -> Realization:
    realization = spec.realization
    while isinstance(realization, Derived):
        realization = realization.inner.realization
    return realization


def apply_operator(
    op: Union[Operator, str], inner: VarietySpec, guard_nonempty: bool = True
) -> VarietySpec:
    """
    Derived class defined by a rewritten sentence of `inner`.

    D, L and Hbar restrict to the sets {t : ψ(c, t)} of regular J-classes,
    local monoids and regular H-classes. The Mal'cev operators rewrite modulo
    RM, LM, RM ∩ LM, GGM and AGGM.

    Raises:
        UnsupportedRealization: If `inner` is decided by an algorithm
    """
    op = Operator(op)
    if isinstance(_innermost(inner), Algorithm):
        raise UnsupportedRealization(
            f"Operator {op.value} cannot be applied to {inner.name}, which has no sentence"
        )
    phi = inner.sentence()
    if op.is_malcev:
        psi = CONGRUENCES[MALCEV_CONGRUENCE[op]]
        formula = quotient_rewrite(phi, psi, CONGRUENCE_PARAMS)
        prefix = next(k for k, v in MALCEV_PREFIXES.items() if v is op)
        name = f"{prefix}@{inner.name}"
    else:
        formula = relativize(phi, RESTRICTIONS[op], guard_nonempty)
        name = f"{op.value}({inner.name})"
    return VarietySpec(name, Derived(op, inner, formula), f"{op.value} applied to {inner.name}")


# ---------------------------------------------------------------------------
# Variety expressions

_EXPR_TOKEN = re.compile(r"\s*([A-Za-z]+|[()@])")


def parse_variety_expression(text: str, guard_nonempty: bool = True) -> VarietySpec:
    """
    Parse the mini-language: a builtin name, ``D(V)``, ``L(V)``, ``Hbar(V)``
    or a Mal'cev prefix ``K@V``, ``D@V``, ``N@V``, ``LI@V``, ``LG@V``.
    """
    tokens: List[Tuple[str, int]] = []
    pos = 0
    while text[pos:].strip():
        match = _EXPR_TOKEN.match(text, pos)
        if not match:
            start = len(text) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"Unexpected character '{text[start]}'", start)
        tokens.append((match.group(1), match.start(1)))
        pos = match.end()
    tokens.append(("", len(text)))
    index = 0

    def peek() -> Tuple[str, int]:
        return tokens[index]

    def expr() -> VarietySpec:
        nonlocal index
        word, position = peek()
        if word == "(":
            index += 1
            inner = expr()
            closing(")")
            return inner
        if not word.isalpha():
            raise FormulaSyntaxError(
                f"Expected a variety, found '{word or 'end of input'}'", position
            )
        index += 1
        following = peek()[0]
        if following == "@":
            if word not in MALCEV_PREFIXES:
                raise UnknownVariety(f"Unknown Mal'cev prefix '{word}'")
            index += 1
            return apply_operator(MALCEV_PREFIXES[word], expr(), guard_nonempty)
        if following == "(":
            if word not in ("D", "L", "Hbar"):
                raise UnknownVariety(f"Unknown operator '{word}'")
            index += 1
            inner = expr()
            closing(")")
            return apply_operator(word, inner, guard_nonempty)
        return builtin(word)

    def closing(symbol: str) -> None:
        nonlocal index
        word, position = peek()
        if word != symbol:
            raise FormulaSyntaxError(
                f"Expected '{symbol}', found '{word or 'end of input'}'", position
            )
        index += 1

    spec = expr()
    if peek()[0]:
        raise FormulaSyntaxError(f"Unexpected '{peek()[0]}'", peek()[1])
    return spec


# ---------------------------------------------------------------------------
# Direct checkers


def _semigroup_and(check: Callable[[PartialGroupoid], bool]) -> Callable[[PartialGroupoid], bool]:
    return lambda s: s.is_semigroup and check(s)


def _identity_element(s: PartialGroupoid) -> Optional[int]:
    for e in s.elements:
        if all(s.product(e, x) == x == s.product(x, e) for x in s.elements):
            return e
    return None


def _is_group(s: PartialGroupoid) -> bool:
    e = _identity_element(s)
    if e is None:
        return False
    return all(any(s.product(x, y) == e for y in s.elements) for x in s.elements)


def _h_trivial(s: PartialGroupoid) -> bool:
    return all(len(block) == 1 for block in green_classes(s, "H").classes)


def _idempotent_law(s: PartialGroupoid, law: Callable[[int, int], bool]) -> bool:
    return all(law(e, x) for e in idempotents(s) for x in s.elements)


DEFINITIONAL_CHECKERS: Dict[str, Callable[[PartialGroupoid], bool]] = {
    "PGoid": lambda s: True,
    "Goid": is_total,
    "S": lambda s: s.is_semigroup,
    "I": _semigroup_and(lambda s: s.n == 1),
    "M": _semigroup_and(lambda s: _identity_element(s) is not None),
    "G": _semigroup_and(_is_group),
    "B": _semigroup_and(lambda s: len(idempotents(s)) == s.n),
    "O": _semigroup_and(
        lambda s: all(
            s.product(e, f) in idempotents(s) for e in idempotents(s) for f in idempotents(s)
        )
    ),
    "A": _semigroup_and(_h_trivial),
    "D": _semigroup_and(lambda s: _idempotent_law(s, lambda e, x: s.product(e, x) == e)),
    "K": _semigroup_and(lambda s: _idempotent_law(s, lambda e, x: s.product(x, e) == e)),
    "N": _semigroup_and(
        lambda s: _idempotent_law(
            s, lambda e, x: s.product(e, x) == e == s.product(x, e)
        )
    ),
    "EA": _semigroup_and(brute_force_ea),
}


def definitional_checker(name: str) -> Callable[[PartialGroupoid], bool]:
    """Checker written directly from the prose definition of a builtin."""
    try:
        return DEFINITIONAL_CHECKERS[name]
    except KeyError:
        raise UnknownVariety(f"No direct checker for '{name}'")


def congruence_partition(
    s: PartialGroupoid, name: str, config: Optional[ToolkitConfig] = None
) -> Partition:
    """
    Classes of the congruence RM, LM, RM&LM, GGM or AGGM on s.

    Raises:
        UnknownVariety: For an unknown congruence name
        NotACongruence: If the formula fails to define an equivalence
    """
    if name not in CONGRUENCES:
        raise UnknownVariety(f"Unknown congruence '{name}'")
    require_semigroup(s, "congruence_partition")
    evaluator = Evaluator(s, config, logger=logger)
    psi = CONGRUENCES[name]
    return partition_from_relation(
        s.n, lambda a, b: evaluator.evaluate(psi, {"s": a, "t": b})
    )


def restricted_subset(
    s: PartialGroupoid,
    op: Union[Operator, str],
    c: int,
    config: Optional[ToolkitConfig] = None,
) -> FrozenSet[int]:
    """The set {t : ψ(c, t)} that D, L or Hbar restricts to at c."""
    psi = RESTRICTIONS[Operator(op)]
    evaluator = Evaluator(s, config, logger=logger)
    return frozenset(t for t in s.elements if evaluator.evaluate(psi, {"x": c, "y": t}))


def operator_oracle(
    op: Union[Operator, str],
    inner: VarietySpec,
    s: PartialGroupoid,
    config: Optional[ToolkitConfig] = None,
) -> bool:
    """
    Decide membership in op(inner) by building the structures explicitly:
    induced regular J-classes, local monoids, regular H-classes, or the
    verified quotient by the Mal'cev congruence.
    """
    op = Operator(op)
    require_semigroup(s, "operator_oracle")
    phi = inner.sentence()

    def holds(t: PartialGroupoid) -> bool:
        return Evaluator(t, config, logger=logger).evaluate(phi)

    if op is Operator.D:
        return all(holds(induced_partial(s, block)) for block in j_classes(s, regular_only=True))
    if op is Operator.L:
        return all(holds(local_monoid(s, e)) for e in sorted(idempotents(s)))
    if op is Operator.HBAR:
        h_classes = green_classes(s, "H")
        return all(
            holds(induced_partial(s, h_classes.classes[h_classes.class_of[e]]))
            for e in sorted(idempotents(s))
        )
    partition = congruence_partition(s, MALCEV_CONGRUENCE[op], config)
    return holds(quotient(s, partition, verify=True))


# ---------------------------------------------------------------------------
# Membership


@dataclass
class MembershipResult:
    member: bool
    variety: str
    witness: Optional[dict] = None
    trace: List[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.member

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "variety": self.variety,
            "witness": self.witness,
            "trace": self.trace,
        }


class MembershipChecker:
    """
    Uniform membership API over all realizations.

    Sentences are evaluated with a failing-conjunct witness, identity bases
    report the first failing identity and assignment, 𝔼A reports the
    offending J-class and cycle.
    """

    def __init__(
        self, config: Optional[ToolkitConfig] = None, logger: Optional[logging.Logger] = None
    ):
        self.config = resolve_config(config)
        self.logger = logger or setup_default_logger(__name__)

    def check(self, s: PartialGroupoid, spec: Union[VarietySpec, str]) -> MembershipResult:
        """
        Decide whether s belongs to the class described by `spec`.

        Args:
            s: The partial groupoid to classify
            spec: A VarietySpec or a variety expression

        Raises:
            NotASemigroup: For identity bases and algorithms on non-semigroups
        """
        if isinstance(spec, str):
            spec = parse_variety_expression(spec, self.config.guard_nonempty)
        realization = spec.realization

        if isinstance(realization, IdentityBasis):
            result = self._check_basis(s, spec, realization)
        elif isinstance(realization, Algorithm):
            result = self._check_algorithm(s, spec, realization)
        elif isinstance(realization, Derived):
            result = self._check_derived(s, spec, realization)
        else:
            result = self._check_sentence(s, spec)

        self.logger.info(
            f"{s.label()} {'is' if result.member else 'is not'} in {spec.name}"
        )
        return result

    def check_safe(
        self, s: PartialGroupoid, spec: Union[VarietySpec, str]
    ) -> Optional[MembershipResult]:
        try:
            return self.check(s, spec)
        except SemigroupToolkitError as e:
            self.logger.error(f"Membership check failed: {e}")
            return None

    def _check_sentence(self, s: PartialGroupoid, spec: VarietySpec) -> MembershipResult:
        evaluator = Evaluator(s, self.config, self.logger)
        counterexample = find_counterexample(s, spec.sentence(), evaluator=evaluator)
        trace = [{"probes": evaluator.probes}]
        if counterexample is None:
            return MembershipResult(True, spec.name, trace=trace)
        return MembershipResult(False, spec.name, counterexample.to_dict(), trace)

    def _check_basis(
        self, s: PartialGroupoid, spec: VarietySpec, basis: IdentityBasis
    ) -> MembershipResult:
        if not s.is_semigroup:
            raise NotASemigroup(f"{spec.name} is a class of semigroups; {s.label()} is not one")
        verdict = satisfies_basis(s, basis.identities)
        trace = [{"identity": format_identity(i)} for i in basis.identities]
        if verdict:
            return MembershipResult(True, spec.name, trace=trace)
        witness = {
            "identity": format_identity(verdict.identity),
            "assignment": dict(sorted(verdict.assignment.items())),
        }
        return MembershipResult(False, spec.name, witness, trace)

    def _check_derived(
        self, s: PartialGroupoid, spec: VarietySpec, derived: Derived
    ) -> MembershipResult:
        evaluator = Evaluator(s, self.config, self.logger)
        counterexample = find_counterexample(s, spec.sentence(), evaluator=evaluator)
        trace = [{"probes": evaluator.probes}]
        if counterexample is None:
            return MembershipResult(True, spec.name, trace=trace)
        witness = self._derived_witness(s, derived, counterexample)
        return MembershipResult(False, spec.name, witness, trace)

    def _derived_witness(
        self, s: PartialGroupoid, derived: Derived, counterexample: Counterexample
    ) -> dict:
        """
        Readable reason for a failing derived sentence: the restricted set at
        the failing element c, or the quotient classes, and the verdict of the
        inner class on that structure.
        """
        op = derived.operator
        witness: dict = {"operator": op.value, "inner": derived.inner.name}
        triple = associativity_witness(s)
        if triple is not None:
            witness["associativity_witness"] = list(triple)
            return witness

        if op.is_malcev:
            name = MALCEV_CONGRUENCE[op]
            partition = congruence_partition(s, name, self.config)
            witness["congruence"] = name
            witness["classes"] = partition.as_lists()
            witness["inner_verdict"] = self._inner_verdict(quotient(s, partition), derived.inner)
            return witness

        conjunct = counterexample.conjunct
        c = counterexample.assignment.get(conjunct.var) if isinstance(conjunct, Forall) else None
        witness["element"] = c
        if c is None:
            return witness
        members = restricted_subset(s, op, c, self.config)
        witness["subset"] = sorted(members)
        if members:
            witness["inner_verdict"] = self._inner_verdict(
                induced_partial(s, members), derived.inner
            )
        else:
            witness["inner_verdict"] = {"member": False, "empty": True}
        return witness

    def _inner_verdict(self, t: PartialGroupoid, inner: VarietySpec) -> dict:
        realization = inner.realization
        if isinstance(realization, IdentityBasis):
            triple = associativity_witness(t)
            if triple is not None:
                return {"member": False, "associativity_witness": list(triple)}
            verdict = satisfies_basis(t, realization.identities)
            if verdict:
                return {"member": True}
            return {
                "member": False,
                "identity": format_identity(verdict.identity),
                "assignment": dict(sorted(verdict.assignment.items())),
            }
        counterexample = find_counterexample(t, inner.sentence(), self.config)
        if counterexample is None:
            return {"member": True}
        if isinstance(realization, Derived):
            return {
                "member": False,
                "witness": self._derived_witness(t, realization, counterexample),
            }
        return {"member": False, "witness": counterexample.to_dict()}

    def _check_algorithm(
        self, s: PartialGroupoid, spec: VarietySpec, algorithm: Algorithm
    ) -> MembershipResult:
        if algorithm.tag != "EA":
            raise UnsupportedRealization(f"Unknown algorithm '{algorithm.tag}'")
        result = is_in_ea(s, self.config)
        trace = [record.to_dict() for record in result.records]
        offending = result.offending
        witness = offending.to_dict() if offending is not None else None
        return MembershipResult(result.member, spec.name, witness, trace)


def check_membership(
    s: PartialGroupoid,
    spec: Union[VarietySpec, str],
    config: Optional[ToolkitConfig] = None,
) -> MembershipResult:
    return MembershipChecker(config, logger=logger).check(s, spec)


def check_membership_safe(
    s: PartialGroupoid,
    spec: Union[VarietySpec, str],
    config: Optional[ToolkitConfig] = None,
) -> Optional[MembershipResult]:
    """Version of check_membership that logs failures and returns None."""
    return MembershipChecker(config, logger=logger).check_safe(s, spec)
