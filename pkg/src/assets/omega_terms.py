"""
ω-terms and ω-identities.

Terms are built from variables, concatenation and the ω-power. The module
parses identities (``x^w x = x^w``), evaluates terms in finite semigroups,
checks satisfaction by brute force over all assignments, and compiles an
identity into an equivalent first-order formula whose only non-core atoms are
Green macros.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from src.assets.errors import FormulaSyntaxError, UnboundVariable
from src.assets.groupoid import PartialGroupoid, omega, require_semigroup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Concat:
    left: "OmegaTerm"
    right: "OmegaTerm"


@dataclass(frozen=True)
class OmegaPower:
    base: "OmegaTerm"


OmegaTerm = Union[Var, Concat, OmegaPower]


@dataclass(frozen=True)
class OmegaIdentity:
    """U = V over the variables `vars`, kept in order of first occurrence."""

    lhs: OmegaTerm
    rhs: OmegaTerm
    vars: Tuple[str, ...]

    def __post_init__(self):
        missing = set(term_vars(self.lhs)) | set(term_vars(self.rhs))
        missing -= set(self.vars)
        if missing:
            raise UnboundVariable(
                f"Identity variables {sorted(missing)} are not declared"
            )

    @property
    def is_equation(self) -> bool:
        """True when neither side contains an ω-power."""
        return not (_has_omega(self.lhs) or _has_omega(self.rhs))

    def __str__(self) -> str:
        return format_identity(self)


@dataclass
class IdentityVerdict:
    """Outcome of a satisfaction check; falsy when a counterexample exists."""

    holds: bool
    identity: Optional[OmegaIdentity] = None
    assignment: Optional[Dict[str, int]] = None

    def __bool__(self) -> bool:
        return self.holds


def term_vars(t: OmegaTerm) -> Iterator[str]:
    """Variables of t in order of first occurrence (with repeats)."""
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Concat):
        yield from term_vars(t.left)
        yield from term_vars(t.right)
    else:
        yield from term_vars(t.base)


def _has_omega(t: OmegaTerm) -> bool:
    if isinstance(t, OmegaPower):
        return True
    if isinstance(t, Concat):
        return _has_omega(t.left) or _has_omega(t.right)
    return False


# ---------------------------------------------------------------------------
# Parsing and printing

_TOKEN = re.compile(r"\s*(?:(\^w)|([A-Za-z_][A-Za-z0-9_']*)|([()=]))")


def _tokenize(source: str, offset: int = 0) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        match = _TOKEN.match(source, pos)
        if not match:
            start = len(source) - len(source[pos:].lstrip())
            raise FormulaSyntaxError(
                f"Unexpected character '{source[start]}' in identity", offset + start
            )
        kind = "omega" if match.group(1) else "ident" if match.group(2) else match.group(3)
        tokens.append((kind, match.group(match.lastindex), offset + match.start(match.lastindex)))
        pos = match.end()
    tokens.append(("end", "", offset + len(source)))
    return tokens


class _IdentityParser:
    def __init__(self, source: str, offset: int):
        self.tokens = _tokenize(source, offset)
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str) -> Tuple[str, str, int]:
        token = self.advance()
        if token[0] != kind:
            shown = token[1] or "end of input"
            raise FormulaSyntaxError(f"Expected '{kind}', found '{shown}'", token[2])
        return token

    def term(self) -> OmegaTerm:
        result = self.factor()
        while self.peek()[0] in ("ident", "("):
            result = Concat(result, self.factor())
        return result

    def factor(self) -> OmegaTerm:
        kind, text, pos = self.advance()
        if kind == "ident":
            result: OmegaTerm = Var(text)
        elif kind == "(":
            result = self.term()
            self.expect(")")
        else:
            raise FormulaSyntaxError(
                f"Expected a variable or '(', found '{text or 'end of input'}'", pos
            )
        while self.peek()[0] == "omega":
            self.advance()
            result = OmegaPower(result)
        return result


def parse_identity(source: str, offset: int = 0) -> OmegaIdentity:
    """
    Parse ``term = term`` where term := factor+ and factor := ident |
    "(" term ")" | factor "^w".

    Raises:
        FormulaSyntaxError: With the character position of the problem
    """
    parser = _IdentityParser(source, offset)
    lhs = parser.term()
    parser.expect("=")
    rhs = parser.term()
    parser.expect("end")
    names = list(dict.fromkeys(itertools.chain(term_vars(lhs), term_vars(rhs))))
    return OmegaIdentity(lhs, rhs, tuple(names))


def parse_identity_file(text: str) -> List[List[OmegaIdentity]]:
    """One basis per line, identities separated by ';', '#' starts a comment."""
    bases = []
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.split("#", 1)[0]
        if line.strip():
            basis = []
            start = 0
            for part in line.split(";"):
                if part.strip():
                    basis.append(parse_identity(part, offset + start))
                start += len(part) + 1
            bases.append(basis)
        offset += len(raw)
    return bases


def rename_term(t: OmegaTerm, mapping: Mapping[str, str]) -> OmegaTerm:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Concat):
        return Concat(rename_term(t.left, mapping), rename_term(t.right, mapping))
    return OmegaPower(rename_term(t.base, mapping))


def rename_identity(identity: OmegaIdentity, mapping: Mapping[str, str]) -> OmegaIdentity:
    """Simultaneous renaming of variables; merged names keep their first slot."""
    names = tuple(dict.fromkeys(mapping.get(v, v) for v in identity.vars))
    return OmegaIdentity(
        rename_term(identity.lhs, mapping), rename_term(identity.rhs, mapping), names
    )


def format_term(t: OmegaTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, OmegaPower):
        inner = format_term(t.base)
        return f"{inner}^w" if isinstance(t.base, (Var, OmegaPower)) else f"({inner})^w"
    right = format_term(t.right)
    if isinstance(t.right, Concat):
        right = f"({right})"
    return f"{format_term(t.left)} {right}"


def format_identity(identity: OmegaIdentity) -> str:
    return f"{format_term(identity.lhs)} = {format_term(identity.rhs)}"


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(s: PartialGroupoid, t: OmegaTerm, h: Mapping[str, int]) -> int:
    """
    Evaluate t under h, with h(UV) = h(U)h(V) and h(U^ω) = h(U)^ω.

    Raises:
        NotASemigroup: If s is not a semigroup
        UnboundVariable: If h misses a variable of t
    """
    require_semigroup(s, "eval_term")
    return _eval(s, t, h)


def _eval(s: PartialGroupoid, t: OmegaTerm, h: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return h[t.name]
        except KeyError:
            raise UnboundVariable(f"Variable '{t.name}' has no value")
    if isinstance(t, Concat):
        return s.product(_eval(s, t.left, h), _eval(s, t.right, h))
    return omega(s, _eval(s, t.base, h))


def assignments(s: PartialGroupoid, names: Sequence[str]) -> Iterator[Dict[str, int]]:
    """All maps names → elements in lexicographic order."""
    for values in itertools.product(s.elements, repeat=len(names)):
        yield dict(zip(names, values))


def satisfies_identity(s: PartialGroupoid, identity: OmegaIdentity) -> IdentityVerdict:
    """Brute force over all |S|^|X| assignments; reports the first failure."""
    require_semigroup(s, "satisfies_identity")
    for h in assignments(s, identity.vars):
        if _eval(s, identity.lhs, h) != _eval(s, identity.rhs, h):
            logger.debug(f"{format_identity(identity)} fails at {h} in {s.label()}")
            return IdentityVerdict(False, identity, h)
    return IdentityVerdict(True, identity)


def satisfies_basis(
    s: PartialGroupoid, identities: Sequence[OmegaIdentity]
) -> IdentityVerdict:
    for identity in identities:
        verdict = satisfies_identity(s, identity)
        if not verdict:
            return verdict
    return IdentityVerdict(True)


# ---------------------------------------------------------------------------
# Compilation to first-order formulas


def identity_to_formula(identity: OmegaIdentity, close: bool = False, fresh=None):
    """
    First-order formula φ(x₁..x_k) that holds exactly for the assignments
    satisfying the identity in a finite semigroup.

    The ω-power is captured by ξ(p, y): y is the ≤H-maximal idempotent with
    py R y and yp L y. With `close` set, the variables are universally
    quantified in declaration order.

    Args:
        identity: The identity to compile
        close: Return the defining sentence instead of the open formula
        fresh: FreshNames counter shared with an enclosing formula

    Returns:
        A Formula
    """
    from src.assets import formulas as fo

    names = fresh or fo.FreshNames()
    body = _compile_eq(identity.lhs, identity.rhs, names, fo)
    if close:
        for name in reversed(identity.vars):
            body = fo.Forall(name, body)
    return body


def _compile_eq(u: OmegaTerm, v: OmegaTerm, fresh, fo):
    if isinstance(u, Var) and isinstance(v, Var):
        return fo.Eq(u.name, v.name)
    if isinstance(v, Var):
        return _compile_to_var(u, v.name, fresh, fo)
    if isinstance(u, Var):
        return _compile_to_var(v, u.name, fresh, fo)
    w = fresh.next()
    return fo.Exists(
        w, fo.And(_compile_to_var(u, w, fresh, fo), _compile_to_var(v, w, fresh, fo))
    )


def _compile_to_var(t: OmegaTerm, y: str, fresh, fo):
    if isinstance(t, Var):
        return fo.Eq(t.name, y)
    if isinstance(t, Concat):
        p, q = fresh.next(), fresh.next()
        return fo.Exists(
            p,
            fo.Exists(
                q,
                fo.And(
                    _compile_to_var(t.left, p, fresh, fo),
                    fo.And(_compile_to_var(t.right, q, fresh, fo), fo.Mult(p, q, y)),
                ),
            ),
        )
    p = fresh.next()
    return fo.Exists(p, fo.And(_compile_to_var(t.base, p, fresh, fo), omega_formula(p, y, fresh)))


def omega_formula(p: str, y: str, fresh=None):
    """ξ(p, y): y equals p^ω in every finite semigroup."""
    from src.assets import formulas as fo

    names = fresh or fo.FreshNames()
    z = names.next()
    G = fo.GreenRelation

    def product_related(a: str, b: str, rel, target: str):
        u = names.next()
        return fo.Exists(u, fo.And(fo.Mult(a, b, u), fo.Green(rel, u, target)))

    maximal = fo.Forall(
        z,
        fo.disjunction(
            [
                fo.Eq(y, z),
                fo.Not(fo.Mult(z, z, z)),
                fo.Not(fo.Green(G.LEQ_H, y, z)),
                fo.Not(product_related(p, z, G.R, z)),
                fo.Not(product_related(z, p, G.L, z)),
            ]
        ),
    )
    return fo.conjunction(
        [
            fo.Mult(y, y, y),
            product_related(p, y, G.R, y),
            product_related(y, p, G.L, y),
            maximal,
        ]
    )
