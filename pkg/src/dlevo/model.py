"""Signature, TBox, ABox and atom vocabulary of DL-Lite_{A,id}.

All types are frozen dataclasses. Structural invariants (path shape, ID
locality, literal validity) are checked on construction; name resolution
against a :class:`Signature` happens when a :class:`KnowledgeBase` is built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

DATATYPES = ("top", "integer", "string", "boolean", "rational")
VALUE_TYPES = DATATYPES[1:]


class ModelError(ValueError):
    """Structured validation failure.

    ``kind`` is one of ``undeclared-name``, ``category-mismatch``,
    ``non-local-id``, ``bad-literal``, ``duplicate-declaration`` or
    ``bad-path``.
    """

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message


# ---------------------------------------------------------------------------
# values

_INT_RE = re.compile(r"[+-]?\d+")
_RAT_RE = re.compile(r"[+-]?\d+(?:\.\d+|/\d+)?")
_BOOL_FORMS = {"true": "true", "1": "true", "false": "false", "0": "false"}


def normalize_lexical(datatype: str, lexical: str) -> str:
    """Canonical lexical form of ``lexical`` for ``datatype``.

    Raises ModelError(bad-literal) when the form is not valid for the type.
    """
    if datatype == "integer":
        if not _INT_RE.fullmatch(lexical):
            raise ModelError("bad-literal", f"{lexical!r} is not an integer")
        return str(int(lexical))
    if datatype == "rational":
        if not _RAT_RE.fullmatch(lexical):
            raise ModelError("bad-literal", f"{lexical!r} is not a rational")
        if "/" in lexical:
            num, den = lexical.split("/")
            if int(den) == 0:
                raise ModelError("bad-literal", f"{lexical!r} has a zero denominator")
            q = Fraction(int(num), int(den))
        else:
            q = Fraction(lexical)
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    if datatype == "boolean":
        try:
            return _BOOL_FORMS[lexical.lower()]
        except KeyError:
            raise ModelError("bad-literal", f"{lexical!r} is not a boolean") from None
    if datatype == "string":
        return lexical
    raise ModelError("bad-literal", f"no values have datatype {datatype!r}")


def _quote(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + escaped + '"'


@dataclass(frozen=True)
class TypedValue:
    """A data value; equal values share datatype and normalized lexical form."""

    lexical: str
    datatype: str

    def __post_init__(self) -> None:
        if self.datatype not in VALUE_TYPES:
            raise ModelError("bad-literal", f"unknown value datatype {self.datatype!r}")
        object.__setattr__(self, "lexical", normalize_lexical(self.datatype, self.lexical))

    def __str__(self) -> str:
        if self.datatype == "integer":
            return self.lexical
        if self.datatype == "string":
            return _quote(self.lexical)
        return f"{self.lexical}^^{self.datatype}"


# ---------------------------------------------------------------------------
# concept and role expressions


@dataclass(frozen=True)
class RoleExpr:
    name: str
    inverted: bool = False

    @property
    def inverse(self) -> RoleExpr:
        return RoleExpr(self.name, not self.inverted)

    def __str__(self) -> str:
        return f"inv({self.name})" if self.inverted else self.name


@dataclass(frozen=True)
class AtomicConcept:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ExistsRole:
    role: RoleExpr

    def __str__(self) -> str:
        return f"exists {self.role}"


@dataclass(frozen=True)
class AttributeDomain:
    attribute: str

    def __str__(self) -> str:
        return f"delta({self.attribute})"


BasicConcept = Union[AtomicConcept, ExistsRole, AttributeDomain]


def exists(name: str, inverted: bool = False) -> ExistsRole:
    return ExistsRole(RoleExpr(name, inverted))


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class RoleStep:
    role: RoleExpr

    def __str__(self) -> str:
        return str(self.role)


@dataclass(frozen=True)
class AttributeStep:
    attribute: str

    def __str__(self) -> str:
        return f"attr {self.attribute}"


@dataclass(frozen=True)
class TestStep:
    concept: BasicConcept

    __test__ = False  # not a pytest class

    def __str__(self) -> str:
        return f"test({self.concept})"


Step = Union[RoleStep, AttributeStep, TestStep]


@dataclass(frozen=True)
class Path:
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ModelError("bad-path", "a path needs at least one step")
        for step in self.steps[:-1]:
            if isinstance(step, AttributeStep):
                raise ModelError(
                    "bad-path", f"attribute step {step} must be the last step of a path"
                )

    @property
    def length(self) -> int:
        return sum(1 for s in self.steps if not isinstance(s, TestStep))

    def __str__(self) -> str:
        return " o ".join(str(s) for s in self.steps)


# ---------------------------------------------------------------------------
# TBox assertions


@dataclass(frozen=True)
class ConceptInclusion:
    lhs: BasicConcept
    rhs: BasicConcept
    negated: bool = False

    def __str__(self) -> str:
        return f"{self.lhs} ISA {'not ' if self.negated else ''}{self.rhs}"


@dataclass(frozen=True)
class RoleInclusion:
    lhs: RoleExpr
    rhs: RoleExpr
    negated: bool = False

    def __str__(self) -> str:
        return f"{self.lhs} ISA {'not ' if self.negated else ''}{self.rhs}"


@dataclass(frozen=True)
class AttributeInclusion:
    lhs: str
    rhs: str
    negated: bool = False

    def __str__(self) -> str:
        return f"attr {self.lhs} ISA {'not ' if self.negated else ''}{self.rhs}"


@dataclass(frozen=True)
class ValueDomainInclusion:
    attribute: str
    datatype: str

    def __post_init__(self) -> None:
        if self.datatype not in DATATYPES:
            raise ModelError("bad-literal", f"unknown value domain {self.datatype!r}")

    def __str__(self) -> str:
        return f"range({self.attribute}) ISA {self.datatype}"


@dataclass(frozen=True)
class AttributeFunctionality:
    attribute: str

    def __str__(self) -> str:
        return f"funct {self.attribute}"


@dataclass(frozen=True)
class Identification:
    concept: BasicConcept
    paths: tuple[Path, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ModelError("non-local-id", "an identification needs at least one path")
        if not any(p.length == 1 for p in self.paths):
            raise ModelError(
                "non-local-id", f"identification of {self.concept} has no path of length 1"
            )

    def __str__(self) -> str:
        return f"id {self.concept}: " + ", ".join(str(p) for p in self.paths)


TBoxAssertion = Union[
    ConceptInclusion,
    RoleInclusion,
    AttributeInclusion,
    ValueDomainInclusion,
    AttributeFunctionality,
    Identification,
]

Inclusion = (ConceptInclusion, RoleInclusion, AttributeInclusion)


def is_positive(t: TBoxAssertion) -> bool:
    return isinstance(t, Inclusion) and not t.negated


def partition_tbox(
    tbox: Iterable[TBoxAssertion],
) -> tuple[frozenset, frozenset, frozenset]:
    """Split a TBox into (positive inclusions, negative constraints, IDs)."""
    plus, minus, ids = set(), set(), set()
    for t in tbox:
        if isinstance(t, Identification):
            ids.add(t)
        elif is_positive(t):
            plus.add(t)
        else:
            minus.add(t)
    return frozenset(plus), frozenset(minus), frozenset(ids)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class ConceptAtom:
    concept: str
    individual: str

    def __str__(self) -> str:
        return f"{self.concept}({self.individual})"


@dataclass(frozen=True)
class RoleAtom:
    role: str
    subject: str
    object: str

    def __str__(self) -> str:
        return f"{self.role}({self.subject},{self.object})"


@dataclass(frozen=True)
class AttributeAtom:
    attribute: str
    subject: str
    value: TypedValue

    def __str__(self) -> str:
        return f"{self.attribute}({self.subject},{self.value})"


Atom = Union[ConceptAtom, RoleAtom, AttributeAtom]


def atom_key(atom: Atom) -> str:
    return str(atom)


def sorted_atoms(atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=str)


def role_atom(role: RoleExpr, x: str, y: str) -> RoleAtom:
    """The non-inverted atom asserting ``role(x, y)``."""
    return RoleAtom(role.name, y, x) if role.inverted else RoleAtom(role.name, x, y)


def atoms_individuals(atoms: Iterable[Atom]) -> frozenset[str]:
    """Object constants occurring in ``atoms``; data values are not individuals."""
    out: set[str] = set()
    for a in atoms:
        if isinstance(a, ConceptAtom):
            out.add(a.individual)
        elif isinstance(a, RoleAtom):
            out.update((a.subject, a.object))
        else:
            out.add(a.subject)
    return frozenset(out)


# ---------------------------------------------------------------------------
# signature and knowledge base


@dataclass(frozen=True)
class Signature:
    concepts: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for name in ("concepts", "roles", "attributes"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        for a, b in (
            (self.concepts, self.roles),
            (self.concepts, self.attributes),
            (self.roles, self.attributes),
        ):
            clash = a & b
            if clash:
                raise ModelError(
                    "duplicate-declaration",
                    f"{sorted(clash)[0]} is declared in two categories",
                )

    def category(self, name: str) -> str | None:
        if name in self.concepts:
            return "concept"
        if name in self.roles:
            return "role"
        if name in self.attributes:
            return "attr"
        return None

    def require(self, name: str, category: str) -> None:
        found = self.category(name)
        if found is None:
            raise ModelError("undeclared-name", f"{name} is not declared")
        if found != category:
            raise ModelError("category-mismatch", f"{name} is a {found}, not a {category}")

    # -- structural checks ------------------------------------------------

    def check_concept(self, b: BasicConcept) -> None:
        if isinstance(b, AtomicConcept):
            self.require(b.name, "concept")
        elif isinstance(b, ExistsRole):
            self.require(b.role.name, "role")
        else:
            self.require(b.attribute, "attr")

    def check_path(self, path: Path) -> None:
        for step in path.steps:
            if isinstance(step, RoleStep):
                self.require(step.role.name, "role")
            elif isinstance(step, AttributeStep):
                self.require(step.attribute, "attr")
            else:
                self.check_concept(step.concept)

    def check_assertion(self, t: TBoxAssertion) -> None:
        if isinstance(t, ConceptInclusion):
            self.check_concept(t.lhs)
            self.check_concept(t.rhs)
        elif isinstance(t, RoleInclusion):
            self.require(t.lhs.name, "role")
            self.require(t.rhs.name, "role")
        elif isinstance(t, AttributeInclusion):
            self.require(t.lhs, "attr")
            self.require(t.rhs, "attr")
        elif isinstance(t, (ValueDomainInclusion, AttributeFunctionality)):
            self.require(t.attribute, "attr")
        else:
            self.check_concept(t.concept)
            for p in t.paths:
                self.check_path(p)

    def check_atom(self, atom: Atom) -> None:
        if isinstance(atom, ConceptAtom):
            self.require(atom.concept, "concept")
            names = (atom.individual,)
        elif isinstance(atom, RoleAtom):
            self.require(atom.role, "role")
            names = (atom.subject, atom.object)
        else:
            self.require(atom.attribute, "attr")
            names = (atom.subject,)
        for n in names:
            cat = self.category(n)
            if cat is not None:
                raise ModelError(
                    "category-mismatch", f"{n} is a {cat} name, not an object constant"
                )


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature = field(default_factory=Signature)
    tbox: frozenset = frozenset()
    abox: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tbox", frozenset(self.tbox))
        object.__setattr__(self, "abox", frozenset(self.abox))
        for t in self.tbox:
            self.signature.check_assertion(t)
        for a in self.abox:
            self.signature.check_atom(a)

    @property
    def individuals(self) -> frozenset[str]:
        return atoms_individuals(self.abox)

    def with_abox(self, abox: Iterable[Atom]) -> KnowledgeBase:
        return KnowledgeBase(self.signature, self.tbox, frozenset(abox))
