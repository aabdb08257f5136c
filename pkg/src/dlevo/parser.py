"""Concrete syntax for knowledge bases, fact lists and changelogs.

A KB file looks like::

    SIGNATURE
    concept OD.  concept TM.  role mf.  attr age.
    TBOX
    OD ISA TM.
    OD ISA not TD.
    exists inv(mf) ISA FT.
    id OD: mf.
    funct age.
    range(age) ISA integer.
    ABOX
    OD(s).  mf(s,t1).  age(s, 33).

Names must be declared before use. ``#`` starts a comment. Every parse
failure raises a single :class:`ParseError` carrying the position of the
offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .model import (
    DATATYPES,
    AtomicConcept,
    Atom,
    AttributeAtom,
    AttributeDomain,
    AttributeFunctionality,
    AttributeInclusion,
    AttributeStep,
    BasicConcept,
    ConceptAtom,
    ConceptInclusion,
    ExistsRole,
    Identification,
    KnowledgeBase,
    ModelError,
    Path,
    RoleAtom,
    RoleExpr,
    RoleInclusion,
    RoleStep,
    Signature,
    TestStep,
    TypedValue,
    ValueDomainInclusion,
    sorted_atoms,
)

RESERVED = frozenset(
    {
        "SIGNATURE", "TBOX", "ABOX", "concept", "role", "attr", "funct", "id",
        "ISA", "not", "exists", "inv", "delta", "range", "test", "o",
    }
)  # fmt: skip

PARSE_ERROR_KINDS = (
    "lexical",
    "syntactic",
    "undeclared-name",
    "category-mismatch",
    "non-local-id",
    "bad-literal",
    "duplicate-declaration",
)


class ParseError(Exception):
    def __init__(self, line: int, column: int, kind: str, message: str) -> None:
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.line = line
        self.column = column
        self.kind = kind
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUMBER, STRING, PUNCT, EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<NUMBER>[+-]?\d+(?:\.\d+|/\d+)?)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<PUNCT>\^\^|[().,:;])
    """,
    re.VERBOSE,
)


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, column, "lexical", f"unexpected character {text[pos]!r}")
        chunk = m.group()
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, chunk, line, column))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            column = len(chunk) - chunk.rfind("\n")
        else:
            column += len(chunk)
        pos = m.end()
    tokens.append(Token("EOF", "", line, column))
    return tokens


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: "\n" if m.group(1) == "n" else m.group(1), s[1:-1])


class _Parser:
    def __init__(self, tokens: list[Token], sig: Signature | None = None) -> None:
        self.tokens = tokens
        self.i = 0
        self.sig = sig if sig is not None else Signature()

    # -- token plumbing ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("NAME", "PUNCT") and self.tok.text == text

    def fail(self, kind: str, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(tok.line, tok.column, kind, message)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.fail("syntactic", f"expected {text!r}, found {found!r}")
        return self.advance()

    def name(self, what: str = "name") -> Token:
        tok = self.tok
        if tok.kind != "NAME":
            raise self.fail("syntactic", f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.advance()

    def predicate(self, category: str) -> str:
        tok = self.name(f"{category} name")
        self.resolve(tok, category)
        return tok.text

    def resolve(self, tok: Token, category: str) -> None:
        try:
            self.sig.require(tok.text, category)
        except ModelError as e:
            raise self.fail(e.kind, e.message, tok) from None

    # -- signature -----------------------------------------------------------

    def signature(self) -> Signature:
        # the header may be omitted, leaving nothing declared
        if not self.at("SIGNATURE"):
            return Signature()
        self.advance()
        decls: dict[str, set[str]] = {"concept": set(), "role": set(), "attr": set()}
        seen: set[str] = set()
        while self.tok.text in decls and self.tok.kind == "NAME":
            category = self.advance().text
            tok = self.name(f"{category} name")
            if tok.text in RESERVED:
                raise self.fail("syntactic", f"{tok.text!r} is a reserved word", tok)
            if tok.text in seen:
                raise self.fail("duplicate-declaration", f"{tok.text} is declared twice", tok)
            seen.add(tok.text)
            decls[category].add(tok.text)
            self.expect(".")
        return Signature(decls["concept"], decls["role"], decls["attr"])

    # -- TBox ----------------------------------------------------------------

    def role_expr(self) -> RoleExpr:
        if self.at("inv"):
            self.advance()
            self.expect("(")
            name = self.predicate("role")
            self.expect(")")
            return RoleExpr(name, True)
        return RoleExpr(self.predicate("role"))

    def basic(self) -> BasicConcept:
        if self.at("exists"):
            self.advance()
            return ExistsRole(self.role_expr())
        if self.at("delta"):
            self.advance()
            self.expect("(")
            name = self.predicate("attr")
            self.expect(")")
            return AttributeDomain(name)
        return AtomicConcept(self.predicate("concept"))

    def negation(self) -> bool:
        self.expect("ISA")
        if self.at("not"):
            self.advance()
            return True
        return False

    def step(self):
        if self.at("attr"):
            self.advance()
            return AttributeStep(self.predicate("attr"))
        if self.at("test"):
            self.advance()
            self.expect("(")
            b = self.basic()
            self.expect(")")
            return TestStep(b)
        return RoleStep(self.role_expr())

    def path(self) -> Path:
        start = self.tok
        steps = [self.step()]
        while self.at("o"):
            self.advance()
            steps.append(self.step())
        try:
            return Path(tuple(steps))
        except ModelError as e:
            raise self.fail("syntactic", e.message, start) from None

    def tbox_assertion(self):
        start = self.tok
        if self.at("funct"):
            self.advance()
            t = AttributeFunctionality(self.predicate("attr"))
        elif self.at("id"):
            self.advance()
            concept = self.basic()
            self.expect(":")
            paths = [self.path()]
            while self.at(","):
                self.advance()
                paths.append(self.path())
            try:
                t = Identification(concept, tuple(paths))
            except ModelError as e:
                raise self.fail(e.kind, e.message, start) from None
        elif self.at("attr"):
            self.advance()
            lhs = self.predicate("attr")
            neg = self.negation()
            t = AttributeInclusion(lhs, self.predicate("attr"), neg)
        elif self.at("range"):
            self.advance()
            self.expect("(")
            attr = self.predicate("attr")
            self.expect(")")
            self.expect("ISA")
            dt = self.name("value domain")
            if dt.text not in DATATYPES:
                raise self.fail("bad-literal", f"unknown value domain {dt.text!r}", dt)
            t = ValueDomainInclusion(attr, dt.text)
        elif self.at("inv") or (
            self.tok.kind == "NAME" and self.sig.category(self.tok.text) == "role"
        ):
            lhs_role = self.role_expr()
            neg = self.negation()
            t = RoleInclusion(lhs_role, self.role_expr(), neg)
        else:
            lhs = self.basic()
            neg = self.negation()
            t = ConceptInclusion(lhs, self.basic(), neg)
        self.expect(".")
        return t

    # -- ABox ----------------------------------------------------------------

    def individual(self) -> str:
        tok = self.name("object constant")
        cat = self.sig.category(tok.text)
        if cat is not None:
            raise self.fail(
                "category-mismatch", f"{tok.text} is a {cat} name, not an object constant", tok
            )
        return tok.text

    def value(self) -> TypedValue:
        tok = self.tok
        if tok.kind == "STRING":
            lexical, default = _unquote(tok.text), "string"
        elif tok.kind == "NUMBER":
            lexical, default = tok.text, "integer"
        elif tok.kind == "NAME":
            lexical, default = tok.text, None
        else:
            raise self.fail("syntactic", f"expected a literal, found {tok.text or 'end of input'!r}")
        self.advance()
        datatype = default
        if self.at("^^"):
            self.advance()
            dt = self.name("datatype")
            datatype = dt.text
        if datatype is None:
            raise self.fail("bad-literal", f"{lexical} needs a ^^datatype suffix", tok)
        try:
            return TypedValue(lexical, datatype)
        except ModelError as e:
            raise self.fail("bad-literal", e.message, tok) from None

    def atom(self, terminator: bool = True) -> Atom:
        head = self.name("predicate")
        cat = self.sig.category(head.text)
        if cat is None:
            raise self.fail("undeclared-name", f"{head.text} is not declared", head)
        self.expect("(")
        subject = self.individual()
        if cat == "concept":
            self.expect(")")
            atom: Atom = ConceptAtom(head.text, subject)
        else:
            if not self.at(","):
                raise self.fail("category-mismatch", f"{head.text} is a {cat}, it takes two arguments", head)
            self.advance()
            if cat == "role":
                atom = RoleAtom(head.text, subject, self.individual())
            else:
                atom = AttributeAtom(head.text, subject, self.value())
            self.expect(")")
        if terminator:
            self.expect(".")
        return atom

    def atoms_until(self, stop: Iterable[str] = ()) -> list[Atom]:
        out = []
        stop = set(stop)
        while self.tok.kind != "EOF" and self.tok.text not in stop:
            out.append(self.atom())
        return out

    # -- entry points --------------------------------------------------------

    def kb(self) -> KnowledgeBase:
        self.sig = self.signature()
        self.expect("TBOX")
        tbox = []
        while not (self.at("ABOX") or self.tok.kind == "EOF"):
            tbox.append(self.tbox_assertion())
        self.expect("ABOX")
        abox = self.atoms_until()
        return KnowledgeBase(self.sig, frozenset(tbox), frozenset(abox))


def parse_kb(text: str) -> KnowledgeBase:
    """Parse and validate a KB file."""
    return _Parser(tokenize(text)).kb()


def parse_facts(text: str, sig: Signature) -> list[Atom]:
    """Parse a fact list against ``sig``; order and duplicates are kept."""
    p = _Parser(tokenize(text), sig)
    return p.atoms_until()


def parse_changelog(text: str, sig: Signature) -> list[tuple[str, list[Atom]]]:
    """Parse ``insert:``/``delete:`` lines into (operation, atoms) steps.

    Atoms on a line are separated by ``;``; a trailing ``.`` on each atom
    is optional.
    """
    steps: list[tuple[str, list[Atom]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize(raw, line=lineno)
        if tokens[0].kind == "EOF":
            continue
        p = _Parser(tokens, sig)
        op = p.name("'insert' or 'delete'")
        if op.text not in ("insert", "delete"):
            raise p.fail("syntactic", f"expected 'insert' or 'delete', found {op.text!r}", op)
        p.expect(":")
        atoms = []
        while True:
            atoms.append(p.atom(terminator=False))
            if p.at("."):
                p.advance()
            if p.at(";"):
                p.advance()
                continue
            if p.tok.kind != "EOF":
                raise p.fail("syntactic", f"expected ';' or end of line, found {p.tok.text!r}")
            break
        steps.append((op.text, atoms))
    return steps


# ---------------------------------------------------------------------------
# serialization


def serialize_atoms(atoms: Iterable[Atom]) -> str:
    return "".join(f"{a}.\n" for a in sorted_atoms(set(atoms)))


def serialize_kb(kb: KnowledgeBase) -> str:
    sig = kb.signature
    decls = sorted(
        [f"concept {n}." for n in sig.concepts]
        + [f"role {n}." for n in sig.roles]
        + [f"attr {n}." for n in sig.attributes]
    )
    tbox = sorted(f"{t}." for t in kb.tbox)
    lines = ["SIGNATURE", *decls, "TBOX", *tbox, "ABOX"]
    return "\n".join(lines) + "\n" + serialize_atoms(kb.abox)
