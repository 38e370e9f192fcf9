"""Expression syntax: AST, concrete grammar, theory classification, communication functions.

The expression language is regular expressions (deadlock ``0``, empty ``1``,
actions, ``.``, ``+``, postfix ``*``) extended with interleaving ``||`` and
encapsulation ``encap{a,b}(p)``.  All values here are immutable; equality on
expressions is structural, node by node, with no rewriting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED_WORDS = frozenset({"encap"})


class ParseError(ValueError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CommFnError(ValueError):
    """Malformed or inconsistent communication-function table."""


@dataclass(frozen=True, order=True)
class Action:
    """An atomic action, identified by name."""

    name: str

    def __post_init__(self):
        if _IDENT_RE.fullmatch(self.name) is None:
            raise ValueError(f"invalid action name {self.name!r}")
        if self.name in _RESERVED_WORDS:
            raise ValueError(f"{self.name!r} is a reserved word and cannot name an action")

    def __str__(self) -> str:
        return self.name


class Expression:
    """Base class of the eight expression variants."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Deadlock(Expression):
    """The process with no transitions and no termination, written ``0``."""


@dataclass(frozen=True, slots=True)
class Empty(Expression):
    """The successfully terminated process, written ``1``."""


@dataclass(frozen=True, slots=True)
class Act(Expression):
    action: Action


@dataclass(frozen=True, slots=True)
class Seq(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class Alt(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class Star(Expression):
    body: Expression


@dataclass(frozen=True, slots=True)
class Par(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class Encap(Expression):
    blocked: frozenset[Action]
    body: Expression

    def __post_init__(self):
        object.__setattr__(self, "blocked", frozenset(self.blocked))


DEADLOCK = Deadlock()
EMPTY = Empty()


def act(name: str) -> Act:
    """Shorthand for an action expression."""
    return Act(Action(name))


def subterms(e: Expression) -> Iterator[Expression]:
    """Yield every node of the expression tree, root first."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Seq, Alt, Par)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Star):
            stack.append(node.body)
        elif isinstance(node, Encap):
            stack.append(node.body)


class Theory(Enum):
    """The three expression classes, ordered BPA < PA < ACP by syntax inclusion."""

    BPA = "BPA"
    PA = "PA"
    ACP = "ACP"


def classify_theory(e: Expression) -> Theory:
    """Smallest theory containing ``e``: BPA without Par/Encap, PA adds Par, ACP adds Encap."""
    has_par = False
    for node in subterms(e):
        if isinstance(node, Encap):
            return Theory.ACP
        if isinstance(node, Par):
            has_par = True
    return Theory.PA if has_par else Theory.BPA


# ---------------------------------------------------------------------------
# Tokeniser and parser
# ---------------------------------------------------------------------------

_SIMPLE_TOKENS = {
    "0": "ZERO",
    "1": "ONE",
    "*": "STAR",
    ".": "DOT",
    "+": "PLUS",
    "(": "LPAREN",
    ")": "RPAREN",
    "{": "LBRACE",
    "}": "RBRACE",
    ",": "COMMA",
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SIMPLE_TOKENS:
            tokens.append((_SIMPLE_TOKENS[c], c, i))
            i += 1
            continue
        if c == "|":
            if text.startswith("||", i):
                tokens.append(("PAR", "||", i))
                i += 2
                continue
            raise ParseError("single '|' is not an operator, use '||'", i)
        m = _IDENT_RE.match(text, i)
        if m is not None:
            word = m.group()
            kind = "ENCAP" if word == "encap" else "IDENT"
            tokens.append((kind, word, i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return tokens


class _Parser:
    """Recursive descent over the operator levels ``+`` < ``||`` < ``.`` < ``*``."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def _next(self) -> tuple[str, str, int]:
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect(self, kind: str, what: str) -> tuple[str, str, int]:
        tok = self._next()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Expression:
        e = self._alternative()
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def _alternative(self) -> Expression:
        e = self._parallel()
        while self._peek() == "PLUS":
            self._next()
            e = Alt(e, self._parallel())
        return e

    def _parallel(self) -> Expression:
        e = self._sequence()
        while self._peek() == "PAR":
            self._next()
            e = Par(e, self._sequence())
        return e

    def _sequence(self) -> Expression:
        e = self._postfix()
        while self._peek() == "DOT":
            self._next()
            e = Seq(e, self._postfix())
        return e

    def _postfix(self) -> Expression:
        e = self._atom()
        while self._peek() == "STAR":
            self._next()
            e = Star(e)
        return e

    def _atom(self) -> Expression:
        kind, value, position = self._next()
        if kind == "ZERO":
            return DEADLOCK
        if kind == "ONE":
            return EMPTY
        if kind == "IDENT":
            return Act(Action(value))
        if kind == "LPAREN":
            e = self._alternative()
            self._expect("RPAREN", "')'")
            return e
        if kind == "ENCAP":
            self._expect("LBRACE", "'{'")
            names = []
            if self._peek() != "RBRACE":
                names.append(self._expect("IDENT", "action name")[1])
                while self._peek() == "COMMA":
                    self._next()
                    names.append(self._expect("IDENT", "action name")[1])
            self._expect("RBRACE", "'}'")
            self._expect("LPAREN", "'('")
            body = self._alternative()
            self._expect("RPAREN", "')'")
            return Encap(frozenset(Action(n) for n in names), body)
        raise ParseError(f"unexpected {value!r}", position)


def parse_expression(text: str) -> Expression:
    """Parse concrete syntax into an AST.

    Grammar, loosest to tightest: ``+``, ``||``, ``.`` (all left associative),
    postfix ``*``.  Atoms are ``0``, ``1``, action names, ``encap{...}(p)`` and
    parenthesised expressions.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Rendering with minimal parenthesisation
# ---------------------------------------------------------------------------

_PREC_ALT = 1
_PREC_PAR = 2
_PREC_SEQ = 3
_PREC_STAR = 4
_PREC_ATOM = 5


def _prec(e: Expression) -> int:
    if isinstance(e, Alt):
        return _PREC_ALT
    if isinstance(e, Par):
        return _PREC_PAR
    if isinstance(e, Seq):
        return _PREC_SEQ
    if isinstance(e, Star):
        return _PREC_STAR
    return _PREC_ATOM


def render_expression(e: Expression) -> str:
    """Concrete syntax with minimal parentheses; ``parse(render(e)) == e``."""
    out: list[str] = []

    def rend(node: Expression, minimum: int) -> None:
        wrap = _prec(node) < minimum
        if wrap:
            out.append("(")
        if isinstance(node, Deadlock):
            out.append("0")
        elif isinstance(node, Empty):
            out.append("1")
        elif isinstance(node, Act):
            out.append(node.action.name)
        elif isinstance(node, Seq):
            rend(node.left, _PREC_SEQ)
            out.append(".")
            rend(node.right, _PREC_SEQ + 1)
        elif isinstance(node, Alt):
            rend(node.left, _PREC_ALT)
            out.append("+")
            rend(node.right, _PREC_ALT + 1)
        elif isinstance(node, Par):
            rend(node.left, _PREC_PAR)
            out.append("||")
            rend(node.right, _PREC_PAR + 1)
        elif isinstance(node, Star):
            rend(node.body, _PREC_STAR)
            out.append("*")
        elif isinstance(node, Encap):
            out.append("encap{")
            out.append(",".join(sorted(a.name for a in node.blocked)))
            out.append("}(")
            rend(node.body, _PREC_ALT)
            out.append(")")
        else:  # pragma: no cover
            raise TypeError(f"not an expression: {node!r}")
        if wrap:
            out.append(")")

    rend(e, _PREC_ALT)
    return "".join(out)


# ---------------------------------------------------------------------------
# Communication functions
# ---------------------------------------------------------------------------


class CommFn:
    """Finite commutative partial communication function on actions.

    Entries are keyed on unordered action pairs, so commutativity holds by
    construction; associativity and handshaking are checked separately by
    :func:`validate_comm_fn`.  Instances are immutable.
    """

    __slots__ = ("_table",)

    def __init__(self, rules: Iterable[tuple[Action, Action, Action]] = ()):
        table: dict[frozenset[Action], Action] = {}
        for a, b, result in rules:
            key = frozenset((a, b))
            previous = table.get(key)
            if previous is not None and previous != result:
                raise CommFnError(
                    f"conflicting rules for {{{a}, {b}}}: {previous} vs {result}"
                )
            table[key] = result
        self._table = table

    def lookup(self, a: Action, b: Action) -> Action | None:
        return self._table.get(frozenset((a, b)))

    @property
    def is_empty(self) -> bool:
        return not self._table

    def pairs(self) -> list[tuple[Action, Action, Action]]:
        """All rules as (a, b, result) with a <= b, sorted."""
        rules = []
        for key, result in self._table.items():
            members = sorted(key)
            a, b = (members[0], members[-1])
            rules.append((a, b, result))
        return sorted(rules)

    def arguments(self) -> frozenset[Action]:
        return frozenset(a for key in self._table for a in key)

    def results(self) -> frozenset[Action]:
        return frozenset(self._table.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommFn):
            return NotImplemented
        return self._table == other._table

    def __repr__(self) -> str:
        body = ", ".join(f"({a},{b})->{c}" for a, b, c in self.pairs())
        return f"CommFn({body})"


EMPTY_COMM = CommFn()


@dataclass(frozen=True)
class CommValidation:
    """Outcome of the associativity and handshaking checks on a CommFn."""

    commutative: bool
    associative: bool
    handshaking: bool
    associativity_violations: tuple[tuple[Action, Action, Action], ...]
    handshaking_violations: tuple[Action, ...]

    @property
    def violations(self) -> tuple[str, ...]:
        messages = []
        for a, b, c in self.associativity_violations:
            messages.append(f"associativity fails on ({a}, {b}, {c})")
        for a in self.handshaking_violations:
            messages.append(f"{a} is both a result and an argument")
        return tuple(messages)


def validate_comm_fn(g: CommFn) -> CommValidation:
    """Check associativity over the finite table closure, and handshaking.

    Associativity holds when gamma(gamma(a,b),c) and gamma(a,gamma(b,c)) are
    both undefined or both defined and equal, for all triples over the actions
    mentioned in the table.  Handshaking holds when no result of gamma occurs
    as an argument of a defined pair.
    """
    closure = sorted(g.arguments() | g.results())
    assoc_violations = []
    for a in closure:
        for b in closure:
            ab = g.lookup(a, b)
            for c in closure:
                left = g.lookup(ab, c) if ab is not None else None
                bc = g.lookup(b, c)
                right = g.lookup(a, bc) if bc is not None else None
                if left != right:
                    assoc_violations.append((a, b, c))
    handshake_violations = sorted(g.results() & g.arguments())
    return CommValidation(
        commutative=True,
        associative=not assoc_violations,
        handshaking=not handshake_violations,
        associativity_violations=tuple(assoc_violations),
        handshaking_violations=tuple(handshake_violations),
    )


_RULE_RE = re.compile(
    r"([A-Za-z_][A-Za-z0-9_]*)\s+([A-Za-z_][A-Za-z0-9_]*)\s*->\s*([A-Za-z_][A-Za-z0-9_]*)\Z"
)


def load_comm_fn(text: str) -> CommFn:
    """Parse a gamma table, one ``a b -> c`` rule per line.

    ``#`` starts a comment and blank lines are ignored.  Repeating a rule is
    fine; mapping the same pair to two different results is an error.
    """
    seen: dict[frozenset[Action], tuple[Action, int]] = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _RULE_RE.match(line)
        if m is None:
            raise CommFnError(f"line {lineno}: expected 'a b -> c', got {line!r}")
        try:
            a, b, result = Action(m.group(1)), Action(m.group(2)), Action(m.group(3))
        except ValueError as exc:
            raise CommFnError(f"line {lineno}: {exc}") from exc
        key = frozenset((a, b))
        if key in seen and seen[key][0] != result:
            raise CommFnError(
                f"line {lineno}: rule for {{{a}, {b}}} conflicts with line {seen[key][1]}"
            )
        seen[key] = (result, lineno)
        rules.append((a, b, result))
    return CommFn(rules)


def dump_comm_fn(g: CommFn) -> str:
    """Render a gamma table in the file format accepted by load_comm_fn."""
    return "".join(f"{a} {b} -> {c}\n" for a, b, c in g.pairs())
