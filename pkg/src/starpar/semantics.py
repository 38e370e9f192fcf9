"""Operational semantics: termination predicate, single-step relation, automaton derivation.

States of a derived automaton are literal expressions; no simplification such
as ``1.p -> p`` is applied, so two states are identical exactly when their
ASTs are structurally equal.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .syntax import (
    EMPTY,
    EMPTY_COMM,
    Act,
    Action,
    Alt,
    CommFn,
    Deadlock,
    Empty,
    Encap,
    Expression,
    Par,
    Seq,
    Star,
    parse_expression,
    render_expression,
)

DEFAULT_MAX_STATES = 100_000


class StateLimitExceeded(RuntimeError):
    """Raised when a derivation reaches more distinct states than allowed."""

    def __init__(self, limit: int):
        super().__init__(f"state limit of {limit} exceeded")
        self.limit = limit


class AutomatonFormatError(ValueError):
    """Malformed automaton JSON."""


def terminates(e: Expression) -> bool:
    """Decide the termination predicate on expressions."""
    match e:
        case Empty() | Star():
            return True
        case Deadlock() | Act():
            return False
        case Alt(left, right):
            return terminates(left) or terminates(right)
        case Seq(left, right) | Par(left, right):
            return terminates(left) and terminates(right)
        case Encap(_, body):
            return terminates(body)
    raise TypeError(f"not an expression: {e!r}")


def step(e: Expression, comm: CommFn = EMPTY_COMM) -> frozenset[tuple[Action, Expression]]:
    """All derivable single steps of ``e`` as (action, successor) pairs.

    A parallel composition interleaves its components and, when ``comm`` is
    defined on a pair of simultaneously enabled actions, also offers the
    communication step labelled with the result.  Passing the empty
    communication function gives the pure interleaving semantics.
    """
    match e:
        case Deadlock() | Empty():
            return frozenset()
        case Act(action):
            return frozenset({(action, EMPTY)})
        case Alt(left, right):
            return step(left, comm) | step(right, comm)
        case Seq(left, right):
            moves = {(a, Seq(left2, right)) for a, left2 in step(left, comm)}
            if terminates(left):
                moves |= step(right, comm)
            return frozenset(moves)
        case Star(body):
            return frozenset({(a, Seq(body2, e)) for a, body2 in step(body, comm)})
        case Par(left, right):
            lsteps = step(left, comm)
            rsteps = step(right, comm)
            moves = {(a, Par(left2, right)) for a, left2 in lsteps}
            moves |= {(a, Par(left, right2)) for a, right2 in rsteps}
            for a, left2 in lsteps:
                for b, right2 in rsteps:
                    c = comm.lookup(a, b)
                    if c is not None:
                        moves.add((c, Par(left2, right2)))
            return frozenset(moves)
        case Encap(blocked, body):
            return frozenset(
                {(a, Encap(blocked, body2)) for a, body2 in step(body, comm) if a not in blocked}
            )
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True, order=True)
class Transition:
    source: int
    action: Action
    target: int


@dataclass(frozen=True)
class Automaton:
    """A finite labelled transition system with a termination predicate.

    States are the indices ``0 .. n_states - 1``, each with an optional text
    label.  Transitions are stored deduplicated and sorted by
    (source, action name, target).
    """

    labels: tuple[str | None, ...]
    initial: int
    transitions: tuple[Transition, ...]
    terminating: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions))))
        object.__setattr__(self, "terminating", frozenset(self.terminating))
        n = len(self.labels)
        if n == 0:
            raise ValueError("an automaton needs at least one state")
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} out of range")
        for t in self.transitions:
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise ValueError(f"transition {t} out of range")
        for s in self.terminating:
            if not 0 <= s < n:
                raise ValueError(f"terminating state {s} out of range")

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def actions(self) -> tuple[Action, ...]:
        """Distinct transition labels, sorted by name."""
        return tuple(sorted({t.action for t in self.transitions}))

    def out(self) -> list[list[tuple[Action, int]]]:
        """Adjacency by source state, in stored transition order."""
        adjacency: list[list[tuple[Action, int]]] = [[] for _ in range(self.n_states)]
        for t in self.transitions:
            adjacency[t.source].append((t.action, t.target))
        return adjacency

    def reachable(self) -> frozenset[int]:
        """States reachable from the initial state."""
        adjacency = self.out()
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            state = queue.popleft()
            for _, target in adjacency[state]:
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
        return frozenset(seen)


def derive_automaton(
    e: Expression,
    comm: CommFn = EMPTY_COMM,
    max_states: int = DEFAULT_MAX_STATES,
) -> Automaton:
    """Breadth-first closure of the step relation from ``e``.

    States are numbered in discovery order, with each state's successors
    explored sorted by (action name, rendered successor); labels carry the
    rendered expressions.  Raises StateLimitExceeded once more than
    ``max_states`` distinct expressions have been reached.
    """
    if max_states < 1:
        raise ValueError("max_states must be positive")
    rendered: dict[Expression, str] = {e: render_expression(e)}
    index: dict[Expression, int] = {e: 0}
    labels: list[str] = [rendered[e]]
    queue: deque[Expression] = deque([e])
    transitions: list[Transition] = []
    terminating: set[int] = set()
    while queue:
        current = queue.popleft()
        source = index[current]
        if terminates(current):
            terminating.add(source)
        successors = []
        for action, target in step(current, comm):
            if target not in rendered:
                rendered[target] = render_expression(target)
            successors.append((action.name, rendered[target], action, target))
        successors.sort(key=lambda item: (item[0], item[1]))
        for _, _, action, target in successors:
            if target not in index:
                if len(index) >= max_states:
                    raise StateLimitExceeded(max_states)
                index[target] = len(index)
                labels.append(rendered[target])
                queue.append(target)
            transitions.append(Transition(source, action, index[target]))
    return Automaton(
        labels=tuple(labels),
        initial=0,
        transitions=tuple(transitions),
        terminating=frozenset(terminating),
    )


def state_expressions(a: Automaton) -> tuple[Expression, ...]:
    """Recover the state expressions of a derived automaton from its labels."""
    if any(label is None for label in a.labels):
        raise ValueError("automaton has unlabelled states")
    return tuple(parse_expression(label) for label in a.labels)


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------


def automaton_to_dict(a: Automaton) -> dict:
    states = []
    for i in range(a.n_states):
        entry: dict = {"id": i}
        if a.labels[i] is not None:
            entry["label"] = a.labels[i]
        entry["terminating"] = i in a.terminating
        states.append(entry)
    return {
        "states": states,
        "initial": a.initial,
        "transitions": [
            {"from": t.source, "action": t.action.name, "to": t.target}
            for t in a.transitions
        ],
    }


def automaton_to_json(a: Automaton) -> str:
    """Byte-stable JSON rendering of an automaton."""
    return json.dumps(automaton_to_dict(a), indent=2) + "\n"


def automaton_from_dict(obj: object) -> Automaton:
    if not isinstance(obj, dict):
        raise AutomatonFormatError("top level must be an object")
    try:
        raw_states = obj["states"]
        initial = obj["initial"]
        raw_transitions = obj["transitions"]
    except KeyError as exc:
        raise AutomatonFormatError(f"missing key {exc.args[0]!r}") from exc
    if not isinstance(raw_states, list) or not raw_states:
        raise AutomatonFormatError("'states' must be a non-empty array")
    labels: list[str | None] = [None] * len(raw_states)
    terminating = set()
    seen_ids = set()
    for entry in raw_states:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), int):
            raise AutomatonFormatError("each state needs an integer 'id'")
        i = entry["id"]
        if not 0 <= i < len(raw_states) or i in seen_ids:
            raise AutomatonFormatError(f"state ids must be 0..{len(raw_states) - 1} without repeats")
        seen_ids.add(i)
        label = entry.get("label")
        if label is not None and not isinstance(label, str):
            raise AutomatonFormatError(f"state {i}: 'label' must be a string")
        labels[i] = label
        if entry.get("terminating", False):
            terminating.add(i)
    if not isinstance(initial, int):
        raise AutomatonFormatError("'initial' must be an integer state id")
    if not isinstance(raw_transitions, list):
        raise AutomatonFormatError("'transitions' must be an array")
    transitions = []
    for entry in raw_transitions:
        if not isinstance(entry, dict):
            raise AutomatonFormatError("each transition must be an object")
        try:
            source, name, target = entry["from"], entry["action"], entry["to"]
        except KeyError as exc:
            raise AutomatonFormatError(f"transition missing key {exc.args[0]!r}") from exc
        if not isinstance(source, int) or not isinstance(target, int) or not isinstance(name, str):
            raise AutomatonFormatError(f"malformed transition {entry!r}")
        try:
            action = Action(name)
        except ValueError as exc:
            raise AutomatonFormatError(str(exc)) from exc
        transitions.append(Transition(source, action, target))
    try:
        return Automaton(
            labels=tuple(labels),
            initial=initial,
            transitions=tuple(transitions),
            terminating=frozenset(terminating),
        )
    except ValueError as exc:
        raise AutomatonFormatError(str(exc)) from exc


def automaton_from_json(text: str) -> Automaton:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AutomatonFormatError(f"invalid JSON: {exc}") from exc
    return automaton_from_dict(obj)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def automaton_to_dot(a: Automaton) -> str:
    """GraphViz rendering: terminating states double-circled, initial marked
    by an arrow from an unlabelled point node."""
    lines = ["digraph automaton {", "  rankdir=LR;", '  __initial__ [shape=point, label=""];']
    for i in range(a.n_states):
        shape = "doublecircle" if i in a.terminating else "circle"
        label = a.labels[i] if a.labels[i] is not None else str(i)
        lines.append(f'  s{i} [shape={shape}, label="{_dot_escape(label)}"];')
    lines.append(f"  __initial__ -> s{a.initial};")
    for t in a.transitions:
        lines.append(f'  s{t.source} -> s{t.target} [label="{_dot_escape(t.action.name)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
