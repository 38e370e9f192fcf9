"""Encoding of an arbitrary finite automaton into an expression with
communication and encapsulation, plus verification that the derived automaton
is isomorphic to the input.

The encoding runs one parallel component per state.  Exactly one component is
in control at any time; a transition of the input automaton is simulated by a
communication between the controlling component's leave action and the target
component's enter action, with the original action as the result.  Self-loops
are executed inside the controlling component, which must not release control.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .equivalence import IsoResult, isomorphic
from .semantics import (
    DEFAULT_MAX_STATES,
    Automaton,
    derive_automaton,
    step,
)
from .syntax import (
    DEADLOCK,
    EMPTY,
    EMPTY_COMM,
    Act,
    Action,
    Alt,
    CommFn,
    Encap,
    Expression,
    Par,
    Seq,
    Star,
)


class InvalidAutomaton(ValueError):
    """Input automaton not suitable for encoding."""


@dataclass(frozen=True, eq=False)
class ControlAlphabet:
    """Fresh control actions: one enter per state, one leave per
    (action index, state index) pair."""

    enter: tuple[Action, ...]
    leave: dict[tuple[int, int], Action]
    all_actions: frozenset[Action]


@dataclass(frozen=True, eq=False)
class EncodingResult:
    """Encoded expression with its communication function.

    ``components`` lists the per-state components in state order, followed by
    the primed variant of the initial state's component.  ``expression`` is the
    encapsulated left-associated parallel chain with the initial component
    primed.
    """

    expression: Expression
    gamma: CommFn
    components: tuple[Expression, ...]
    action_index: dict[Action, int]
    control: ControlAlphabet


def _fresh_name(base: str, forbidden: set[str]) -> str:
    name = base
    while name in forbidden:
        name += "_"
    forbidden.add(name)
    return name


def _sum(terms: list[Expression]) -> Expression:
    """Left-associated alternative; the empty sum is deadlock."""
    if not terms:
        return DEADLOCK
    return reduce(Alt, terms)


def encode_fa(fa: Automaton) -> EncodingResult:
    """Build the expression and communication function simulating ``fa``.

    Every state must be reachable from the initial state; the derived
    automaton of the result is isomorphic to ``fa`` (see verify_encoding).
    """
    n = fa.n_states
    if n == 0:  # pragma: no cover - Automaton guarantees n >= 1
        raise InvalidAutomaton("cannot encode an automaton with no states")
    unreachable = sorted(set(range(n)) - fa.reachable())
    if unreachable:
        raise InvalidAutomaton(f"unreachable states {unreachable}; encode reachable automata only")

    alphabet = fa.actions()
    action_index = {action: k for k, action in enumerate(alphabet)}
    m = len(alphabet)

    forbidden = {action.name for action in alphabet}
    enter = tuple(Action(_fresh_name(f"enter_{i}", forbidden)) for i in range(n))
    leave = {
        (k, j): Action(_fresh_name(f"leave_{k}_{j}", forbidden))
        for k in range(m)
        for j in range(n)
    }
    control = ControlAlphabet(
        enter=enter,
        leave=leave,
        all_actions=frozenset(enter) | frozenset(leave.values()),
    )

    # K[i][j]: indices of actions labelling a transition from i to j.
    outgoing: dict[tuple[int, int], set[int]] = {}
    for t in fa.transitions:
        outgoing.setdefault((t.source, t.target), set()).add(action_index[t.action])

    components = []
    for i in range(n):
        self_sum = _sum([Act(alphabet[k]) for k in sorted(outgoing.get((i, i), ()))])
        leave_terms: list[Expression] = [
            Act(leave[k, j])
            for k, j in sorted(
                (k, j) for (source, j), ks in outgoing.items() if source == i and j != i for k in ks
            )
        ]
        leave_sum = _sum(leave_terms)
        if i in fa.terminating:
            leave_sum = Alt(leave_sum, EMPTY)
        # Body left-associated: the a_k loop state then literally repeats
        # itself, so a self-loop of the input stays a single derived state.
        body = Seq(Seq(Act(enter[i]), Star(self_sum)), leave_sum)
        components.append(Seq(EMPTY, Star(body)))

    gamma = CommFn(
        (enter[i], leave[k, i], alphabet[k]) for i in range(n) for k in range(m)
    )

    # The primed component is the unique operational successor of the initial
    # state's component, which guarantees the cycle returns to it exactly.
    initial_steps = step(components[fa.initial], EMPTY_COMM)
    if len(initial_steps) != 1:  # pragma: no cover - single enter action by construction
        raise RuntimeError("component must have a unique initial step")
    ((enter_action, primed),) = initial_steps
    if enter_action != enter[fa.initial]:  # pragma: no cover
        raise RuntimeError("component's initial step must be its enter action")

    chain = reduce(Par, [primed if i == fa.initial else components[i] for i in range(n)])
    expression = Encap(control.all_actions, chain)
    return EncodingResult(
        expression=expression,
        gamma=gamma,
        components=tuple(components) + (primed,),
        action_index=action_index,
        control=control,
    )


def verify_encoding(fa: Automaton, max_states: int = DEFAULT_MAX_STATES) -> IsoResult:
    """Derive the automaton of the encoded expression and check it is
    isomorphic to the input; the mapping sends input states to derived ones."""
    enc = encode_fa(fa)
    derived = derive_automaton(enc.expression, enc.gamma, max_states)
    return isomorphic(fa, derived)


def encoding_manifest(fa: Automaton, enc: EncodingResult) -> dict:
    """JSON-ready description of the generated control names."""
    actions = sorted(enc.action_index, key=lambda a: enc.action_index[a])
    return {
        "states": fa.n_states,
        "actions": [a.name for a in actions],
        "enter": [a.name for a in enc.control.enter],
        "leave": [
            {"action": k, "state": j, "name": enc.control.leave[k, j].name}
            for (k, j) in sorted(enc.control.leave)
        ],
    }
