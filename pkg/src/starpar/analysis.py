"""Graph and syntax analyses: SCCs, normedness, exit structure, the OC measure,
and the necessary-condition checks for expressibility with and without
interleaving."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .semantics import Automaton
from .syntax import (
    DEADLOCK,
    EMPTY,
    Act,
    Action,
    Alt,
    Deadlock,
    Empty,
    Encap,
    Expression,
    Par,
    Seq,
    Star,
    Theory,
    subterms,
)


class UnsupportedExpression(ValueError):
    """Raised when an operation is applied outside its expression class."""


@dataclass(frozen=True)
class SccDecomposition:
    """Partition of an automaton's states into strongly connected components.

    Component ids are assigned in reverse topological order of the
    condensation: a component only reaches components with ids no larger than
    its own.  A component is trivial when it is a single state without a
    self-loop.
    """

    component_of: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    trivial: tuple[bool, ...]

    @property
    def count(self) -> int:
        return len(self.members)

    def non_trivial(self) -> tuple[int, ...]:
        return tuple(cid for cid in range(self.count) if not self.trivial[cid])


def scc_decompose(a: Automaton) -> SccDecomposition:
    """Tarjan's single-pass algorithm, iterative, with deterministic ids."""
    n = a.n_states
    adjacency: list[list[int]] = [[] for _ in range(n)]
    self_loop = [False] * n
    for t in a.transitions:
        adjacency[t.source].append(t.target)
        if t.source == t.target:
            self_loop[t.source] = True

    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while i < len(adjacency[v]):
                w = adjacency[v][i]
                i += 1
                if index[w] == -1:
                    work.append((v, i))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    component_of = [0] * n
    trivial = []
    for cid, members in enumerate(components):
        for s in members:
            component_of[s] = cid
        trivial.append(len(members) == 1 and not self_loop[members[0]])
    return SccDecomposition(
        component_of=tuple(component_of),
        members=tuple(tuple(m) for m in components),
        trivial=tuple(trivial),
    )


def normed_states(a: Automaton) -> frozenset[int]:
    """States from which some terminating state is reachable."""
    predecessors: list[list[int]] = [[] for _ in range(a.n_states)]
    for t in a.transitions:
        predecessors[t.target].append(t.source)
    seen = set(a.terminating)
    queue = deque(seen)
    while queue:
        state = queue.popleft()
        for p in predecessors[state]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return frozenset(seen)


@dataclass(frozen=True, order=True)
class ExitTransition:
    """A transition leaving the SCC of its source state."""

    action: Action
    target: int


def exit_transitions(a: Automaton, d: SccDecomposition, s: int) -> frozenset[ExitTransition]:
    """All (action, target) pairs from ``s`` whose target lies outside SCC(s)."""
    cid = d.component_of[s]
    return frozenset(
        ExitTransition(t.action, t.target)
        for t in a.transitions
        if t.source == s and d.component_of[t.target] != cid
    )


def normed_exit_transitions(
    a: Automaton,
    d: SccDecomposition,
    s: int,
    normed: frozenset[int] | None = None,
) -> frozenset[ExitTransition]:
    """Exit transitions of ``s`` restricted to normed targets."""
    if normed is None:
        normed = normed_states(a)
    return frozenset(e for e in exit_transitions(a, d, s) if e.target in normed)


def alive_exit_states(
    a: Automaton,
    d: SccDecomposition,
    scc: int,
    normed: frozenset[int] | None = None,
) -> frozenset[int]:
    """Members of the SCC that terminate or have a normed exit transition."""
    if normed is None:
        normed = normed_states(a)
    return frozenset(
        s
        for s in d.members[scc]
        if s in a.terminating or normed_exit_transitions(a, d, s, normed)
    )


def exit_equivalent(e1: ExitTransition, e2: ExitTransition, d: SccDecomposition) -> bool:
    """Exit transitions are equivalent when their actions are equal and their
    targets share a strongly connected component."""
    return e1.action == e2.action and d.component_of[e1.target] == d.component_of[e2.target]


def oc_measure(e: Expression) -> int:
    """Structural measure that never increases along transitions.

    Constants 0 and 1 measure 0, an action measures 1, a star measures 1, a
    parallel composition measures 0, an alternative measures one more than its
    larger side, and a sequential composition measures 0 when its right side
    is a star and one more than the right side's measure otherwise.  Defined
    only on encapsulation-free expressions.
    """
    for node in subterms(e):
        if isinstance(node, Encap):
            raise UnsupportedExpression("measure is undefined on encapsulation")

    def oc(node: Expression) -> int:
        if isinstance(node, (Deadlock, Empty)):
            return 0
        if isinstance(node, Act):
            return 1
        if isinstance(node, Seq):
            return 0 if isinstance(node.right, Star) else oc(node.right) + 1
        if isinstance(node, Alt):
            return max(oc(node.left), oc(node.right)) + 1
        if isinstance(node, Star):
            return 1
        if isinstance(node, Par):
            return 0
        raise TypeError(f"not an expression: {node!r}")

    return oc(e)


# ---------------------------------------------------------------------------
# Necessary-condition checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    scc: int
    states: tuple[int, ...]
    details: str


@dataclass(frozen=True)
class PropertyReport:
    """Verdict of a structural check, with re-checkable witnesses on failure."""

    property: str
    verdict: str
    witnesses: tuple[Witness, ...]

    @property
    def holds(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "witnesses": [
                {"scc": w.scc, "states": list(w.states), "details": w.details}
                for w in self.witnesses
            ],
        }


def _state_name(a: Automaton, s: int) -> str:
    label = a.labels[s]
    return f"{s} ({label})" if label is not None else str(s)


def _render_exits(a: Automaton, exits: frozenset[ExitTransition]) -> str:
    items = sorted((e.action.name, e.target) for e in exits)
    return "{" + ", ".join(f"({name}, {_state_name(a, target)})" for name, target in items) + "}"


def check_bpa_property(a: Automaton) -> PropertyReport:
    """Necessary condition for expressibility without interleaving: within each
    non-trivial SCC, all alive exit states have identical sets of normed exit
    transitions, and agree on the termination flag."""
    d = scc_decompose(a)
    normed = normed_states(a)
    witnesses = []
    for cid in d.non_trivial():
        alive = sorted(alive_exit_states(a, d, cid, normed))
        if len(alive) < 2:
            continue
        extn = {s: normed_exit_transitions(a, d, s, normed) for s in alive}
        if len(set(extn.values())) > 1:
            details = "normed exit sets differ: " + "; ".join(
                f"Extn({_state_name(a, s)}) = {_render_exits(a, extn[s])}" for s in alive
            )
            witnesses.append(Witness(cid, tuple(alive), details))
        flags = {s: s in a.terminating for s in alive}
        if len(set(flags.values())) > 1:
            details = "termination flags differ among alive exit states: " + "; ".join(
                f"{_state_name(a, s)} {'terminates' if flag else 'does not terminate'}"
                for s, flag in flags.items()
            )
            witnesses.append(Witness(cid, tuple(alive), details))
    verdict = "pass" if not witnesses else "fail"
    return PropertyReport("bpa", verdict, tuple(witnesses))


def check_pa_property(a: Automaton) -> PropertyReport:
    """Necessary condition for expressibility with pure interleaving: every SCC
    with an alive exit state has a maximal one, covering all alive exit states'
    normed exits up to action-plus-target-SCC equivalence."""
    d = scc_decompose(a)
    normed = normed_states(a)
    witnesses = []
    for cid in range(d.count):
        alive = sorted(alive_exit_states(a, d, cid, normed))
        if not alive:
            continue
        classes = {
            s: frozenset(
                (e.action, d.component_of[e.target])
                for e in normed_exit_transitions(a, d, s, normed)
            )
            for s in alive
        }
        required: set[tuple[Action, int]] = set()
        for c in classes.values():
            required |= c
        if not any(classes[s] >= required for s in alive):
            needed = sorted((action.name, target_scc) for action, target_scc in required)
            details = (
                "no maximal alive exit state; required exit classes (action, target scc) = "
                + str(needed)
                + "; "
                + "; ".join(
                    f"{_state_name(a, s)} covers "
                    + str(sorted((action.name, target_scc) for action, target_scc in classes[s]))
                    for s in alive
                )
            )
            witnesses.append(Witness(cid, tuple(alive), details))
    verdict = "pass" if not witnesses else "fail"
    return PropertyReport("pa", verdict, tuple(witnesses))


# ---------------------------------------------------------------------------
# Random expression generation
# ---------------------------------------------------------------------------

_LEAVES = (
    DEADLOCK,
    EMPTY,
    Act(Action("a")),
    Act(Action("b")),
    Act(Action("c")),
    Act(Action("d")),
)
_BPA_OPS = ("seq", "alt", "star")
_PA_OPS = ("seq", "alt", "star", "par")


def generate_random_expression(theory: Theory, max_depth: int, seed: int) -> Expression:
    """Deterministic pseudo-random expression over the alphabet {a, b, c, d}.

    Leaves and operators are drawn 50/50 at every level below ``max_depth``;
    the small alphabet maximises state collisions, which is what the SCC
    analyses stress.  Only the encapsulation-free theories are supported.
    """
    if theory not in (Theory.BPA, Theory.PA):
        raise ValueError(f"unsupported theory for generation: {theory}")
    ops = _BPA_OPS if theory is Theory.BPA else _PA_OPS
    rng = random.Random(seed)

    def gen(depth: int) -> Expression:
        if depth <= 0 or rng.random() < 0.5:
            return rng.choice(_LEAVES)
        op = rng.choice(ops)
        if op == "star":
            return Star(gen(depth - 1))
        left = gen(depth - 1)
        right = gen(depth - 1)
        if op == "seq":
            return Seq(left, right)
        if op == "alt":
            return Alt(left, right)
        return Par(left, right)

    return gen(max_depth)
