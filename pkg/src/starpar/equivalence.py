"""Strong bisimilarity via partition refinement, bisimulation checking,
quotient minimisation, and automaton isomorphism."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .semantics import Automaton, Transition
from .syntax import Action


def _coarsest_partition(
    n: int,
    out: list[list[tuple[Action, int]]],
    terminating: frozenset[int],
) -> list[int]:
    """Relational coarsest partition, seeded by the termination flag.

    Simple splitter style: states are repeatedly regrouped by their one-step
    signature (current block plus the set of (action, successor block) pairs)
    until the number of blocks stops growing.  Block ids are assigned by first
    occurrence in state order, so the result is deterministic.
    """
    block = [1 if i in terminating else 0 for i in range(n)]
    count = len(set(block))
    while True:
        remap: dict[tuple[int, frozenset[tuple[Action, int]]], int] = {}
        new = []
        for i in range(n):
            signature = (block[i], frozenset((a, block[t]) for a, t in out[i]))
            new.append(remap.setdefault(signature, len(remap)))
        if len(remap) == count:
            return new
        block = new
        count = len(remap)


@dataclass(frozen=True)
class BisimResult:
    """Outcome of the bisimilarity check on two automata.

    ``partition`` maps states of the disjoint union (first automaton's states,
    then the second's) to blocks of the coarsest partition.  When the initial
    states share a block, ``witness_relation`` holds every cross-automaton
    pair of states in a common block; that relation is itself a bisimulation
    relating the initial states.
    """

    bisimilar: bool
    partition: tuple[int, ...]
    witness_relation: frozenset[tuple[int, int]] | None


def _union_out(a: Automaton, b: Automaton) -> list[list[tuple[Action, int]]]:
    out = a.out()
    shifted: list[list[tuple[Action, int]]] = [
        [(action, target + a.n_states) for action, target in row] for row in b.out()
    ]
    return out + shifted


def bisimilar(a: Automaton, b: Automaton) -> BisimResult:
    """Decide strong bisimilarity of the two initial states."""
    out = _union_out(a, b)
    terminating = a.terminating | frozenset(s + a.n_states for s in b.terminating)
    block = _coarsest_partition(a.n_states + b.n_states, out, terminating)
    related = block[a.initial] == block[a.n_states + b.initial]
    witness = None
    if related:
        witness = frozenset(
            (i, j)
            for i in range(a.n_states)
            for j in range(b.n_states)
            if block[i] == block[a.n_states + j]
        )
    return BisimResult(bisimilar=related, partition=tuple(block), witness_relation=witness)


def check_bisimulation(a: Automaton, b: Automaton, relation: Iterable[tuple[int, int]]) -> bool:
    """Verify that ``relation`` is a bisimulation relating the initial states.

    Checks the two transfer clauses and termination agreement for every pair,
    plus membership of the initial pair.
    """
    pairs = set(relation)
    for s1, s2 in pairs:
        if not (0 <= s1 < a.n_states and 0 <= s2 < b.n_states):
            raise ValueError(f"pair ({s1}, {s2}) references invalid states")
    if (a.initial, b.initial) not in pairs:
        return False
    a_out = a.out()
    b_out = b.out()
    for s1, s2 in pairs:
        if (s1 in a.terminating) != (s2 in b.terminating):
            return False
        for action, t1 in a_out[s1]:
            if not any(
                action == action2 and (t1, t2) in pairs for action2, t2 in b_out[s2]
            ):
                return False
        for action, t2 in b_out[s2]:
            if not any(
                action == action1 and (t1, t2) in pairs for action1, t1 in a_out[s1]
            ):
                return False
    return True


def minimize(a: Automaton) -> Automaton:
    """Quotient of the automaton by bisimilarity, restricted to the part
    reachable from the initial state.

    The result is bisimilar to the input and no two of its states are
    bisimilar to each other.  State numbering is breadth-first from the
    initial block for determinism.
    """
    block = _coarsest_partition(a.n_states, a.out(), a.terminating)
    block_transitions: dict[int, list[tuple[Action, int]]] = {}
    for t in a.transitions:
        block_transitions.setdefault(block[t.source], []).append((t.action, block[t.target]))
    initial_block = block[a.initial]
    order: dict[int, int] = {initial_block: 0}
    queue = deque([initial_block])
    while queue:
        current = queue.popleft()
        for action, target in sorted(
            set(block_transitions.get(current, ())), key=lambda x: (x[0].name, x[1])
        ):
            if target not in order:
                order[target] = len(order)
                queue.append(target)

    representative: dict[int, int] = {}
    for s in range(a.n_states):
        bid = block[s]
        if bid in order and (bid not in representative or s < representative[bid]):
            representative[bid] = s

    labels: list[str | None] = [None] * len(order)
    terminating = set()
    for bid, new_id in order.items():
        member = representative[bid]
        labels[new_id] = a.labels[member]
        if member in a.terminating:
            terminating.add(new_id)
    transitions = {
        Transition(order[bid], action, order[target])
        for bid, moves in block_transitions.items()
        if bid in order
        for action, target in moves
        if target in order
    }
    return Automaton(
        labels=tuple(labels),
        initial=0,
        transitions=tuple(transitions),
        terminating=frozenset(terminating),
    )


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsoResult:
    """Outcome of the isomorphism check; ``mapping[i]`` is the image of the
    first automaton's state ``i`` when isomorphic."""

    isomorphic: bool
    mapping: tuple[int, ...] | None


def _colour_refinement(a: Automaton, b: Automaton) -> tuple[list[int], list[int]] | None:
    """Joint colour refinement on both state sets.

    Colours start from (is initial, terminates) and are refined by the
    multisets of labelled in- and out-edges into colour classes.  Returns the
    stable colouring, or None when the colour histograms differ (in which case
    the automata cannot be isomorphic).
    """
    na, nb = a.n_states, b.n_states

    def edges(m: Automaton) -> tuple[list[list[tuple[Action, int]]], list[list[tuple[Action, int]]]]:
        out: list[list[tuple[Action, int]]] = [[] for _ in range(m.n_states)]
        into: list[list[tuple[Action, int]]] = [[] for _ in range(m.n_states)]
        for t in m.transitions:
            out[t.source].append((t.action, t.target))
            into[t.target].append((t.action, t.source))
        return out, into

    a_out, a_in = edges(a)
    b_out, b_in = edges(b)
    colour_a = [(s == a.initial, s in a.terminating) for s in range(na)]
    colour_b = [(s == b.initial, s in b.terminating) for s in range(nb)]
    palette = {c: i for i, c in enumerate(sorted(set(colour_a) | set(colour_b)))}
    colours_a = [palette[c] for c in colour_a]
    colours_b = [palette[c] for c in colour_b]

    while True:
        def signature(colours, out, into, s):
            return (
                colours[s],
                tuple(sorted((action.name, colours[t]) for action, t in out[s])),
                tuple(sorted((action.name, colours[t]) for action, t in into[s])),
            )

        sigs_a = [signature(colours_a, a_out, a_in, s) for s in range(na)]
        sigs_b = [signature(colours_b, b_out, b_in, s) for s in range(nb)]
        palette = {c: i for i, c in enumerate(sorted(set(sigs_a) | set(sigs_b)))}
        new_a = [palette[s] for s in sigs_a]
        new_b = [palette[s] for s in sigs_b]
        if new_a == colours_a and new_b == colours_b:
            break
        colours_a, colours_b = new_a, new_b

    histogram_a: dict[int, int] = {}
    histogram_b: dict[int, int] = {}
    for c in colours_a:
        histogram_a[c] = histogram_a.get(c, 0) + 1
    for c in colours_b:
        histogram_b[c] = histogram_b.get(c, 0) + 1
    if histogram_a != histogram_b:
        return None
    return colours_a, colours_b


def _edge_labels(m: Automaton) -> dict[tuple[int, int], frozenset[Action]]:
    labels: dict[tuple[int, int], set[Action]] = {}
    for t in m.transitions:
        labels.setdefault((t.source, t.target), set()).add(t.action)
    return {k: frozenset(v) for k, v in labels.items()}


def isomorphic(a: Automaton, b: Automaton) -> IsoResult:
    """Exact isomorphism on finite automata.

    Backtracking search seeded by colour refinement; candidates are tried
    lowest index first, so the returned bijection is deterministic.  The
    mapping preserves the initial state, termination flags, and labelled
    transitions in both directions.
    """
    if (
        a.n_states != b.n_states
        or len(a.transitions) != len(b.transitions)
        or len(a.terminating) != len(b.terminating)
    ):
        return IsoResult(False, None)
    refined = _colour_refinement(a, b)
    if refined is None:
        return IsoResult(False, None)
    colours_a, colours_b = refined
    n = a.n_states
    a_edges = _edge_labels(a)
    b_edges = _edge_labels(b)
    candidates = [
        [t for t in range(n) if colours_b[t] == colours_a[s]] for s in range(n)
    ]
    mapping: list[int] = [-1] * n
    used = [False] * n

    def consistent(s: int, t: int) -> bool:
        for u in range(s + 1):
            v = mapping[u] if u < s else t
            if a_edges.get((u, s)) != b_edges.get((v, t)):
                return False
            if a_edges.get((s, u)) != b_edges.get((t, v)):
                return False
        return True

    def assign(s: int) -> bool:
        if s == n:
            return True
        for t in candidates[s]:
            if used[t]:
                continue
            if not consistent(s, t):
                continue
            mapping[s] = t
            used[t] = True
            if assign(s + 1):
                return True
            mapping[s] = -1
            used[t] = False
        return False

    if not assign(0):
        return IsoResult(False, None)
    if mapping[a.initial] != b.initial:  # pragma: no cover - enforced by colours
        return IsoResult(False, None)
    return IsoResult(True, tuple(mapping))
