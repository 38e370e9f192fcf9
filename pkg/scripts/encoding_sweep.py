#!/usr/bin/env python3
"""Encode random finite automata and verify the isomorphism theorem.

Generates connected automata with random termination flags, encodes each as an
encapsulated parallel composition with a handshaking communication function,
re-derives the automaton, and checks isomorphism.  Reports sizes of the
generated expressions and control alphabets.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass

from starpar import (
    Action,
    Automaton,
    Transition,
    derive_automaton,
    encode_fa,
    isomorphic,
    render_expression,
    validate_comm_fn,
)


@dataclass
class EncodingSweepConfig:
    count: int
    max_states: int
    n_actions: int
    seed: int


def random_connected_fa(rng: random.Random, max_states: int, n_actions: int) -> Automaton:
    n = rng.randint(1, max_states)
    actions = [Action(f"a{k}") for k in range(rng.randint(1, n_actions))]
    transitions = [
        Transition(rng.randrange(target), rng.choice(actions), target) for target in range(1, n)
    ]
    for _ in range(rng.randint(0, 2 * n)):
        transitions.append(Transition(rng.randrange(n), rng.choice(actions), rng.randrange(n)))
    terminating = frozenset(s for s in range(n) if rng.random() < 0.4)
    return Automaton(
        labels=(None,) * n, initial=0, transitions=tuple(transitions), terminating=terminating
    )


def run_sweep(config: EncodingSweepConfig) -> int:
    rng = random.Random(config.seed)
    failures = 0
    expression_sizes = []
    control_sizes = []
    for i in range(config.count):
        fa = random_connected_fa(rng, config.max_states, config.n_actions)
        enc = encode_fa(fa)
        expression_sizes.append(len(render_expression(enc.expression)))
        control_sizes.append(len(enc.control.all_actions))
        report = validate_comm_fn(enc.gamma)
        derived = derive_automaton(enc.expression, enc.gamma)
        ok = (
            report.handshaking
            and report.associative
            and derived.n_states == fa.n_states
            and isomorphic(fa, derived).isomorphic
        )
        if not ok:
            failures += 1
            print(f"FAILURE on instance {i}: {fa.n_states} states")

    print(f"instances         {config.count} (<= {config.max_states} states, seed {config.seed})")
    print(f"expression size   min {min(expression_sizes)}  max {max(expression_sizes)} chars")
    print(f"control actions   min {min(control_sizes)}  max {max(control_sizes)}")
    print(f"verified          {config.count - failures} / {config.count}")
    return 1 if failures else 0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--max-states", type=int, default=8)
    parser.add_argument("--actions", type=int, default=4, dest="n_actions")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    config = EncodingSweepConfig(
        count=args.count, max_states=args.max_states, n_actions=args.n_actions, seed=args.seed
    )
    sys.exit(run_sweep(config))


if __name__ == "__main__":
    main()
