#!/usr/bin/env python3
"""Sweep random expressions through the expressibility checks.

Derives the automaton of each generated expression and reports how the
necessary-condition checks behave across the sample: verdict counts, automaton
sizes, and component statistics.  Both checks are necessary conditions, so the
matching check must pass on every instance; the cross check (the sequential
condition on interleaved expressions) is expected to fail now and then, and
the script reports how often.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from starpar import (
    EMPTY_COMM,
    Theory,
    check_bpa_property,
    check_pa_property,
    derive_automaton,
    generate_random_expression,
    render_expression,
    scc_decompose,
)


@dataclass
class SweepConfig:
    theory: Theory
    count: int
    max_depth: int
    seed: int
    max_states: int


def run_sweep(config: SweepConfig) -> int:
    matching_failures = []
    cross_failures = 0
    states = []
    non_trivial = 0
    for i in range(config.count):
        e = generate_random_expression(config.theory, config.max_depth, config.seed + i)
        auto = derive_automaton(e, EMPTY_COMM, config.max_states)
        states.append(auto.n_states)
        d = scc_decompose(auto)
        non_trivial += len(d.non_trivial())
        matching = (
            check_bpa_property(auto) if config.theory is Theory.BPA else check_pa_property(auto)
        )
        if not matching.holds:
            matching_failures.append(e)
        if config.theory is Theory.PA and not check_bpa_property(auto).holds:
            cross_failures += 1

    print(f"theory            {config.theory.value}")
    print(f"instances         {config.count} (depth <= {config.max_depth}, seed {config.seed})")
    print(f"states            min {min(states)}  max {max(states)}  mean {sum(states)/len(states):.1f}")
    print(f"non-trivial sccs  {non_trivial}")
    print(f"matching check    {config.count - len(matching_failures)} pass / {len(matching_failures)} fail")
    if config.theory is Theory.PA:
        print(f"sequential check  fails on {cross_failures} interleaved instances")
    for e in matching_failures[:5]:
        print("  UNEXPECTED FAILURE:", render_expression(e))
    return 1 if matching_failures else 0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--theory", choices=("BPA", "PA"), default="BPA")
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--max-depth", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-states", type=int, default=200_000)
    args = parser.parse_args()
    config = SweepConfig(
        theory=Theory[args.theory],
        count=args.count,
        max_depth=args.max_depth,
        seed=args.seed,
        max_states=args.max_states,
    )
    sys.exit(run_sweep(config))


if __name__ == "__main__":
    main()
