import random

import pytest

from starpar import (
    DEADLOCK,
    EMPTY,
    EMPTY_COMM,
    Action,
    Alt,
    Automaton,
    Encap,
    Par,
    Seq,
    Star,
    StateLimitExceeded,
    Theory,
    Transition,
    act,
    automaton_from_json,
    automaton_to_dot,
    automaton_to_json,
    derive_automaton,
    generate_random_expression,
    parse_expression,
    state_expressions,
    step,
    terminates,
)
from tests.samples import TWO_EXIT_LOOP_EXPR, INTERLEAVED_LOOP_EXPR, COMMUNICATING_LOOP_EXPR, communicating_gamma
from tests.oracles import interleaving_step, rule_derivable

a, b, c = act("a"), act("b"), act("c")


class TestTerminates:
    def test_constants(self):
        assert terminates(EMPTY)
        assert not terminates(DEADLOCK)
        assert not terminates(a)

    def test_star_always_terminates(self):
        assert terminates(Star(Seq(a, b)))
        assert terminates(Star(DEADLOCK))

    def test_compound(self):
        assert not terminates(Seq(a, b))
        assert terminates(Seq(EMPTY, Star(a)))
        assert terminates(Alt(a, EMPTY))
        assert not terminates(Alt(a, b))
        assert terminates(Par(EMPTY, Star(a)))
        assert not terminates(Par(EMPTY, a))
        assert terminates(Encap(frozenset({Action("a")}), EMPTY))
        assert not terminates(Encap(frozenset(), a))


class TestStep:
    def test_action_steps_to_empty(self):
        assert step(a) == frozenset({(Action("a"), EMPTY)})

    def test_loop_root_has_one_a_and_one_b_step(self):
        e = parse_expression(TWO_EXIT_LOOP_EXPR)
        moves = step(e)
        by_action = {}
        for action, target in moves:
            by_action.setdefault(action.name, set()).add(target)
        assert set(by_action) == {"a", "b"}
        assert by_action["b"] == {EMPTY}
        assert len(by_action["a"]) == 1

    def test_communication_step(self):
        e = parse_expression(COMMUNICATING_LOOP_EXPR)
        gamma = communicating_gamma()
        (p1,) = [t for action, t in step(e, gamma) if action.name == "a"]
        e_steps = {t for action, t in step(p1, gamma) if action.name == "e"}
        (p2,) = [t for action, t in step(e, gamma) if action.name == "c"]
        assert e_steps == {p2}

    def test_encap_blocks(self):
        assert step(Encap(frozenset({Action("c")}), c)) == frozenset()
        blocked = Encap(frozenset({Action("c")}), Alt(a, c))
        assert {action.name for action, _ in step(blocked)} == {"a"}

    def test_empty_gamma_never_fires_communication(self):
        for seed in range(200):
            e = generate_random_expression(Theory.PA, 5, seed)
            assert step(e, EMPTY_COMM) == interleaving_step(e)

    def test_agrees_with_rule_by_rule_checker(self):
        gamma = communicating_gamma()
        rng = random.Random(7)
        for seed in range(150):
            e = generate_random_expression(Theory.PA, 4, 400 + seed)
            moves = step(e, gamma)
            for action, target in moves:
                assert rule_derivable(e, action, target, gamma)
            # and some negative probes
            candidates = {t for _, t in moves} | {e, EMPTY}
            for action_name in "abcde":
                action = Action(action_name)
                target = rng.choice(sorted(candidates, key=str))
                if (action, target) not in moves:
                    assert not rule_derivable(e, action, target, gamma)


class TestDerive:
    def test_two_exit_loop_counts(self):
        auto = derive_automaton(parse_expression(TWO_EXIT_LOOP_EXPR))
        assert auto.n_states == 3
        assert len(auto.transitions) == 5
        assert auto.terminating == frozenset({2})

    def test_interleaved_loop_counts(self):
        auto = derive_automaton(parse_expression(INTERLEAVED_LOOP_EXPR))
        assert auto.n_states == 4
        assert len(auto.transitions) == 6
        assert len(auto.terminating) == 1

    def test_communicating_loop_counts_and_edge(self):
        auto = derive_automaton(parse_expression(COMMUNICATING_LOOP_EXPR), communicating_gamma())
        assert auto.n_states == 6
        assert len(auto.transitions) == 10
        e_edges = [t for t in auto.transitions if t.action.name == "e"]
        assert e_edges == [Transition(1, Action("e"), 2)]

    def test_deadlock(self):
        auto = derive_automaton(parse_expression("0"))
        assert auto.n_states == 1
        assert auto.transitions == ()
        assert auto.terminating == frozenset()

    def test_deterministic(self):
        e = parse_expression(COMMUNICATING_LOOP_EXPR)
        assert derive_automaton(e, communicating_gamma()) == derive_automaton(e, communicating_gamma())

    def test_breadth_first_numbering_and_labels(self):
        auto = derive_automaton(parse_expression("a+b.c"))
        # successors of the root sorted by action name: a before b
        assert auto.labels == ("a+b.c", "1", "1.c")
        assert Transition(0, Action("a"), 1) in auto.transitions
        assert Transition(0, Action("b"), 2) in auto.transitions

    def test_state_expressions_round_trip(self):
        auto = derive_automaton(parse_expression(TWO_EXIT_LOOP_EXPR))
        exprs = state_expressions(auto)
        assert exprs[0] == parse_expression(TWO_EXIT_LOOP_EXPR)
        assert exprs[auto.initial] == exprs[0]

    def test_state_limit(self):
        with pytest.raises(StateLimitExceeded):
            derive_automaton(parse_expression("a.b.c"), EMPTY_COMM, max_states=2)
        # exactly enough states is fine
        auto = derive_automaton(parse_expression("a.b.c"), EMPTY_COMM, max_states=4)
        assert auto.n_states == 4

    def test_gamma_irrelevant_for_sequential_expressions(self):
        gamma = communicating_gamma()
        for seed in range(100):
            e = generate_random_expression(Theory.BPA, 5, 900 + seed)
            assert derive_automaton(e, gamma) == derive_automaton(e)

    def test_transitions_sorted(self):
        auto = derive_automaton(parse_expression(COMMUNICATING_LOOP_EXPR), communicating_gamma())
        assert list(auto.transitions) == sorted(auto.transitions)


class TestAutomatonValue:
    def test_validation(self):
        with pytest.raises(ValueError):
            Automaton(labels=(), initial=0, transitions=(), terminating=frozenset())
        with pytest.raises(ValueError):
            Automaton(labels=(None,), initial=1, transitions=(), terminating=frozenset())
        with pytest.raises(ValueError):
            Automaton(
                labels=(None,),
                initial=0,
                transitions=(Transition(0, Action("a"), 3),),
                terminating=frozenset(),
            )
        with pytest.raises(ValueError):
            Automaton(labels=(None,), initial=0, transitions=(), terminating=frozenset({9}))

    def test_duplicate_transitions_collapse(self):
        auto = Automaton(
            labels=(None, None),
            initial=0,
            transitions=(Transition(0, Action("a"), 1), Transition(0, Action("a"), 1)),
            terminating=frozenset(),
        )
        assert len(auto.transitions) == 1


class TestSerialisation:
    def test_json_round_trip(self):
        auto = derive_automaton(parse_expression(COMMUNICATING_LOOP_EXPR), communicating_gamma())
        text = automaton_to_json(auto)
        assert automaton_from_json(text) == auto
        assert automaton_to_json(auto) == text  # byte stable

    def test_json_unlabelled(self):
        auto = Automaton(
            labels=(None, "x"),
            initial=0,
            transitions=(Transition(0, Action("a"), 1),),
            terminating=frozenset({1}),
        )
        again = automaton_from_json(automaton_to_json(auto))
        assert again == auto

    def test_json_rejects_garbage(self):
        from starpar import AutomatonFormatError

        for bad in (
            "[]",
            "{}",
            '{"states": [], "initial": 0, "transitions": []}',
            '{"states": [{"id": 0}], "initial": 0, "transitions": [{"from": 0, "to": 0}]}',
            '{"states": [{"id": 1}], "initial": 0, "transitions": []}',
            "not json",
        ):
            with pytest.raises(AutomatonFormatError):
                automaton_from_json(bad)

    def test_dot_output(self):
        auto = derive_automaton(parse_expression("a"))
        dot = automaton_to_dot(auto)
        assert dot.startswith("digraph")
        assert "__initial__ [shape=point" in dot
        assert "doublecircle" in dot  # the terminated state
        assert '[label="a"]' in dot
