from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from engine.automata import (INIT_STATE, ProjectionController, RabinAutomaton, RabinPair, avoid_automaton,
                             build_product, buchi_automaton, cobuchi_automaton, reach_automaton, valuations)
from engine.chain import induced_chain, reach_probabilities
from engine.errors import AutomatonError
from engine.model import MemorylessStrategy, Mdp, materialize
from engine.oracle import gen_random_mdp


def test_valuations_smallest_first():
    assert valuations(('a', 'b')) == [frozenset(), frozenset({'b'}), frozenset({'a'}), frozenset({'a', 'b'})]


def test_builtin_automata():
    reach = reach_automaton('P1')
    assert reach.step('wait', {'P1', 'other'}) == 'done'
    assert reach.step('wait', set()) == 'wait'
    assert reach.accepts_cycle({'done'})
    assert not reach.accepts_cycle({'wait'})
    assert avoid_automaton('P1').accepts_cycle({'wait'})
    assert not avoid_automaton('P1').accepts_cycle({'done'})
    assert buchi_automaton('P1').accepts_cycle({'on', 'off'})
    assert not cobuchi_automaton('P1').accepts_cycle({'on', 'off'})
    assert cobuchi_automaton('P1').accepts_cycle({'off'})


def test_build_requires_total_transition_function():
    with pytest.raises(AutomatonError, match="not total"):
        RabinAutomaton.build(('q',), 'q', ('p',), {('q', frozenset()): 'q'}, ())


def test_reserved_characters_in_state_names():
    delta = {('a,b', frozenset()): 'a,b'}
    with pytest.raises(AutomatonError, match="may not contain"):
        RabinAutomaton.build(('a,b',), 'a,b', (), delta, (RabinPair(frozenset(), frozenset({'a,b'})),))


def test_alphabet_must_match_model(three_action_model):
    with pytest.raises(AutomatonError, match="unknown to the model"):
        reach_automaton('Z').check_alphabet(three_action_model)


def test_product_of_recurrence_automata(memory_needed_model, recurrence_automata):
    p = build_product(memory_needed_model, recurrence_automata)
    assert set(p.base.states) == {INIT_STATE, '(u;off;off)', '(p1;on;off)', '(p2;off;on)'}
    assert p.base.successors(INIT_STATE, p.init_action) == (('(u;off;off)', Fraction(1)),)
    assert p.step('(p1;on;off)', 'p2') == '(p2;off;on)'
    assert p.source_state('(p1;on;off)') == 'p1'
    assert p.automaton_state('(p1;on;off)', 0) == 'on'
    assert p.base.label('(p1;on;off)') == frozenset({'P1'})


def test_projection_replays_product_strategy(three_action_model):
    p = build_product(three_action_model, [reach_automaton('P1')])
    sigma = MemorylessStrategy.pure({INIT_STATE: p.init_action, '(s;wait)': 'a3',
                                     '(p1;done)': 'stay', '(p2;wait)': 'stay'})
    lifted = materialize(three_action_model, ProjectionController(p, sigma))
    chain = induced_chain(three_action_model, lifted)
    assert reach_probabilities(chain, [{'p1'}, {'p2'}]) == [Fraction(1, 2), Fraction(1, 2)]
    assert lifted.choose('s', lifted.initial_mode) == {'a3': 1}


def test_product_rejects_reserved_state_name():
    m = Mdp.build({INIT_STATE: set()}, {(INIT_STATE, 'loop'): {INIT_STATE: 1}})
    with pytest.raises(AutomatonError, match="reserved"):
        build_product(m, [])


def test_empty_acceptance_is_rejected():
    delta = {('q', frozenset()): 'q', ('q', frozenset({'p'})): 'q'}
    with pytest.raises(AutomatonError, match="no acceptance pair"):
        RabinAutomaton.build(('q',), 'q', ('p',), delta, ())


def test_product_paths_project_onto_model_paths():
    automata = [buchi_automaton('T1'), reach_automaton('T2'), avoid_automaton('T1')]
    rng = np.random.default_rng(2)
    for seed in range(10):
        m, _ = gen_random_mdp(seed, states=4, actions=2, targets=2)
        p = build_product(m, automata)
        for _ in range(5):
            entry = p.base.successors(p.init_state, p.init_action)
            current = entry[int(rng.integers(len(entry)))][0]
            x = p.source_state(current)
            assert x in m.initial.support
            qs = [a.step(a.initial, m.label(x)) for a in automata]
            for _ in range(8):
                assert p.base.label(current) == m.label(x)
                assert [p.automaton_state(current, i) for i in range(len(automata))] == qs
                assert set(p.base.enabled(current)) == set(m.enabled(x))
                actions = p.base.enabled(current)
                action = actions[int(rng.integers(len(actions)))]
                succs = p.base.successors(current, action)
                projected = defaultdict(Fraction)
                for t, prob in succs:
                    projected[p.source_state(t)] += prob
                assert dict(projected) == dict(m.successors(x, action))
                current = succs[int(rng.integers(len(succs)))][0]
                x = p.source_state(current)
                qs = [a.step(q, m.label(x)) for a, q in zip(automata, qs)]
