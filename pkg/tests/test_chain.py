from fractions import Fraction

import pytest

from engine.automata import buchi_automaton, reach_automaton
from engine.chain import (acceptance_probability, bscc_analysis, hitting_probabilities, induced_chain,
                          reach_probabilities, solve_sparse)
from engine.errors import SolverError, StrategyError
from engine.model import MemorylessStrategy

TARGETS = [frozenset({'p1'}), frozenset({'p2'})]


def test_solve_sparse_exact():
    rows = {'x': {'x': 2, 'y': 1}, 'y': {'x': 1, 'y': 3}}
    assert solve_sparse(rows, {'x': 5, 'y': 10}) == {'x': 1, 'y': 3}


def test_solve_sparse_singular():
    with pytest.raises(SolverError, match="singular"):
        solve_sparse({'x': {'x': 1, 'y': 1}, 'y': {'x': 2, 'y': 2}}, {'x': 1, 'y': 2})


def test_hitting_probabilities_gamblers_walk():
    succ = {
        0: {0: Fraction(1)},
        1: {0: Fraction(1, 2), 2: Fraction(1, 2)},
        2: {1: Fraction(1, 2), 3: Fraction(1, 2)},
        3: {3: Fraction(1)},
    }
    assert hitting_probabilities(succ, {3}) == {0: 0, 1: Fraction(1, 3), 2: Fraction(2, 3), 3: 1}


def test_pure_strategy_probabilities(three_action_model):
    m = three_action_model
    both = induced_chain(m, MemorylessStrategy.pure({'s': 'a3', 'p1': 'stay', 'p2': 'stay'}))
    assert both.rows[('s', 'm')] == {('p1', 'm'): Fraction(1, 2), ('p2', 'm'): Fraction(1, 2)}
    assert reach_probabilities(both, TARGETS) == [Fraction(1, 2), Fraction(1, 2)]

    first = induced_chain(m, MemorylessStrategy.pure({'s': 'a1', 'p1': 'stay', 'x1': 'stay'}))
    assert reach_probabilities(first, TARGETS) == [Fraction(3, 5), 0]


def test_mixed_strategy_probabilities(three_action_model):
    sigma = MemorylessStrategy.of({'s': {'a1': Fraction(1, 2), 'a2': Fraction(1, 2)},
                                   'p1': {'stay': 1}, 'p2': {'stay': 1}, 'x1': {'stay': 1}, 'x2': {'stay': 1}})
    chain = induced_chain(three_action_model, sigma)
    assert reach_probabilities(chain, TARGETS) == [Fraction(3, 10), Fraction(2, 5)]
    for row in chain.rows.values():
        assert sum(row.values()) == 1


def test_bscc_analysis(three_action_model):
    chain = induced_chain(three_action_model, MemorylessStrategy.pure({'s': 'a3', 'p1': 'stay', 'p2': 'stay'}))
    report = bscc_analysis(chain)
    assert report.components == (frozenset({('p1', 'm')}), frozenset({('p2', 'm')}))
    assert report.absorption == (Fraction(1, 2), Fraction(1, 2))


def test_strategy_must_fit_model(three_action_model):
    with pytest.raises(StrategyError):
        induced_chain(three_action_model, MemorylessStrategy.pure({'s': 'jump'}))
    with pytest.raises(StrategyError, match="no choice"):
        induced_chain(three_action_model, MemorylessStrategy.pure({'s': 'a3'}))


def test_two_mode_strategy_chain(memory_needed_model, two_mode_strategy):
    chain = induced_chain(memory_needed_model, two_mode_strategy)
    assert set(chain.states) == {('u', 'first'), ('p1', 'first'), ('p1', 'later'), ('p2', 'first')}
    for row in chain.rows.values():
        assert sum(row.values()) == 1
    assert acceptance_probability(chain, buchi_automaton('P1')) == Fraction(1, 2)
    assert acceptance_probability(chain, buchi_automaton('P2')) == Fraction(1, 2)


def test_acceptance_of_reachability_matches_hitting(three_action_model):
    sigma = MemorylessStrategy.pure({'s': 'a2', 'p2': 'stay', 'x2': 'stay'})
    chain = induced_chain(three_action_model, sigma)
    assert acceptance_probability(chain, reach_automaton('P2')) == Fraction(4, 5)
    assert reach_probabilities(chain, [frozenset({'p2'})]) == [Fraction(4, 5)]
