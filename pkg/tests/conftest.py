from fractions import Fraction

import pytest

from engine.automata import buchi_automaton
from engine.model import FiniteMemoryStrategy, Mdp
from utils.persistence import serialize_mdp


# --- MODELS ---

@pytest.fixture
def three_action_model():
    """s picks a1 (P1 w.p. 3/5), a2 (P2 w.p. 4/5) or a3 (P1 and P2 w.p. 1/2 each).

    x1 and x2 are the unlabelled leftovers of a1 and a2; `dead` is an
    unreachable absorbing sink.
    """
    labels = {'s': set(), 'p1': {'P1'}, 'p2': {'P2'}, 'x1': set(), 'x2': set(), 'dead': {'dead'}}
    trans = {
        ('s', 'a1'): {'p1': Fraction(3, 5), 'x1': Fraction(2, 5)},
        ('s', 'a2'): {'p2': Fraction(4, 5), 'x2': Fraction(1, 5)},
        ('s', 'a3'): {'p1': Fraction(1, 2), 'p2': Fraction(1, 2)},
    }
    for t in ('p1', 'p2', 'x1', 'x2', 'dead'):
        trans[(t, 'stay')] = {t: Fraction(1)}
    return Mdp.build(labels, trans, 's')


@pytest.fixture
def memory_needed_model():
    """u -> p1; p1 loops on `a` or leaves for the absorbing p2 on `b`."""
    labels = {'u': set(), 'p1': {'P1'}, 'p2': {'P2'}}
    trans = {
        ('u', 'go'): {'p1': Fraction(1)},
        ('p1', 'a'): {'p1': Fraction(1)},
        ('p1', 'b'): {'p2': Fraction(1)},
        ('p2', 'stay'): {'p2': Fraction(1)},
    }
    return Mdp.build(labels, trans, 'u')


@pytest.fixture
def recurrence_automata():
    return [buchi_automaton('P1'), buchi_automaton('P2')]


@pytest.fixture
def two_mode_strategy():
    """At p1 flip a coin once: leave for p2, or loop on `a` forever."""
    return FiniteMemoryStrategy.of(
        modes=('first', 'later'), initial_mode='first',
        choice={
            ('u', 'first'): {'go': 1},
            ('p1', 'first'): {'a': Fraction(1, 2), 'b': Fraction(1, 2)},
            ('p1', 'later'): {'a': 1},
            ('p2', 'first'): {'stay': 1},
        },
        update={('p1', 'first', 'a', 'p1'): {'later': 1}},
    )


@pytest.fixture
def model_file(tmp_path, three_action_model):
    path = tmp_path / 'three_action.json'
    path.write_text(serialize_mdp(three_action_model))
    return str(path)


# --- AUTOMATA ---

REACH_P1_HOA = """HOA: v1
name: "reach P1"
States: 2
Start: 0
AP: 1 "P1"
acc-name: Rabin 1
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[!0] 0
[0] 1
State: 1 {1}   /* accepting sink */
[t] 1
--END--
"""


@pytest.fixture
def reach_hoa_text():
    return REACH_P1_HOA
